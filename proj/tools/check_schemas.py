#!/usr/bin/env python3
"""Validate data documents against the JSON schemas in schema/."""

import json
import sys
from pathlib import Path

import jsonschema

ROOT = Path(__file__).resolve().parent.parent
PAIRS = {
    "scenarios": "scenario.schema.json",
    "templates": "templates.schema.json",
    "profiles": "profile.schema.json",
    "scripts": "script.schema.json",
}


def main() -> int:
    data = Path(sys.argv[1]) if len(sys.argv) > 1 else ROOT / "data"
    failures = 0
    for folder, schema_name in PAIRS.items():
        schema = json.loads((ROOT / "schema" / schema_name).read_text())
        jsonschema.Draft202012Validator.check_schema(schema)
        validator = jsonschema.Draft202012Validator(schema)
        for path in sorted((data / folder).glob("*.json")):
            errors = list(validator.iter_errors(json.loads(path.read_text())))
            for err in errors:
                print(f"{path}: /{'/'.join(map(str, err.absolute_path))}: {err.message}")
            failures += bool(errors)
            if not errors:
                print(f"{path}: ok")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
