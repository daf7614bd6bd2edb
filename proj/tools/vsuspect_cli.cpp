// vsuspect: offline validation, simulation, replay and statistics.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vsuspect/batch.hpp"
#include "vsuspect/errors.hpp"
#include "vsuspect/service.hpp"
#include "vsuspect/transcript.hpp"

using namespace vsuspect;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kFault = 2;

void print_diagnostics(const std::string& file, const ValidationError& e) {
  for (const auto& d : e.diagnostics()) std::cerr << file << ": " << d.path << ": " << d.message << "\n";
}

// Guesses the document type from its top-level keys.
std::string document_kind(const json& doc) {
  if (!doc.is_object()) return "unknown";
  if (doc.contains("metadata") || doc.contains("events")) return "scenario";
  if (doc.contains("statements") || doc.contains("responses")) return "templates";
  if (doc.contains("steps")) return "script";
  if (doc.contains("s0") || doc.contains("sigma")) return "profile";
  if (doc.contains("format")) return "transcript";
  return "unknown";
}

int validate_one(const std::string& path) {
  try {
    const json doc = read_json_file(path);
    const std::string kind = document_kind(doc);
    if (kind == "scenario") {
      load_scenario(doc);
    } else if (kind == "templates") {
      load_templates(doc);
    } else if (kind == "script") {
      load_script(doc);
    } else if (kind == "profile") {
      load_profile(doc);
    } else if (kind == "transcript") {
      summarize_transcript(doc, path);
    } else {
      std::cerr << path << ": unrecognised document\n";
      return kInvalid;
    }
    std::cout << path << ": ok (" << kind << ")\n";
    return kOk;
  } catch (const ValidationError& e) {
    print_diagnostics(path, e);
    return kInvalid;
  }
}

// Rejects script steps that would fail before the first turn runs.
void check_script(const std::vector<ScriptStep>& script, const TemplateStore& store) {
  std::vector<Diagnostic> diag;
  for (std::size_t i = 0; i < script.size(); ++i) {
    const std::string path = "/steps/" + std::to_string(i);
    const auto* tmpl = store.find_statement(script[i].template_id);
    if (!tmpl) {
      diag.push_back({path + "/template", "unknown statement template '" + script[i].template_id + "'"});
      continue;
    }
    try {
      instantiate_statement(*tmpl, script[i].values);
    } catch (const EngineError& e) {
      diag.push_back({path + "/fields" + (e.field().empty() ? "" : "/" + e.field()), e.what()});
    }
  }
  if (!diag.empty()) throw ValidationError(std::move(diag));
}

void write_document(const std::string& path, const json& doc) {
  if (path.empty() || path == "-") {
    std::cout << dump_document(doc);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(path, "cannot write file");
  out << dump_document(doc);
}

std::string numbered_path(const std::string& out, std::uint64_t seed) {
  const auto dot = out.rfind('.');
  const auto slash = out.rfind('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  const std::string stem = has_ext ? out.substr(0, dot) : out;
  return stem + "-" + std::to_string(seed) + (has_ext ? out.substr(dot) : ".json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual suspect interrogation engine"};
  app.require_subcommand(1);

  std::vector<std::string> validate_paths;
  auto* validate = app.add_subcommand("validate", "Check scenario, template, profile or script documents");
  validate->add_option("paths", validate_paths, "Documents to check")->required()->check(CLI::ExistingFile);

  std::string scenario_path, templates_path, profile_path, script_path, out_path, mode_text = "model";
  std::uint64_t seed = 0;
  std::size_t runs = 1;
  auto* simulate = app.add_subcommand("simulate", "Run a scripted interrogation");
  simulate->add_option("--scenario", scenario_path, "Scenario document")->required()->check(CLI::ExistingFile);
  simulate->add_option("--templates", templates_path, "Template document (default: from scenario metadata)")
      ->check(CLI::ExistingFile);
  simulate->add_option("--profile", profile_path, "Personality profile")->required()->check(CLI::ExistingFile);
  simulate->add_option("--script", script_path, "Statement script")->required()->check(CLI::ExistingFile);
  simulate->add_option("--seed", seed, "RNG seed (first seed with --runs)")->required();
  simulate->add_option("--mode", mode_text, "model or random")
      ->check(CLI::IsMember({"model", "random", "random-baseline"}));
  simulate->add_option("--runs", runs, "Number of runs with consecutive seeds")->check(CLI::PositiveNumber);
  simulate->add_option("--out", out_path, "Output transcript (default: stdout)");

  std::string replay_path, data_dir = "data";
  auto* replay = app.add_subcommand("replay", "Re-run an instructor transcript and compare");
  replay->add_option("transcript", replay_path, "Instructor transcript")->required()->check(CLI::ExistingFile);
  replay->add_option("--scenario", scenario_path, "Scenario document (default: looked up in --data by id)")
      ->check(CLI::ExistingFile);
  replay->add_option("--templates", templates_path, "Template document")->check(CLI::ExistingFile);
  replay->add_option("--data", data_dir, "Directory with scenarios/ to search");

  std::vector<std::string> stats_paths;
  auto* stats = app.add_subcommand("stats", "Summarize instructor transcripts");
  stats->add_option("transcripts", stats_paths, "Instructor transcripts")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInvalid;
  }

  try {
    if (*validate) {
      int status = kOk;
      for (const auto& p : validate_paths) status = std::max(status, validate_one(p));
      return status;
    }
    if (*simulate) {
      const auto bundle = load_scenario_bundle(scenario_path, templates_path);
      SimulationInputs inputs{bundle.scenario, bundle.templates, load_profile_file(profile_path),
                              load_script_file(script_path), *parse_session_mode(mode_text)};
      check_script(inputs.script, *inputs.templates);
      if (runs == 1 && (out_path.empty() || out_path == "-")) {
        write_document(out_path, simulate_once(inputs, seed));
        return kOk;
      }
      const auto docs = simulate_batch(inputs, seed, runs);
      BatchReport report;
      for (std::size_t i = 0; i < docs.size(); ++i) {
        std::string path;
        if (!out_path.empty() && out_path != "-") {
          path = runs == 1 ? out_path : numbered_path(out_path, seed + i);
          write_document(path, docs[i]);
        }
        report.runs.push_back(summarize_transcript(docs[i], path));
      }
      std::cout << dump_document(to_json(report));
      return kOk;
    }
    if (*replay) {
      const json doc = read_json_file(replay_path);
      ScenarioEntry bundle;
      if (!scenario_path.empty()) {
        bundle = load_scenario_bundle(scenario_path, templates_path);
      } else {
        const std::string id = doc.contains("session") ? doc["session"].value("scenario", "") : "";
        const auto catalog = Catalog::load_directory(data_dir);
        const ScenarioEntry* found = catalog.scenario(id);
        if (!found) throw ValidationError(replay_path + "#/session/scenario",
                                          "scenario '" + id + "' not found under " + data_dir + "/scenarios");
        bundle = *found;
      }
      const auto verdict = replay_transcript(doc, bundle.scenario, bundle.templates);
      std::cout << (verdict.verified ? "verified: " : "diverged: ") << verdict.detail << "\n";
      return verdict.verified ? kOk : kFault;
    }
    if (*stats) {
      BatchReport report;
      for (const auto& p : stats_paths) report.runs.push_back(summarize_transcript(read_json_file(p), p));
      std::cout << dump_document(to_json(report));
      return kOk;
    }
  } catch (const ValidationError& e) {
    print_diagnostics("error", e);
    return kInvalid;
  } catch (const EngineError& e) {
    std::cerr << "engine fault [" << e.code() << "]: " << e.what() << "\n";
    return kFault;
  } catch (const std::exception& e) {
    std::cerr << "engine fault: " << e.what() << "\n";
    return kFault;
  }
  return kOk;
}
