#pragma once

#include <memory>
#include <string>

#include "vsuspect/service.hpp"

namespace vsuspect::testing {

inline std::string data_path(const std::string& rel) { return std::string(VSUSPECT_DATA_DIR) + "/" + rel; }

inline ScenarioEntry burglary() {
  static const ScenarioEntry entry = load_scenario_bundle(data_path("scenarios/burglary.json"));
  return entry;
}

inline PersonalityProfile experiment_profile() { return load_profile_file(data_path("profiles/experiment.json")); }

inline std::vector<ScriptStep> burglary_script() { return load_script_file(data_path("scripts/burglary_15.json")); }

}  // namespace vsuspect::testing
