#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vsuspect/transcript.hpp"

namespace vsuspect {

struct RunSummary {
  std::string transcript_path;
  std::uint64_t seed = 0;
  std::size_t turns = 0;
  std::size_t hot_turns = 0;
  std::size_t faults = 0;
  /// Share of answered turns per subset kind (truthful, false, neutral);
  /// unset when no turn was answered.
  std::optional<std::array<double, 3>> subset_frequencies;
  Vec3 final_state{};
};

struct BatchReport {
  std::vector<RunSummary> runs;
};

/// Summary of one instructor transcript. Throws ValidationError if the
/// document is not one.
RunSummary summarize_transcript(const nlohmann::json& transcript, std::string path = {});

nlohmann::json to_json(const BatchReport& report);

struct SimulationInputs {
  std::shared_ptr<const ScenarioDatabase> scenario;
  std::shared_ptr<const TemplateStore> templates;
  PersonalityProfile profile;
  std::vector<ScriptStep> script;
  SessionMode mode = SessionMode::Model;
};

/// Runs the script once: instructor transcript of a fresh session.
nlohmann::json simulate_once(const SimulationInputs& inputs, std::uint64_t seed);

/// Runs the script with seeds first_seed .. first_seed + runs - 1. Runs are
/// independent and execute in parallel when OpenMP is available; output order
/// follows the seeds.
std::vector<nlohmann::json> simulate_batch(const SimulationInputs& inputs, std::uint64_t first_seed,
                                           std::size_t runs);

}  // namespace vsuspect
