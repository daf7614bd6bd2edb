#include "vsuspect/batch.hpp"

#include <exception>

#include "vsuspect/errors.hpp"

namespace vsuspect {

using nlohmann::json;

RunSummary summarize_transcript(const json& transcript, std::string path) {
  if (!transcript.is_object() || transcript.value("view", "") != "instructor" || !transcript.contains("turns")) {
    throw ValidationError(path, "not an instructor transcript");
  }
  RunSummary summary;
  summary.transcript_path = std::move(path);
  summary.seed = transcript["session"].value("seed", std::uint64_t{0});
  summary.final_state = transcript["session"]["profile"].value("s0", Vec3{});
  std::array<std::size_t, 3> counts{};
  std::size_t answered = 0;
  for (const auto& turn : transcript["turns"]) {
    ++summary.turns;
    if (turn.value("hot", 0) == 1) ++summary.hot_turns;
    if (!turn["fault"].is_null()) ++summary.faults;
    summary.final_state = turn["state"].get<Vec3>();
    if (turn["subset"].is_string()) {
      if (auto k = parse_subset_kind(turn["subset"].get<std::string>())) {
        ++counts[static_cast<std::size_t>(*k)];
        ++answered;
      }
    }
  }
  if (answered > 0) {
    std::array<double, 3> freq{};
    for (std::size_t i = 0; i < 3; ++i) freq[i] = static_cast<double>(counts[i]) / static_cast<double>(answered);
    summary.subset_frequencies = freq;
  }
  return summary;
}

json to_json(const BatchReport& report) {
  json runs = json::array();
  std::array<double, 3> totals{};
  std::size_t answered_runs = 0;
  for (const auto& r : report.runs) {
    json freq = nullptr;
    if (r.subset_frequencies) {
      const auto& f = *r.subset_frequencies;
      freq = {{"truthful", f[0]}, {"false", f[1]}, {"neutral", f[2]}};
      for (std::size_t i = 0; i < 3; ++i) totals[i] += f[i];
      ++answered_runs;
    }
    runs.push_back({{"transcript", r.transcript_path},
                    {"seed", r.seed},
                    {"turns", r.turns},
                    {"hot_turns", r.hot_turns},
                    {"faults", r.faults},
                    {"subset_frequencies", freq},
                    {"final_state", r.final_state}});
  }
  json mean = nullptr;
  if (answered_runs > 0) {
    const double n = static_cast<double>(answered_runs);
    mean = {{"truthful", totals[0] / n}, {"false", totals[1] / n}, {"neutral", totals[2] / n}};
  }
  return json{{"runs", runs}, {"mean_subset_frequencies", mean}};
}

json simulate_once(const SimulationInputs& inputs, std::uint64_t seed) {
  Session session("batch", inputs.scenario, inputs.templates, inputs.profile, inputs.mode, seed);
  for (const auto& step : inputs.script) session.step(step.template_id, step.values);
  return export_transcript(session, TranscriptView::Instructor);
}

std::vector<json> simulate_batch(const SimulationInputs& inputs, std::uint64_t first_seed, std::size_t runs) {
  std::vector<json> out(runs);
  std::exception_ptr failure;
  const auto n = static_cast<long long>(runs);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = simulate_once(inputs, first_seed + static_cast<std::uint64_t>(i));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace vsuspect
