#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vsuspect/psych.hpp"
#include "vsuspect/rng.hpp"
#include "vsuspect/scenario.hpp"
#include "vsuspect/templates.hpp"

namespace vsuspect {

enum class SubsetKind { Truthful = 0, False = 1, Neutral = 2 };
enum class ContextClass { CriminalRelated = 0, HotNonCriminal = 1, ColdOther = 2 };

std::string_view to_string(SubsetKind kind);
std::string_view to_string(ContextClass ctx);
std::optional<SubsetKind> parse_subset_kind(std::string_view text);
std::optional<ContextClass> parse_context_class(std::string_view text);

struct CandidatePartition {
  std::vector<PopulatedResponse> truthful;
  std::vector<PopulatedResponse> deceptive;
  std::vector<PopulatedResponse> neutral;

  const std::vector<PopulatedResponse>& subset(SubsetKind kind) const;
  std::size_t size() const noexcept { return truthful.size() + deceptive.size() + neutral.size(); }
};

/// Probabilities of picking from the truthful, false and neutral subsets.
struct ResponseDistribution {
  double truthful = 0.0;
  double deceptive = 0.0;
  double neutral = 0.0;

  double operator[](SubsetKind kind) const noexcept;
  bool valid(double tolerance = 1e-9) const noexcept;

  friend bool operator==(const ResponseDistribution&, const ResponseDistribution&) = default;
};

/// Integrity score in [0,1]: (2 * green + orange) / 6. 1 is fully green.
double integrity_score(const MentalIntegrity& mi);

/// Per-context rule: linear in the integrity score between the fully
/// compromised (score 0) and fully stable (score 1) distributions.
struct ContextRule {
  ResponseDistribution stable;
  ResponseDistribution compromised;

  friend bool operator==(const ContextRule&, const ContextRule&) = default;
};

class PolicyTable {
 public:
  /// Criminal-related: stable (0,1,0), compromised (0.5,0.1,0.4).
  /// Hot non-criminal: (0.3,0,0.7) throughout. Cold other: (0.9,0,0.1)
  /// throughout. Order is (truthful, false, neutral).
  static PolicyTable defaults();

  ContextRule& rule(ContextClass ctx) { return rules_[static_cast<std::size_t>(ctx)]; }
  const ContextRule& rule(ContextClass ctx) const { return rules_[static_cast<std::size_t>(ctx)]; }

  /// Exact-s' override, taking precedence over the rule.
  void set_override(ContextClass ctx, const MentalIntegrity& mi, const ResponseDistribution& dist);
  const std::map<std::pair<ContextClass, MentalIntegrity>, ResponseDistribution>& overrides() const noexcept {
    return overrides_;
  }

  ResponseDistribution distribution(const MentalIntegrity& mi, ContextClass ctx) const;

  friend bool operator==(const PolicyTable&, const PolicyTable&) = default;

 private:
  std::array<ContextRule, 3> rules_{};
  std::map<std::pair<ContextClass, MentalIntegrity>, ResponseDistribution> overrides_;
};

/// Event-bound to a truthful event -> truthful; to an Alibi/LegalAccess
/// (false) event -> false; personal-bound -> truthful; generic -> neutral.
/// Throws EngineError("unknown_event") for a binding to an unknown event.
CandidatePartition partition(std::span<const PopulatedResponse> candidates, const ScenarioDatabase& db);

/// Criminal-related when the resolved event is the Criminal event or any
/// statement value equals one of its detail values.
bool touches_criminal_event(const StatementInstance& statement, const Event* resolved_event,
                            const ScenarioDatabase& db);

ContextClass context_class(const StatementInstance& statement, const Event* resolved_event, int hot,
                           const ScenarioDatabase& db);

struct Selection {
  SubsetKind subset = SubsetKind::Neutral;
  const PopulatedResponse* response = nullptr;
};

/// Probabilities after dropping empty subsets: remaining mass renormalized,
/// or uniform over non-empty subsets when that mass is zero.
/// Throws EngineError("no_response") when every subset is empty.
ResponseDistribution effective_distribution(const CandidatePartition& part, const ResponseDistribution& dist);

/// Draws a subset from the effective distribution, then a response uniformly
/// within it. Consumes exactly two draws from the rng.
Selection select_response(const CandidatePartition& part, const ResponseDistribution& dist, SessionRng& rng);

/// Uniform over every candidate, ignoring state and context. Returns the
/// candidate index. Throws EngineError("no_response") if empty.
std::size_t random_baseline(std::span<const PopulatedResponse> candidates, SessionRng& rng);

nlohmann::json to_json(const PolicyTable& policy);
/// Throws ValidationError with paths relative to `path`.
PolicyTable load_policy(const nlohmann::json& doc, const std::string& path = "/policy");

}  // namespace vsuspect
