#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vsuspect/policy.hpp"
#include "vsuspect/profile.hpp"
#include "vsuspect/psych.hpp"
#include "vsuspect/rng.hpp"
#include "vsuspect/scenario.hpp"
#include "vsuspect/templates.hpp"

namespace vsuspect {

inline constexpr std::string_view kEngineVersion = "1.0.0";

enum class StatementKind { NewEvent, FollowUp, Generic };
enum class SessionMode { Model, RandomBaseline };

std::string_view to_string(StatementKind kind);
std::string_view to_string(SessionMode mode);
std::optional<SessionMode> parse_session_mode(std::string_view text);

/// The event currently under discussion.
struct ShortTermMemory {
  std::optional<std::string> current_event;
  FieldValues last_resolved;

  friend bool operator==(const ShortTermMemory&, const ShortTermMemory&) = default;
};

/// Which combinations of event detail kinds identify an event. A statement
/// whose fields cover one of the sets refers to a new event.
struct ClassificationRules {
  std::vector<std::vector<DetailKind>> identifying{{DetailKind::Date},
                                                   {DetailKind::Location, DetailKind::Activity}};
};

/// Constraints from the statement's event-detail fields.
EventFilter statement_filter(const StatementTemplate& tmpl, const StatementInstance& statement);

/// `notes` receives an explanation when a follow-up has nothing to follow.
StatementKind classify_statement(const StatementTemplate& tmpl, const StatementInstance& statement,
                                 std::span<const ResponseTemplate* const> responses, const ShortTermMemory& memory,
                                 const ClassificationRules& rules, std::vector<std::string>* notes = nullptr);

ShortTermMemory resolve_memory(StatementKind kind, const StatementTemplate& tmpl, const StatementInstance& statement,
                               const ScenarioDatabase& db, const ShortTermMemory& memory,
                               std::vector<std::string>* notes = nullptr);

/// Fills every associated response from memory. Event-bound responses come
/// from `active_event`, plus, when `criminal_context` is set, from each
/// Alibi/LegalAccess event matching the statement's detail constraints.
/// Unfillable responses are dropped with a note.
std::vector<PopulatedResponse> populate_candidates(std::span<const ResponseTemplate* const> responses,
                                                   const StatementTemplate& tmpl,
                                                   const StatementInstance& statement, const ScenarioDatabase& db,
                                                   const Event* active_event, bool criminal_context,
                                                   std::vector<std::string>* notes = nullptr);

struct TurnRecord {
  std::uint64_t turn = 0;
  StatementInstance statement;
  StatementKind kind = StatementKind::Generic;
  std::optional<std::string> event_id;
  int hot = 0;
  Vec3 state_before{};
  Vec3 state_after{};
  MentalIntegrity integrity;
  ContextClass context = ContextClass::ColdOther;
  ResponseDistribution distribution;
  std::size_t candidate_count = 0;
  std::optional<SubsetKind> subset;
  std::optional<std::string> response_template;
  std::optional<std::string> response_event;
  std::string response;
  std::vector<std::string> notes;
  std::optional<std::string> fault;
  std::chrono::system_clock::time_point timestamp;
};

/// One interrogation. Not thread-safe; callers serialize turns.
class Session {
 public:
  using Clock = std::function<std::chrono::system_clock::time_point()>;

  Session(std::string id, std::shared_ptr<const ScenarioDatabase> scenario,
          std::shared_ptr<const TemplateStore> templates, PersonalityProfile profile, SessionMode mode,
          std::uint64_t seed, Clock clock = {});

  /// Runs one full turn. Throws EngineError for an unknown template or
  /// invalid field values, leaving the session untouched. A turn with no
  /// candidate responses is recorded with `fault` set.
  const TurnRecord& step(const StatementInstance& statement);
  const TurnRecord& step(std::string_view template_id, const FieldValues& values);

  const std::string& id() const noexcept { return id_; }
  const ScenarioDatabase& scenario() const noexcept { return *scenario_; }
  const TemplateStore& templates() const noexcept { return *templates_; }
  const PersonalityProfile& profile() const noexcept { return profile_; }
  SessionMode mode() const noexcept { return mode_; }
  const InternalState& state() const noexcept { return state_; }
  const ShortTermMemory& memory() const noexcept { return memory_; }
  const SessionRng& rng() const noexcept { return rng_; }
  const std::vector<TurnRecord>& transcript() const noexcept { return transcript_; }
  const ClassificationRules& rules() const noexcept { return rules_; }

 private:
  std::string id_;
  std::shared_ptr<const ScenarioDatabase> scenario_;
  std::shared_ptr<const TemplateStore> templates_;
  PersonalityProfile profile_;
  SessionMode mode_;
  ClassificationRules rules_;
  InternalState state_;
  ShortTermMemory memory_;
  SessionRng rng_;
  Clock clock_;
  std::vector<TurnRecord> transcript_;
};

}  // namespace vsuspect
