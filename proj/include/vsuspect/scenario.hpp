#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace vsuspect {

enum class EventLabel { Criminal, Alibi, LegalAccess, Neutral };

enum class DetailKind { Location, Time, Date, Activity, Participants, Objects, Transportation };

inline constexpr std::array<DetailKind, 7> kAllDetailKinds = {
    DetailKind::Location, DetailKind::Time,    DetailKind::Date,          DetailKind::Activity,
    DetailKind::Participants, DetailKind::Objects, DetailKind::Transportation};

std::string_view to_string(EventLabel label);
std::string_view to_string(DetailKind kind);
std::optional<EventLabel> parse_event_label(std::string_view text);
std::optional<DetailKind> parse_detail_kind(std::string_view text);

/// A scenario fact. Scalars hold one item; name lists (participants,
/// objects) may hold several.
struct DetailValue {
  std::vector<std::string> items;
  bool list = false;
  bool hot = false;

  /// Text used when the value fills a response field.
  std::string render() const;
  /// Case-insensitive match against one item (dates and times compared in
  /// canonical form).
  bool matches(std::string_view value) const;

  friend bool operator==(const DetailValue&, const DetailValue&) = default;
};

struct Event {
  std::string id;
  EventLabel label = EventLabel::Neutral;
  bool truthful = true;
  /// Marks every detail of the event as hot.
  bool hot = false;
  std::string description;
  std::map<DetailKind, DetailValue> details;

  const DetailValue* detail(DetailKind kind) const;
  const std::string& date() const;
  const std::string& time() const;

  friend bool operator==(const Event&, const Event&) = default;
};

struct PersonalInfo {
  std::map<std::string, DetailValue> entries;

  friend bool operator==(const PersonalInfo&, const PersonalInfo&) = default;
};

struct PersonalRef {
  std::string name;
  friend bool operator==(const PersonalRef&, const PersonalRef&) = default;
  friend auto operator<=>(const PersonalRef&, const PersonalRef&) = default;
};

struct EventDetailRef {
  std::string event_id;
  DetailKind kind = DetailKind::Location;
  friend bool operator==(const EventDetailRef&, const EventDetailRef&) = default;
  friend auto operator<=>(const EventDetailRef&, const EventDetailRef&) = default;
};

/// Reference to a single hot-labelable fact.
using DetailRef = std::variant<PersonalRef, EventDetailRef>;

/// A case-file entry points at a whole event, an event detail or a personal
/// detail.
struct CaseFileRef {
  std::string event_id;               // empty for personal refs
  std::optional<DetailKind> kind;     // set for event-detail refs
  std::string personal;               // set for personal refs

  friend bool operator==(const CaseFileRef&, const CaseFileRef&) = default;
};

struct CaseFile {
  std::string narrative;
  std::vector<CaseFileRef> known_facts;
  std::vector<std::string> evidence;

  friend bool operator==(const CaseFile&, const CaseFile&) = default;
};

struct ScenarioMetadata {
  std::string id;
  std::string title;
  int source_year = 0;
  /// Template document path, relative to the scenario document.
  std::string templates;

  friend bool operator==(const ScenarioMetadata&, const ScenarioMetadata&) = default;
};

/// Conjunction of detail constraints used by query_events.
class EventFilter {
 public:
  EventFilter() = default;
  /// Throws EngineError("unknown_detail_kind") for a kind that is not one of
  /// the seven event detail kinds.
  EventFilter& where(std::string_view kind, std::string value);
  EventFilter& where(DetailKind kind, std::string value);

  bool empty() const noexcept { return constraints_.empty(); }
  bool matches(const Event& event) const;
  const std::vector<std::pair<DetailKind, std::string>>& constraints() const noexcept { return constraints_; }

 private:
  std::vector<std::pair<DetailKind, std::string>> constraints_;
};

/// Long-term memory of the suspect. Immutable once loaded.
class ScenarioDatabase {
 public:
  ScenarioDatabase() = default;

  const ScenarioMetadata& metadata() const noexcept { return metadata_; }
  const PersonalInfo& personal() const noexcept { return personal_; }
  const std::vector<Event>& events() const noexcept { return events_; }
  const CaseFile& case_file() const noexcept { return case_file_; }

  const Event* find_event(std::string_view id) const;
  const Event* criminal_event() const;
  const DetailValue* personal_detail(std::string_view name) const;

  /// All events satisfying every constraint, ordered by (date, time), then
  /// truthful before false, then document order.
  std::vector<const Event*> query_events(const EventFilter& filter) const;

  /// Stored hot flag. Throws EngineError("unresolved_reference").
  bool is_hot(const DetailRef& ref) const;

  /// True if some hot fact of the given field kind (event detail kind or
  /// personal detail name) holds `value`.
  bool value_is_hot(std::string_view kind, std::string_view value) const;

  friend bool operator==(const ScenarioDatabase&, const ScenarioDatabase&) = default;

 private:
  friend ScenarioDatabase load_scenario(const nlohmann::json&);

  ScenarioMetadata metadata_;
  PersonalInfo personal_;
  std::vector<Event> events_;
  CaseFile case_file_;
};

/// Validates and builds a scenario. Throws ValidationError listing every
/// problem with its document path; never returns a partial database.
ScenarioDatabase load_scenario(const nlohmann::json& document);
ScenarioDatabase load_scenario_file(const std::string& path);

nlohmann::json to_json(const ScenarioDatabase& db);

/// Trainee-facing case file: narrative, rendered known facts and evidence.
/// Carries no labels or hot flags.
nlohmann::json case_file_view(const ScenarioDatabase& db);

}  // namespace vsuspect
