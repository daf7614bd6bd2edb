#include "vsuspect/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "vsuspect/errors.hpp"
#include "vsuspect/values.hpp"

namespace vsuspect {

using nlohmann::json;

std::string_view to_string(EventLabel label) {
  switch (label) {
    case EventLabel::Criminal: return "Criminal";
    case EventLabel::Alibi: return "Alibi";
    case EventLabel::LegalAccess: return "LegalAccess";
    case EventLabel::Neutral: return "Neutral";
  }
  return "Neutral";
}

std::string_view to_string(DetailKind kind) {
  switch (kind) {
    case DetailKind::Location: return "location";
    case DetailKind::Time: return "time";
    case DetailKind::Date: return "date";
    case DetailKind::Activity: return "activity";
    case DetailKind::Participants: return "participants";
    case DetailKind::Objects: return "objects";
    case DetailKind::Transportation: return "transportation";
  }
  return "location";
}

std::optional<EventLabel> parse_event_label(std::string_view text) {
  for (auto label : {EventLabel::Criminal, EventLabel::Alibi, EventLabel::LegalAccess, EventLabel::Neutral}) {
    if (to_string(label) == text) return label;
  }
  return std::nullopt;
}

std::optional<DetailKind> parse_detail_kind(std::string_view text) {
  for (auto kind : kAllDetailKinds) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

std::string DetailValue::render() const {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += (i + 1 == items.size()) ? " and " : ", ";
    out += items[i];
  }
  return out;
}

bool DetailValue::matches(std::string_view value) const {
  const auto date = canonical_date(value);
  const auto time = canonical_time(value);
  const auto folded = fold_text(value);
  return std::any_of(items.begin(), items.end(), [&](const std::string& item) {
    if (date && canonical_date(item) == date) return true;
    if (time && canonical_time(item) == time) return true;
    return fold_text(item) == folded;
  });
}

const DetailValue* Event::detail(DetailKind kind) const {
  auto it = details.find(kind);
  return it == details.end() ? nullptr : &it->second;
}

const std::string& Event::date() const {
  static const std::string empty;
  const auto* d = detail(DetailKind::Date);
  return d && !d->items.empty() ? d->items.front() : empty;
}

const std::string& Event::time() const {
  static const std::string empty;
  const auto* t = detail(DetailKind::Time);
  return t && !t->items.empty() ? t->items.front() : empty;
}

EventFilter& EventFilter::where(std::string_view kind, std::string value) {
  const auto parsed = parse_detail_kind(kind);
  if (!parsed) {
    throw EngineError("unknown_detail_kind", "unknown detail kind '" + std::string(kind) + "'", std::string(kind));
  }
  return where(*parsed, std::move(value));
}

EventFilter& EventFilter::where(DetailKind kind, std::string value) {
  constraints_.emplace_back(kind, std::move(value));
  return *this;
}

bool EventFilter::matches(const Event& event) const {
  return std::all_of(constraints_.begin(), constraints_.end(), [&](const auto& c) {
    const auto* d = event.detail(c.first);
    return d != nullptr && d->matches(c.second);
  });
}

const Event* ScenarioDatabase::find_event(std::string_view id) const {
  auto it = std::find_if(events_.begin(), events_.end(), [&](const Event& e) { return e.id == id; });
  return it == events_.end() ? nullptr : &*it;
}

const Event* ScenarioDatabase::criminal_event() const {
  auto it = std::find_if(events_.begin(), events_.end(),
                         [](const Event& e) { return e.label == EventLabel::Criminal; });
  return it == events_.end() ? nullptr : &*it;
}

const DetailValue* ScenarioDatabase::personal_detail(std::string_view name) const {
  auto it = personal_.entries.find(std::string(name));
  return it == personal_.entries.end() ? nullptr : &it->second;
}

std::vector<const Event*> ScenarioDatabase::query_events(const EventFilter& filter) const {
  std::vector<const Event*> out;
  for (const auto& e : events_) {
    if (filter.matches(e)) out.push_back(&e);
  }
  // Canonical date/time strings sort chronologically.
  std::stable_sort(out.begin(), out.end(), [](const Event* a, const Event* b) {
    if (a->date() != b->date()) return a->date() < b->date();
    if (a->time() != b->time()) return a->time() < b->time();
    return a->truthful && !b->truthful;
  });
  return out;
}

bool ScenarioDatabase::is_hot(const DetailRef& ref) const {
  if (const auto* p = std::get_if<PersonalRef>(&ref)) {
    const auto* d = personal_detail(p->name);
    if (!d) throw EngineError("unresolved_reference", "no personal detail '" + p->name + "'", p->name);
    return d->hot;
  }
  const auto& er = std::get<EventDetailRef>(ref);
  const auto* e = find_event(er.event_id);
  if (!e) throw EngineError("unresolved_reference", "no event '" + er.event_id + "'", er.event_id);
  const auto* d = e->detail(er.kind);
  if (!d) {
    throw EngineError("unresolved_reference",
                      "event '" + er.event_id + "' has no " + std::string(to_string(er.kind)) + " detail",
                      std::string(to_string(er.kind)));
  }
  return e->hot || d->hot;
}

bool ScenarioDatabase::value_is_hot(std::string_view kind, std::string_view value) const {
  if (const auto detail_kind = parse_detail_kind(kind)) {
    return std::any_of(events_.begin(), events_.end(), [&](const Event& e) {
      const auto* d = e.detail(*detail_kind);
      return d && (d->hot || e.hot) && d->matches(value);
    });
  }
  const auto* d = personal_detail(kind);
  return d && d->hot && d->matches(value);
}

// ---------------------------------------------------------------------------
// Loading

namespace {

class Checker {
 public:
  void fail(std::string path, std::string message) { diagnostics_.push_back({std::move(path), std::move(message)}); }
  bool ok() const noexcept { return diagnostics_.empty(); }
  std::vector<Diagnostic> take() { return std::move(diagnostics_); }

  void unknown_keys(const json& object, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, _] : object.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail(path + "/" + key, "unknown field '" + key + "'");
      }
    }
  }

  std::optional<std::string> string_field(const json& object, const std::string& path, const char* key,
                                          bool required) {
    if (!object.contains(key)) {
      if (required) fail(path + "/" + key, "missing required field");
      return std::nullopt;
    }
    if (!object[key].is_string()) {
      fail(path + "/" + key, "expected a string");
      return std::nullopt;
    }
    return object[key].get<std::string>();
  }

 private:
  std::vector<Diagnostic> diagnostics_;
};

std::optional<std::string> scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return v.dump();
  return std::nullopt;
}

std::optional<DetailValue> parse_detail_value(const json& raw, const std::string& path, Checker& check) {
  DetailValue out;
  const json* value = &raw;
  if (raw.is_object()) {
    check.unknown_keys(raw, path, {"value", "hot"});
    if (!raw.contains("value")) {
      check.fail(path + "/value", "missing required field");
      return std::nullopt;
    }
    if (raw.contains("hot")) {
      if (!raw["hot"].is_boolean()) {
        check.fail(path + "/hot", "expected a boolean");
        return std::nullopt;
      }
      out.hot = raw["hot"].get<bool>();
    }
    value = &raw["value"];
  }
  if (value->is_array()) {
    out.list = true;
    for (std::size_t i = 0; i < value->size(); ++i) {
      auto text = scalar_text((*value)[i]);
      if (!text) {
        check.fail(path + "/" + std::to_string(i), "expected a string");
        return std::nullopt;
      }
      out.items.push_back(*text);
    }
    return out;
  }
  auto text = scalar_text(*value);
  if (!text) {
    check.fail(path, "expected a string, number, list or {value, hot} object");
    return std::nullopt;
  }
  out.items.push_back(*text);
  return out;
}

std::optional<Event> parse_event(const json& raw, const std::string& path, Checker& check) {
  if (!raw.is_object()) {
    check.fail(path, "expected an object");
    return std::nullopt;
  }
  check.unknown_keys(raw, path, {"id", "label", "truthful", "hot", "description", "details"});
  Event event;
  bool good = true;

  if (auto id = check.string_field(raw, path, "id", true)) {
    if (id->empty()) {
      check.fail(path + "/id", "must not be empty");
      good = false;
    }
    event.id = *id;
  } else {
    good = false;
  }

  if (!raw.contains("label")) {
    check.fail(path + "/label", "missing required field");
    good = false;
  } else if (raw["label"].is_array()) {
    if (raw["label"].size() > 1) {
      check.fail(path + "/label", "labels are mutually exclusive: event carries " +
                                      std::to_string(raw["label"].size()) + " labels");
    } else {
      check.fail(path + "/label", "expected a single label string");
    }
    good = false;
  } else if (!raw["label"].is_string()) {
    check.fail(path + "/label", "expected a string");
    good = false;
  } else if (auto label = parse_event_label(raw["label"].get<std::string>())) {
    event.label = *label;
  } else {
    check.fail(path + "/label", "unknown label '" + raw["label"].get<std::string>() +
                                    "' (expected Criminal, Alibi, LegalAccess or Neutral)");
    good = false;
  }

  event.truthful = event.label == EventLabel::Criminal || event.label == EventLabel::Neutral;
  if (raw.contains("truthful")) {
    if (!raw["truthful"].is_boolean()) {
      check.fail(path + "/truthful", "expected a boolean");
      good = false;
    } else {
      event.truthful = raw["truthful"].get<bool>();
    }
  }
  if (good) {
    if ((event.label == EventLabel::Alibi || event.label == EventLabel::LegalAccess) && event.truthful) {
      check.fail(path + "/truthful", std::string(to_string(event.label)) + " events are false events");
      good = false;
    }
    if (event.label == EventLabel::Criminal && !event.truthful) {
      check.fail(path + "/truthful", "the Criminal event is truthful");
      good = false;
    }
  }

  if (raw.contains("hot")) {
    if (!raw["hot"].is_boolean()) {
      check.fail(path + "/hot", "expected a boolean");
      good = false;
    } else {
      event.hot = raw["hot"].get<bool>();
    }
  }
  if (auto d = check.string_field(raw, path, "description", false)) event.description = *d;

  if (!raw.contains("details") || !raw["details"].is_object()) {
    check.fail(path + "/details", raw.contains("details") ? "expected an object" : "missing required field");
    return std::nullopt;
  }
  for (const auto& [key, value] : raw["details"].items()) {
    const std::string dpath = path + "/details/" + key;
    const auto kind = parse_detail_kind(key);
    if (!kind) {
      check.fail(dpath, "unknown detail kind '" + key + "'");
      good = false;
      continue;
    }
    auto detail = parse_detail_value(value, dpath, check);
    if (!detail) {
      good = false;
      continue;
    }
    if (*kind == DetailKind::Date || *kind == DetailKind::Time) {
      if (detail->list || detail->items.size() != 1) {
        check.fail(dpath, "expected a single value");
        good = false;
        continue;
      }
      auto canon = *kind == DetailKind::Date ? canonical_date(detail->items[0]) : canonical_time(detail->items[0]);
      if (!canon) {
        check.fail(dpath, *kind == DetailKind::Date ? "invalid date (expected YYYY-MM-DD)"
                                                    : "invalid time (expected HH:MM)");
        good = false;
        continue;
      }
      detail->items[0] = *canon;
    }
    event.details.emplace(*kind, std::move(*detail));
  }
  for (auto required : {DetailKind::Date, DetailKind::Time}) {
    if (!event.details.count(required) && !raw["details"].contains(std::string(to_string(required)))) {
      check.fail(path + "/details/" + std::string(to_string(required)), "missing required detail");
      good = false;
    }
  }
  return good ? std::optional<Event>(std::move(event)) : std::nullopt;
}

}  // namespace

ScenarioDatabase load_scenario(const json& doc) {
  Checker check;
  if (!doc.is_object()) throw ValidationError("", "scenario document must be a JSON object");
  check.unknown_keys(doc, "", {"personal", "events", "case_file", "metadata"});
  for (const char* key : {"personal", "events", "case_file", "metadata"}) {
    if (!doc.contains(key)) check.fail(std::string("/") + key, "missing required field");
  }
  if (!check.ok()) throw ValidationError(check.take());

  ScenarioDatabase db;

  const auto& meta = doc["metadata"];
  if (!meta.is_object()) {
    check.fail("/metadata", "expected an object");
  } else {
    check.unknown_keys(meta, "/metadata", {"id", "title", "source_year", "templates"});
    if (auto id = check.string_field(meta, "/metadata", "id", true)) db.metadata_.id = *id;
    if (auto t = check.string_field(meta, "/metadata", "title", false)) db.metadata_.title = *t;
    if (auto t = check.string_field(meta, "/metadata", "templates", false)) db.metadata_.templates = *t;
    if (meta.contains("source_year")) {
      if (meta["source_year"].is_number_integer()) {
        db.metadata_.source_year = meta["source_year"].get<int>();
      } else {
        check.fail("/metadata/source_year", "expected an integer");
      }
    }
  }

  const auto& personal = doc["personal"];
  if (!personal.is_object()) {
    check.fail("/personal", "expected an object");
  } else {
    for (const auto& [name, value] : personal.items()) {
      if (parse_detail_kind(name)) {
        check.fail("/personal/" + name, "personal detail name clashes with event detail kind");
        continue;
      }
      if (auto d = parse_detail_value(value, "/personal/" + name, check)) {
        db.personal_.entries.emplace(name, std::move(*d));
      }
    }
  }

  const auto& events = doc["events"];
  if (!events.is_array()) {
    check.fail("/events", "expected an array");
  } else if (events.empty()) {
    check.fail("/events", "empty event database");
  } else {
    std::set<std::string> ids;
    const std::string* criminal = nullptr;
    for (std::size_t i = 0; i < events.size(); ++i) {
      const std::string path = "/events/" + std::to_string(i);
      auto event = parse_event(events[i], path, check);
      if (!event) continue;
      if (!ids.insert(event->id).second) {
        check.fail(path + "/id", "duplicate event id '" + event->id + "'");
        continue;
      }
      db.events_.push_back(std::move(*event));
      if (db.events_.back().label == EventLabel::Criminal) {
        if (criminal) {
          check.fail(path + "/label", "at most one Criminal event per scenario (already have '" + *criminal + "')");
        }
        criminal = &*ids.find(db.events_.back().id);
      }
    }
  }

  const auto& cf = doc["case_file"];
  if (!cf.is_object()) {
    check.fail("/case_file", "expected an object");
  } else {
    check.unknown_keys(cf, "/case_file", {"narrative", "known_facts", "evidence"});
    if (auto n = check.string_field(cf, "/case_file", "narrative", true)) db.case_file_.narrative = *n;
    if (cf.contains("evidence")) {
      if (!cf["evidence"].is_array()) {
        check.fail("/case_file/evidence", "expected an array");
      } else {
        for (std::size_t i = 0; i < cf["evidence"].size(); ++i) {
          if (!cf["evidence"][i].is_string()) {
            check.fail("/case_file/evidence/" + std::to_string(i), "expected a string");
          } else {
            db.case_file_.evidence.push_back(cf["evidence"][i].get<std::string>());
          }
        }
      }
    }
    if (cf.contains("known_facts")) {
      if (!cf["known_facts"].is_array()) {
        check.fail("/case_file/known_facts", "expected an array");
      } else {
        for (std::size_t i = 0; i < cf["known_facts"].size(); ++i) {
          const std::string path = "/case_file/known_facts/" + std::to_string(i);
          const auto& raw = cf["known_facts"][i];
          if (!raw.is_object()) {
            check.fail(path, "expected an object");
            continue;
          }
          check.unknown_keys(raw, path, {"event", "detail", "personal"});
          CaseFileRef ref;
          if (raw.contains("personal")) {
            auto name = check.string_field(raw, path, "personal", true);
            if (!name) continue;
            if (raw.contains("event") || raw.contains("detail")) {
              check.fail(path, "a reference names either a personal detail or an event");
              continue;
            }
            if (!db.personal_detail(*name)) {
              check.fail(path + "/personal", "dangling reference to personal detail '" + *name + "'");
              continue;
            }
            ref.personal = *name;
          } else {
            auto id = check.string_field(raw, path, "event", true);
            if (!id) continue;
            const Event* event = db.find_event(*id);
            if (!event) {
              check.fail(path + "/event", "dangling reference to event '" + *id + "'");
              continue;
            }
            ref.event_id = *id;
            if (auto detail = check.string_field(raw, path, "detail", false)) {
              auto kind = parse_detail_kind(*detail);
              if (!kind) {
                check.fail(path + "/detail", "unknown detail kind '" + *detail + "'");
                continue;
              }
              if (!event->detail(*kind)) {
                check.fail(path + "/detail", "dangling reference: event '" + *id + "' has no " + *detail);
                continue;
              }
              ref.kind = kind;
            }
          }
          db.case_file_.known_facts.push_back(std::move(ref));
        }
      }
    }
  }

  if (!check.ok()) throw ValidationError(check.take());
  return db;
}

ScenarioDatabase load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path, "cannot open scenario document");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path, std::string("malformed JSON: ") + e.what());
  }
  return load_scenario(doc);
}

namespace {

json detail_to_json(const DetailValue& d) {
  json value = d.list ? json(d.items) : json(d.items.empty() ? std::string() : d.items.front());
  if (!d.hot) return value;
  return json{{"value", value}, {"hot", true}};
}

}  // namespace

json to_json(const ScenarioDatabase& db) {
  json meta{{"id", db.metadata().id}, {"title", db.metadata().title}};
  if (db.metadata().source_year != 0) meta["source_year"] = db.metadata().source_year;
  if (!db.metadata().templates.empty()) meta["templates"] = db.metadata().templates;

  json personal = json::object();
  for (const auto& [name, d] : db.personal().entries) personal[name] = detail_to_json(d);

  json events = json::array();
  for (const auto& e : db.events()) {
    json details = json::object();
    for (const auto& [kind, d] : e.details) details[std::string(to_string(kind))] = detail_to_json(d);
    json ev{{"id", e.id}, {"label", std::string(to_string(e.label))}, {"truthful", e.truthful}, {"details", details}};
    if (e.hot) ev["hot"] = true;
    if (!e.description.empty()) ev["description"] = e.description;
    events.push_back(std::move(ev));
  }

  json facts = json::array();
  for (const auto& ref : db.case_file().known_facts) {
    if (!ref.personal.empty()) {
      facts.push_back({{"personal", ref.personal}});
    } else if (ref.kind) {
      facts.push_back({{"event", ref.event_id}, {"detail", std::string(to_string(*ref.kind))}});
    } else {
      facts.push_back({{"event", ref.event_id}});
    }
  }
  json case_file{{"narrative", db.case_file().narrative},
                 {"known_facts", facts},
                 {"evidence", db.case_file().evidence}};

  return json{{"metadata", meta}, {"personal", personal}, {"events", events}, {"case_file", case_file}};
}

json case_file_view(const ScenarioDatabase& db) {
  json facts = json::array();
  for (const auto& ref : db.case_file().known_facts) {
    if (!ref.personal.empty()) {
      facts.push_back(ref.personal + ": " + db.personal_detail(ref.personal)->render());
      continue;
    }
    const Event* e = db.find_event(ref.event_id);
    if (ref.kind) {
      facts.push_back(std::string(to_string(*ref.kind)) + ": " + e->detail(*ref.kind)->render());
    } else {
      facts.push_back(e->description.empty() ? "Event on " + e->date() + " at " + e->time() : e->description);
    }
  }
  return json{{"title", db.metadata().title},
              {"narrative", db.case_file().narrative},
              {"known_facts", facts},
              {"evidence", db.case_file().evidence}};
}

}  // namespace vsuspect
