#include "vsuspect/session.hpp"

#include <algorithm>
#include <set>

#include "vsuspect/errors.hpp"

namespace vsuspect {

std::string_view to_string(StatementKind kind) {
  switch (kind) {
    case StatementKind::NewEvent: return "new-event";
    case StatementKind::FollowUp: return "follow-up";
    case StatementKind::Generic: return "generic";
  }
  return "generic";
}

std::string_view to_string(SessionMode mode) {
  return mode == SessionMode::Model ? "model" : "random";
}

std::optional<SessionMode> parse_session_mode(std::string_view text) {
  if (text == "model") return SessionMode::Model;
  if (text == "random" || text == "random-baseline") return SessionMode::RandomBaseline;
  return std::nullopt;
}

EventFilter statement_filter(const StatementTemplate& tmpl, const StatementInstance& statement) {
  EventFilter filter;
  for (const auto& field : tmpl.fields) {
    const auto kind = parse_detail_kind(field.kind);
    if (!kind) continue;
    auto it = statement.values.find(field.name);
    if (it != statement.values.end()) filter.where(*kind, it->second);
  }
  return filter;
}

StatementKind classify_statement(const StatementTemplate& tmpl, const StatementInstance& statement,
                                 std::span<const ResponseTemplate* const> responses, const ShortTermMemory& memory,
                                 const ClassificationRules& rules, std::vector<std::string>* notes) {
  const EventFilter filter = statement_filter(tmpl, statement);
  std::set<DetailKind> present;
  for (const auto& [kind, _] : filter.constraints()) present.insert(kind);

  for (const auto& identifying : rules.identifying) {
    const bool covered = !identifying.empty() && std::all_of(identifying.begin(), identifying.end(),
                                                             [&](DetailKind k) { return present.count(k) > 0; });
    if (covered) return StatementKind::NewEvent;
  }

  const bool about_event =
      !present.empty() || std::any_of(responses.begin(), responses.end(), [](const ResponseTemplate* r) {
        return r->binding == ResponseBinding::Event;
      });
  if (!about_event) return StatementKind::Generic;
  if (memory.current_event) return StatementKind::FollowUp;
  if (notes) notes->push_back("follow-up without a current event; treated as generic");
  return StatementKind::Generic;
}

ShortTermMemory resolve_memory(StatementKind kind, const StatementTemplate& tmpl, const StatementInstance& statement,
                               const ScenarioDatabase& db, const ShortTermMemory& memory,
                               std::vector<std::string>* notes) {
  if (kind != StatementKind::NewEvent) return memory;
  const auto filter = statement_filter(tmpl, statement);
  ShortTermMemory next;
  for (const auto& [k, value] : filter.constraints()) next.last_resolved[std::string(to_string(k))] = value;
  const auto matches = db.query_events(filter);
  if (matches.empty()) {
    if (notes) notes->push_back("no memory of such an event");
  } else {
    next.current_event = matches.front()->id;
  }
  return next;
}

namespace {

std::optional<PopulatedResponse> fill(const ResponseTemplate& tmpl, const ScenarioDatabase& db, const Event* event,
                                      std::vector<std::string>* notes) {
  PopulatedResponse out;
  out.template_id = tmpl.id;
  out.binding = tmpl.binding;
  if (event) out.event_id = event->id;
  FieldValues values;
  for (const auto& field : tmpl.fields) {
    ResolvedField resolved{field.name, field.kind, {}, std::nullopt};
    if (const auto kind = parse_detail_kind(field.kind)) {
      const DetailValue* d = event ? event->detail(*kind) : nullptr;
      if (!d) {
        if (notes) {
          notes->push_back("dropped '" + tmpl.id + "': " + (event ? "event '" + event->id + "'" : "no event") +
                           " has no " + field.kind);
        }
        return std::nullopt;
      }
      resolved.value = d->render();
      resolved.source = EventDetailRef{event->id, *kind};
    } else {
      const DetailValue* d = db.personal_detail(field.kind);
      if (!d) {
        if (notes) notes->push_back("dropped '" + tmpl.id + "': no personal detail '" + field.kind + "'");
        return std::nullopt;
      }
      resolved.value = d->render();
      resolved.source = PersonalRef{field.kind};
    }
    values[field.name] = resolved.value;
    out.fields.push_back(std::move(resolved));
  }
  out.text = render_text(tmpl.text, values);
  return out;
}

}  // namespace

std::vector<PopulatedResponse> populate_candidates(std::span<const ResponseTemplate* const> responses,
                                                   const StatementTemplate& tmpl,
                                                   const StatementInstance& statement, const ScenarioDatabase& db,
                                                   const Event* active_event, bool criminal_context,
                                                   std::vector<std::string>* notes) {
  std::vector<const Event*> sources;
  if (active_event) sources.push_back(active_event);
  if (criminal_context) {
    const auto filter = statement_filter(tmpl, statement);
    for (const auto& e : db.events()) {
      if (e.label != EventLabel::Alibi && e.label != EventLabel::LegalAccess) continue;
      if (!filter.matches(e)) continue;
      if (std::find(sources.begin(), sources.end(), &e) == sources.end()) sources.push_back(&e);
    }
  }

  std::vector<PopulatedResponse> out;
  for (const ResponseTemplate* r : responses) {
    switch (r->binding) {
      case ResponseBinding::Generic:
        out.push_back({r->id, r->binding, std::nullopt, r->text, {}});
        break;
      case ResponseBinding::Personal:
        if (auto p = fill(*r, db, nullptr, notes)) out.push_back(std::move(*p));
        break;
      case ResponseBinding::Event:
        if (sources.empty()) {
          if (notes) notes->push_back("dropped '" + r->id + "': no event in memory");
          break;
        }
        for (const Event* e : sources) {
          if (auto p = fill(*r, db, e, notes)) out.push_back(std::move(*p));
        }
        break;
    }
  }
  return out;
}

Session::Session(std::string id, std::shared_ptr<const ScenarioDatabase> scenario,
                 std::shared_ptr<const TemplateStore> templates, PersonalityProfile profile, SessionMode mode,
                 std::uint64_t seed, Clock clock)
    : id_(std::move(id)),
      scenario_(std::move(scenario)),
      templates_(std::move(templates)),
      profile_(std::move(profile)),
      mode_(mode),
      state_{profile_.s0, 0},
      rng_(seed),
      clock_(clock ? std::move(clock) : Clock([] { return std::chrono::system_clock::now(); })) {}

const TurnRecord& Session::step(std::string_view template_id, const FieldValues& values) {
  const StatementTemplate* tmpl = templates_->find_statement(template_id);
  if (!tmpl) {
    throw EngineError("unknown_template", "unknown statement template '" + std::string(template_id) + "'",
                      "template");
  }
  return step(instantiate_statement(*tmpl, values));
}

const TurnRecord& Session::step(const StatementInstance& input) {
  const ScenarioDatabase& db = *scenario_;
  const StatementTemplate* tmpl = templates_->find_statement(input.template_id);
  if (!tmpl) {
    throw EngineError("unknown_template", "unknown statement template '" + input.template_id + "'", "template");
  }
  // Re-instantiating validates the values and pins the rendered text.
  const StatementInstance statement = instantiate_statement(*tmpl, input.values);

  TurnRecord rec;
  rec.statement = statement;
  rec.timestamp = clock_();

  const auto responses = templates_->associated_responses(tmpl->id);
  rec.kind = classify_statement(*tmpl, statement, responses, memory_, rules_, &rec.notes);
  ShortTermMemory memory = resolve_memory(rec.kind, *tmpl, statement, db, memory_, &rec.notes);

  const Event* active = nullptr;
  if (rec.kind != StatementKind::Generic && memory.current_event) active = db.find_event(*memory.current_event);
  if (active) rec.event_id = active->id;

  const bool criminal = touches_criminal_event(statement, active, db);
  const auto candidates = populate_candidates(responses, *tmpl, statement, db, active, criminal, &rec.notes);
  rec.candidate_count = candidates.size();

  const auto own_fields = statement_fields(*tmpl, statement);
  rec.hot = hot_indicator(own_fields, candidates, scenario_hot_lookup(db));

  rec.state_before = state_.s;
  InternalState next = update_state(state_, profile_.sigma, tmpl->w_hot, tmpl->w_cold, rec.hot);
  rec.state_after = next.s;
  rec.turn = next.turn;
  rec.integrity = mental_integrity(next.s, profile_.sections);
  rec.context = criminal ? ContextClass::CriminalRelated
                         : (rec.hot ? ContextClass::HotNonCriminal : ContextClass::ColdOther);
  rec.distribution = profile_.policy.distribution(rec.integrity, rec.context);

  if (candidates.empty()) {
    rec.fault = "no response available";
  } else {
    const auto part = partition(candidates, db);
    const PopulatedResponse* chosen = nullptr;
    if (mode_ == SessionMode::Model) {
      const auto sel = select_response(part, rec.distribution, rng_);
      rec.subset = sel.subset;
      chosen = sel.response;
    } else {
      chosen = &candidates[random_baseline(candidates, rng_)];
      const auto single = partition(std::span(chosen, 1), db);
      rec.subset = !single.truthful.empty() ? SubsetKind::Truthful
                   : !single.deceptive.empty() ? SubsetKind::False
                                               : SubsetKind::Neutral;
    }
    rec.response_template = chosen->template_id;
    rec.response_event = chosen->event_id;
    rec.response = chosen->text;
  }

  state_ = next;
  memory_ = std::move(memory);
  transcript_.push_back(std::move(rec));
  return transcript_.back();
}

}  // namespace vsuspect
