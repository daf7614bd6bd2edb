#include "vsuspect/policy.hpp"

#include <algorithm>
#include <cmath>

#include "vsuspect/errors.hpp"

namespace vsuspect {

using nlohmann::json;

std::string_view to_string(SubsetKind kind) {
  switch (kind) {
    case SubsetKind::Truthful: return "truthful";
    case SubsetKind::False: return "false";
    case SubsetKind::Neutral: return "neutral";
  }
  return "neutral";
}

std::string_view to_string(ContextClass ctx) {
  switch (ctx) {
    case ContextClass::CriminalRelated: return "criminal-related";
    case ContextClass::HotNonCriminal: return "hot-non-criminal";
    case ContextClass::ColdOther: return "cold-other";
  }
  return "cold-other";
}

std::optional<SubsetKind> parse_subset_kind(std::string_view text) {
  for (auto k : {SubsetKind::Truthful, SubsetKind::False, SubsetKind::Neutral}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::optional<ContextClass> parse_context_class(std::string_view text) {
  for (auto c : {ContextClass::CriminalRelated, ContextClass::HotNonCriminal, ContextClass::ColdOther}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

const std::vector<PopulatedResponse>& CandidatePartition::subset(SubsetKind kind) const {
  switch (kind) {
    case SubsetKind::Truthful: return truthful;
    case SubsetKind::False: return deceptive;
    case SubsetKind::Neutral: return neutral;
  }
  return neutral;
}

double ResponseDistribution::operator[](SubsetKind kind) const noexcept {
  switch (kind) {
    case SubsetKind::Truthful: return truthful;
    case SubsetKind::False: return deceptive;
    case SubsetKind::Neutral: return neutral;
  }
  return 0.0;
}

bool ResponseDistribution::valid(double tolerance) const noexcept {
  for (double p : {truthful, deceptive, neutral}) {
    if (!(p >= 0.0 && p <= 1.0)) return false;
  }
  return std::abs(truthful + deceptive + neutral - 1.0) <= tolerance;
}

double integrity_score(const MentalIntegrity& mi) {
  return static_cast<double>(2 * mi.green() + mi.orange()) / 6.0;
}

PolicyTable PolicyTable::defaults() {
  PolicyTable p;
  p.rule(ContextClass::CriminalRelated) = {{0.0, 1.0, 0.0}, {0.5, 0.1, 0.4}};
  p.rule(ContextClass::HotNonCriminal) = {{0.3, 0.0, 0.7}, {0.3, 0.0, 0.7}};
  p.rule(ContextClass::ColdOther) = {{0.9, 0.0, 0.1}, {0.9, 0.0, 0.1}};
  return p;
}

void PolicyTable::set_override(ContextClass ctx, const MentalIntegrity& mi, const ResponseDistribution& dist) {
  overrides_[{ctx, mi}] = dist;
}

ResponseDistribution PolicyTable::distribution(const MentalIntegrity& mi, ContextClass ctx) const {
  if (auto it = overrides_.find({ctx, mi}); it != overrides_.end()) return it->second;
  const auto& r = rule(ctx);
  if (r.stable == r.compromised) return r.stable;
  const double g = integrity_score(mi);
  // At g == 1 and g == 0 this yields the stored endpoints bit-exactly.
  return {g * r.stable.truthful + (1.0 - g) * r.compromised.truthful,
          g * r.stable.deceptive + (1.0 - g) * r.compromised.deceptive,
          g * r.stable.neutral + (1.0 - g) * r.compromised.neutral};
}

CandidatePartition partition(std::span<const PopulatedResponse> candidates, const ScenarioDatabase& db) {
  CandidatePartition part;
  for (const auto& c : candidates) {
    switch (c.binding) {
      case ResponseBinding::Generic:
        part.neutral.push_back(c);
        break;
      case ResponseBinding::Personal:
        part.truthful.push_back(c);
        break;
      case ResponseBinding::Event: {
        const Event* e = c.event_id ? db.find_event(*c.event_id) : nullptr;
        if (!e) {
          throw EngineError("unknown_event", "response '" + c.template_id + "' is bound to unknown event '" +
                                                 c.event_id.value_or("") + "'");
        }
        (e->truthful ? part.truthful : part.deceptive).push_back(c);
        break;
      }
    }
  }
  return part;
}

bool touches_criminal_event(const StatementInstance& statement, const Event* resolved_event,
                            const ScenarioDatabase& db) {
  const Event* criminal = db.criminal_event();
  if (!criminal) return false;
  if (resolved_event && resolved_event->id == criminal->id) return true;
  for (const auto& [name, value] : statement.values) {
    for (const auto& [kind, detail] : criminal->details) {
      if (detail.matches(value)) return true;
    }
  }
  return false;
}

ContextClass context_class(const StatementInstance& statement, const Event* resolved_event, int hot,
                           const ScenarioDatabase& db) {
  if (touches_criminal_event(statement, resolved_event, db)) return ContextClass::CriminalRelated;
  return hot ? ContextClass::HotNonCriminal : ContextClass::ColdOther;
}

ResponseDistribution effective_distribution(const CandidatePartition& part, const ResponseDistribution& dist) {
  std::array<double, 3> p{};
  std::size_t non_empty = 0;
  double mass = 0.0;
  for (auto k : {SubsetKind::Truthful, SubsetKind::False, SubsetKind::Neutral}) {
    const auto i = static_cast<std::size_t>(k);
    if (part.subset(k).empty()) continue;
    ++non_empty;
    p[i] = dist[k];
    mass += p[i];
  }
  if (non_empty == 0) throw EngineError("no_response", "no response available: every candidate subset is empty");
  if (non_empty == 3) return dist;
  if (mass > 0.0) {
    for (auto& v : p) v /= mass;
  } else {
    for (auto k : {SubsetKind::Truthful, SubsetKind::False, SubsetKind::Neutral}) {
      if (!part.subset(k).empty()) p[static_cast<std::size_t>(k)] = 1.0 / static_cast<double>(non_empty);
    }
  }
  return {p[0], p[1], p[2]};
}

Selection select_response(const CandidatePartition& part, const ResponseDistribution& dist, SessionRng& rng) {
  const auto eff = effective_distribution(part, dist);
  const double u = rng.uniform01();
  std::optional<SubsetKind> chosen;
  std::optional<SubsetKind> last_possible;
  double cumulative = 0.0;
  for (auto k : {SubsetKind::Truthful, SubsetKind::False, SubsetKind::Neutral}) {
    if (eff[k] <= 0.0) continue;
    last_possible = k;
    cumulative += eff[k];
    if (!chosen && u < cumulative) chosen = k;
  }
  // Rounding can leave the cumulative sum a hair below 1.
  const SubsetKind kind = chosen.value_or(*last_possible);
  const auto& subset = part.subset(kind);
  return {kind, &subset[rng.uniform_index(subset.size())]};
}

std::size_t random_baseline(std::span<const PopulatedResponse> candidates, SessionRng& rng) {
  if (candidates.empty()) throw EngineError("no_response", "no response available: candidate set is empty");
  return rng.uniform_index(candidates.size());
}

// ---------------------------------------------------------------------------

namespace {

json dist_json(const ResponseDistribution& d) {
  return json{{"truthful", d.truthful}, {"false", d.deceptive}, {"neutral", d.neutral}};
}

std::optional<ResponseDistribution> parse_dist(const json& raw, const std::string& path,
                                               std::vector<Diagnostic>& diag) {
  if (!raw.is_object()) {
    diag.push_back({path, "expected an object with truthful, false, neutral"});
    return std::nullopt;
  }
  ResponseDistribution d;
  for (const auto& [key, value] : raw.items()) {
    double* slot = key == "truthful" ? &d.truthful : key == "false" ? &d.deceptive : key == "neutral" ? &d.neutral
                                                                                                       : nullptr;
    if (!slot) {
      diag.push_back({path + "/" + key, "unknown field '" + key + "'"});
      return std::nullopt;
    }
    if (!value.is_number()) {
      diag.push_back({path + "/" + key, "expected a number"});
      return std::nullopt;
    }
    *slot = value.get<double>();
  }
  if (!d.valid()) {
    diag.push_back({path, "probabilities must lie in [0,1] and sum to 1"});
    return std::nullopt;
  }
  return d;
}

}  // namespace

json to_json(const PolicyTable& policy) {
  json out = json::object();
  for (auto c : {ContextClass::CriminalRelated, ContextClass::HotNonCriminal, ContextClass::ColdOther}) {
    out[std::string(to_string(c))] = {{"stable", dist_json(policy.rule(c).stable)},
                                      {"compromised", dist_json(policy.rule(c).compromised)}};
  }
  json overrides = json::array();
  for (const auto& [key, dist] : policy.overrides()) {
    overrides.push_back({{"context", std::string(to_string(key.first))},
                         {"integrity", key.second.counts},
                         {"distribution", dist_json(dist)}});
  }
  out["overrides"] = overrides;
  return out;
}

PolicyTable load_policy(const json& doc, const std::string& path) {
  std::vector<Diagnostic> diag;
  PolicyTable policy = PolicyTable::defaults();
  if (!doc.is_object()) throw ValidationError(path, "expected an object");
  for (const auto& [key, value] : doc.items()) {
    const std::string kpath = path + "/" + key;
    if (key == "overrides") {
      if (!value.is_array()) {
        diag.push_back({kpath, "expected an array"});
        continue;
      }
      for (std::size_t i = 0; i < value.size(); ++i) {
        const std::string opath = kpath + "/" + std::to_string(i);
        const auto& o = value[i];
        if (!o.is_object() || !o.contains("context") || !o.contains("integrity") || !o.contains("distribution")) {
          diag.push_back({opath, "expected {context, integrity, distribution}"});
          continue;
        }
        auto ctx = o["context"].is_string() ? parse_context_class(o["context"].get<std::string>()) : std::nullopt;
        if (!ctx) {
          diag.push_back({opath + "/context", "unknown context class"});
          continue;
        }
        const auto& mi_raw = o["integrity"];
        MentalIntegrity mi;
        bool mi_ok = mi_raw.is_array() && mi_raw.size() == 3;
        for (std::size_t j = 0; mi_ok && j < 3; ++j) {
          mi_ok = mi_raw[j].is_number_integer() && mi_raw[j].get<int>() >= 0;
          if (mi_ok) mi.counts[j] = mi_raw[j].get<int>();
        }
        if (!mi_ok || mi.green() + mi.orange() + mi.red() != 3) {
          diag.push_back({opath + "/integrity", "expected three non-negative counts summing to 3"});
          continue;
        }
        if (auto d = parse_dist(o["distribution"], opath + "/distribution", diag)) policy.set_override(*ctx, mi, *d);
      }
      continue;
    }
    auto ctx = parse_context_class(key);
    if (!ctx) {
      diag.push_back({kpath, "unknown context class '" + key + "'"});
      continue;
    }
    if (!value.is_object()) {
      diag.push_back({kpath, "expected {stable, compromised}"});
      continue;
    }
    for (const auto& [end, raw] : value.items()) {
      if (end != "stable" && end != "compromised") {
        diag.push_back({kpath + "/" + end, "unknown field '" + end + "'"});
        continue;
      }
      if (auto d = parse_dist(raw, kpath + "/" + end, diag)) {
        (end == "stable" ? policy.rule(*ctx).stable : policy.rule(*ctx).compromised) = *d;
      }
    }
  }
  if (!diag.empty()) throw ValidationError(std::move(diag));
  return policy;
}

}  // namespace vsuspect
