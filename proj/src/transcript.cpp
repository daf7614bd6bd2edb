#include "vsuspect/transcript.hpp"

#include <ctime>
#include <fstream>

#include "vsuspect/errors.hpp"

namespace vsuspect {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "vsuspect.transcript/1";

json optional_string(const std::optional<std::string>& value) {
  return value ? json(*value) : json(nullptr);
}

std::string iso_timestamp(std::chrono::system_clock::time_point tp) {
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(tp.time_since_epoch()).count();
  const std::time_t secs = static_cast<std::time_t>(ms / 1000);
  std::tm utc{};
  gmtime_r(&secs, &utc);
  char buf[80];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", utc.tm_year + 1900, utc.tm_mon + 1,
                utc.tm_mday, utc.tm_hour, utc.tm_min, utc.tm_sec, static_cast<int>(ms % 1000));
  return buf;
}

}  // namespace

std::optional<TranscriptView> parse_transcript_view(std::string_view text) {
  if (text == "trainee") return TranscriptView::Trainee;
  if (text == "instructor") return TranscriptView::Instructor;
  return std::nullopt;
}

json turn_json(const TurnRecord& r, TranscriptView view) {
  if (view == TranscriptView::Trainee) {
    return json{{"turn", r.turn}, {"statement", r.statement.text}, {"response", r.response}};
  }
  return json{{"turn", r.turn},
              {"statement", {{"template", r.statement.template_id}, {"fields", r.statement.values},
                             {"text", r.statement.text}}},
              {"response", r.response},
              {"kind", std::string(to_string(r.kind))},
              {"event", optional_string(r.event_id)},
              {"hot", r.hot},
              {"state", r.state_after},
              {"integrity", r.integrity.counts},
              {"context", std::string(to_string(r.context))},
              {"distribution",
               {{"truthful", r.distribution.truthful}, {"false", r.distribution.deceptive},
                {"neutral", r.distribution.neutral}}},
              {"candidates", r.candidate_count},
              {"subset", r.subset ? json(std::string(to_string(*r.subset))) : json(nullptr)},
              {"response_template", optional_string(r.response_template)},
              {"response_event", optional_string(r.response_event)},
              {"notes", r.notes},
              {"fault", optional_string(r.fault)}};
}

json instructor_record(const TurnRecord& record) {
  json out = turn_json(record, TranscriptView::Instructor);
  out["timestamp"] = iso_timestamp(record.timestamp);
  return out;
}

json export_transcript(const Session& session, TranscriptView view) {
  json turns = json::array();
  for (const auto& r : session.transcript()) turns.push_back(turn_json(r, view));
  if (view == TranscriptView::Trainee) {
    return json{{"format", kFormat}, {"view", "trainee"}, {"turns", turns}};
  }
  json header{{"scenario", session.scenario().metadata().id},
              {"mode", std::string(to_string(session.mode()))},
              {"rng", std::string(SessionRng::kAlgorithm)},
              {"seed", session.rng().seed()},
              {"engine_version", std::string(kEngineVersion)},
              {"profile", to_json(session.profile())}};
  return json{{"format", kFormat}, {"view", "instructor"}, {"session", header}, {"turns", turns}};
}

std::vector<ScriptStep> load_script(const json& doc) {
  std::vector<Diagnostic> diag;
  if (!doc.is_object() || !doc.contains("steps") || !doc["steps"].is_array()) {
    throw ValidationError("/steps", "script must be an object with a \"steps\" array");
  }
  for (const auto& [key, _] : doc.items()) {
    if (key != "steps" && key != "description") diag.push_back({"/" + key, "unknown field '" + key + "'"});
  }
  std::vector<ScriptStep> steps;
  for (std::size_t i = 0; i < doc["steps"].size(); ++i) {
    const std::string path = "/steps/" + std::to_string(i);
    const auto& raw = doc["steps"][i];
    if (!raw.is_object() || !raw.contains("template") || !raw["template"].is_string()) {
      diag.push_back({path + "/template", "expected a template id"});
      continue;
    }
    ScriptStep step{raw["template"].get<std::string>(), {}};
    if (raw.contains("fields")) {
      if (!raw["fields"].is_object()) {
        diag.push_back({path + "/fields", "expected an object of field values"});
        continue;
      }
      for (const auto& [name, value] : raw["fields"].items()) {
        if (!value.is_string()) {
          diag.push_back({path + "/fields/" + name, "expected a string"});
          continue;
        }
        step.values[name] = value.get<std::string>();
      }
    }
    steps.push_back(std::move(step));
  }
  if (!diag.empty()) throw ValidationError(std::move(diag));
  return steps;
}

std::string dump_document(const json& document) { return document.dump(2) + "\n"; }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path, "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path, std::string("malformed JSON: ") + e.what());
  }
}

std::vector<ScriptStep> load_script_file(const std::string& path) { return load_script(read_json_file(path)); }

ReplayVerdict replay_transcript(const json& transcript, std::shared_ptr<const ScenarioDatabase> scenario,
                                std::shared_ptr<const TemplateStore> templates) {
  ReplayVerdict verdict;
  if (!transcript.is_object() || transcript.value("format", "") != kFormat ||
      transcript.value("view", "") != "instructor" || !transcript.contains("session") ||
      !transcript.contains("turns") || !transcript["turns"].is_array()) {
    verdict.detail = "not an instructor transcript";
    return verdict;
  }
  const auto& header = transcript["session"];
  if (header.value("rng", "") != SessionRng::kAlgorithm) {
    verdict.detail = "unsupported RNG algorithm '" + header.value("rng", "") + "'";
    return verdict;
  }
  if (header.value("scenario", "") != scenario->metadata().id) {
    verdict.detail = "transcript was recorded on scenario '" + header.value("scenario", "") + "', not '" +
                     scenario->metadata().id + "'";
    return verdict;
  }
  const auto mode = parse_session_mode(header.value("mode", ""));
  if (!mode || !header.contains("seed") || !header["seed"].is_number_unsigned() || !header.contains("profile")) {
    verdict.detail = "session header lacks mode, seed or profile";
    return verdict;
  }

  Session session("replay", std::move(scenario), std::move(templates), load_profile(header["profile"]), *mode,
                  header["seed"].get<std::uint64_t>());
  const auto& turns = transcript["turns"];
  for (std::size_t i = 0; i < turns.size(); ++i) {
    const auto& recorded = turns[i];
    const auto index = static_cast<std::uint64_t>(i + 1);
    const auto& st = recorded.contains("statement") ? recorded["statement"] : json();
    if (!st.is_object() || !st.contains("template") || !st.contains("fields")) {
      verdict.divergent_turn = index;
      verdict.detail = "turn " + std::to_string(index) + ": statement missing";
      return verdict;
    }
    FieldValues values;
    try {
      values = st["fields"].get<FieldValues>();
      const auto& rec = session.step(st["template"].get<std::string>(), values);
      const json recomputed = turn_json(rec, TranscriptView::Instructor);
      if (recomputed != recorded) {
        verdict.divergent_turn = index;
        std::string fields;
        for (const auto& [key, value] : recomputed.items()) {
          if (!recorded.contains(key) || recorded[key] != value) fields += (fields.empty() ? "" : ", ") + key;
        }
        for (const auto& [key, _] : recorded.items()) {
          if (!recomputed.contains(key)) fields += (fields.empty() ? "" : ", ") + key;
        }
        verdict.detail = "turn " + std::to_string(index) + ": divergence in " + fields;
        return verdict;
      }
    } catch (const std::exception& e) {
      verdict.divergent_turn = index;
      verdict.detail = "turn " + std::to_string(index) + ": " + e.what();
      return verdict;
    }
  }
  verdict.verified = true;
  verdict.detail = "verified " + std::to_string(turns.size()) + " turns";
  return verdict;
}

}  // namespace vsuspect
