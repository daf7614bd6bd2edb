#include "vsuspect/service.hpp"

#include <algorithm>
#include <filesystem>
#include <random>

#include "vsuspect/errors.hpp"

namespace vsuspect {

using nlohmann::json;
namespace fs = std::filesystem;

json ApiError::body() const {
  json out{{"code", code_}, {"message", what()}};
  if (!field_.empty()) out["field"] = field_;
  return out;
}

void Catalog::add_scenario(std::shared_ptr<const ScenarioDatabase> scenario,
                           std::shared_ptr<const TemplateStore> templates) {
  const std::string id = scenario->metadata().id;
  scenarios_[id] = ScenarioEntry{std::move(scenario), std::move(templates)};
}

void Catalog::add_profile(PersonalityProfile profile) {
  const std::string id = profile.id;
  profiles_[id] = std::move(profile);
}

const ScenarioEntry* Catalog::scenario(const std::string& id) const {
  auto it = scenarios_.find(id);
  return it == scenarios_.end() ? nullptr : &it->second;
}

const PersonalityProfile* Catalog::profile(const std::string& id) const {
  auto it = profiles_.find(id);
  return it == profiles_.end() ? nullptr : &it->second;
}

ScenarioEntry load_scenario_bundle(const std::string& scenario_path, const std::string& templates_path) {
  auto scenario = std::make_shared<const ScenarioDatabase>(load_scenario_file(scenario_path));
  std::string tpath = templates_path;
  if (tpath.empty()) {
    if (scenario->metadata().templates.empty()) {
      throw ValidationError(scenario_path + "#/metadata/templates", "no template document given");
    }
    tpath = (fs::path(scenario_path).parent_path() / scenario->metadata().templates).string();
  }
  auto templates = std::make_shared<const TemplateStore>(load_templates_file(tpath));
  return {std::move(scenario), std::move(templates)};
}

Catalog Catalog::load_directory(const std::string& root) {
  Catalog catalog;
  auto sorted_json = [](const fs::path& dir) {
    std::vector<fs::path> files;
    if (fs::is_directory(dir)) {
      for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    return files;
  };
  for (const auto& path : sorted_json(fs::path(root) / "scenarios")) {
    auto bundle = load_scenario_bundle(path.string());
    catalog.add_scenario(std::move(bundle.scenario), std::move(bundle.templates));
  }
  for (const auto& path : sorted_json(fs::path(root) / "profiles")) {
    catalog.add_profile(load_profile_file(path.string()));
  }
  return catalog;
}

CreateSessionRequest CreateSessionRequest::from_json(const json& body) {
  if (!body.is_object()) throw ApiError(400, "bad_request", "request body must be a JSON object");
  CreateSessionRequest req;
  if (!body.contains("scenario") || !body["scenario"].is_string()) {
    throw ApiError(400, "bad_request", "missing scenario id", "scenario");
  }
  req.scenario = body["scenario"].get<std::string>();
  if (body.contains("profile")) {
    if (body["profile"].is_string()) {
      req.profile_id = body["profile"].get<std::string>();
    } else if (body["profile"].is_object()) {
      req.inline_profile = body["profile"];
    } else {
      throw ApiError(400, "bad_request", "profile must be an id or a profile object", "profile");
    }
  }
  if (body.contains("mode")) {
    auto mode = body["mode"].is_string() ? parse_session_mode(body["mode"].get<std::string>()) : std::nullopt;
    if (!mode) throw ApiError(400, "bad_request", "mode must be 'model' or 'random'", "mode");
    req.mode = *mode;
  }
  if (body.contains("seed") && !body["seed"].is_null()) {
    if (!body["seed"].is_number_unsigned()) {
      throw ApiError(400, "bad_request", "seed must be a non-negative integer", "seed");
    }
    req.seed = body["seed"].get<std::uint64_t>();
  }
  return req;
}

SessionService::SessionService(std::shared_ptr<const Catalog> catalog)
    : catalog_(std::move(catalog)), token_rng_(std::random_device{}()) {}

std::string SessionService::random_token() {
  std::lock_guard lock(rng_mutex_);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string token;
  for (int i = 0; i < 2; ++i) {
    auto word = token_rng_();
    for (int j = 0; j < 16; ++j, word >>= 4) token.push_back(kHex[word & 0xF]);
  }
  return token;
}

json SessionService::list_scenarios() const {
  json out = json::array();
  for (const auto& [id, entry] : catalog_->scenarios()) {
    out.push_back({{"id", id}, {"title", entry.scenario->metadata().title}});
  }
  return json{{"scenarios", out}};
}

json SessionService::create_session(const CreateSessionRequest& request) {
  const ScenarioEntry* entry = catalog_->scenario(request.scenario);
  if (!entry) throw ApiError(404, "not_found", "unknown scenario '" + request.scenario + "'", "scenario");

  PersonalityProfile profile;
  if (request.inline_profile) {
    try {
      profile = load_profile(*request.inline_profile);
    } catch (const ValidationError& e) {
      throw ApiError(400, "invalid_profile", e.what(), "profile");
    }
  } else {
    const std::string id = request.profile_id.value_or("experiment");
    const PersonalityProfile* p = catalog_->profile(id);
    if (!p) throw ApiError(404, "not_found", "unknown profile '" + id + "'", "profile");
    profile = *p;
  }

  std::uint64_t seed = 0;
  if (request.seed) {
    seed = *request.seed;
  } else {
    std::lock_guard lock(rng_mutex_);
    seed = token_rng_();
  }

  auto e = std::make_shared<Entry>();
  const std::string id = random_token().substr(0, 16);
  e->trainee_token = random_token();
  e->instructor_token = random_token();
  e->session = std::make_unique<Session>(id, entry->scenario, entry->templates, std::move(profile), request.mode, seed);

  json response{{"session_id", id},
                {"trainee_token", e->trainee_token},
                {"instructor_token", e->instructor_token},
                {"case_file", case_file_view(*entry->scenario)},
                {"instructor", {{"seed", seed}, {"mode", std::string(to_string(request.mode))},
                                {"profile", e->session->profile().id}}}};
  std::unique_lock lock(sessions_mutex_);
  sessions_[id] = std::move(e);
  return response;
}

std::shared_ptr<SessionService::Entry> SessionService::find(const std::string& session_id) const {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw ApiError(404, "not_found", "unknown session '" + session_id + "'");
  return it->second;
}

Role SessionService::authorize(const std::string& session_id, const std::string& token) const {
  auto e = find(session_id);
  if (!token.empty() && token == e->instructor_token) return Role::Instructor;
  if (!token.empty() && token == e->trainee_token) return Role::Trainee;
  throw ApiError(401, "unauthorized", "missing or invalid session token");
}

json SessionService::list_templates(const std::string& session_id, const std::string& token) const {
  authorize(session_id, token);
  auto e = find(session_id);
  return template_catalog_view(e->session->templates());
}

json SessionService::submit_statement(const std::string& session_id, const std::string& token,
                                      const std::string& template_id, const FieldValues& values) {
  authorize(session_id, token);
  auto e = find(session_id);
  // The per-session lock is the mailbox: turns run one at a time in the
  // order callers acquire it.
  std::unique_lock lock(e->mutex);
  try {
    const auto& rec = e->session->step(template_id, values);
    json out{{"turn", rec.turn}, {"response", rec.response}};
    e->changed.notify_all();
    return out;
  } catch (const EngineError& err) {
    const int status = err.code() == "unknown_template" ? 404 : 400;
    throw ApiError(status, err.code(), err.what(), err.field());
  }
}

json SessionService::transcript(const std::string& session_id, const std::string& token, TranscriptView view) const {
  const Role role = authorize(session_id, token);
  if (view == TranscriptView::Instructor && role != Role::Instructor) {
    throw ApiError(403, "forbidden", "instructor token required for the instructor view");
  }
  auto e = find(session_id);
  std::lock_guard lock(e->mutex);
  return export_transcript(*e->session, view);
}

std::vector<json> SessionService::state_records(const std::string& session_id, const std::string& token,
                                                std::uint64_t from_turn) const {
  if (authorize(session_id, token) != Role::Instructor) {
    throw ApiError(403, "forbidden", "instructor token required for the state stream");
  }
  auto e = find(session_id);
  std::lock_guard lock(e->mutex);
  std::vector<json> out;
  for (const auto& rec : e->session->transcript()) {
    if (rec.turn >= from_turn) out.push_back(instructor_record(rec));
  }
  return out;
}

std::uint64_t SessionService::wait_for_turn(const std::string& session_id, const std::string& token,
                                            std::uint64_t turn, std::chrono::milliseconds timeout) const {
  if (authorize(session_id, token) != Role::Instructor) {
    throw ApiError(403, "forbidden", "instructor token required for the state stream");
  }
  auto e = find(session_id);
  std::unique_lock lock(e->mutex);
  e->changed.wait_for(lock, timeout, [&] { return e->session->transcript().size() >= turn; });
  return e->session->transcript().size();
}

}  // namespace vsuspect
