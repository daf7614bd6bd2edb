#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "vsuspect/session.hpp"
#include "vsuspect/transcript.hpp"

namespace vsuspect {

/// Error surfaced to service clients as `{code, message, field?}` with an
/// HTTP status.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, std::string code, std::string message, std::string field = {})
      : std::runtime_error(std::move(message)), status_(status), code_(std::move(code)), field_(std::move(field)) {}

  int status() const noexcept { return status_; }
  const std::string& code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }
  nlohmann::json body() const;

 private:
  int status_;
  std::string code_;
  std::string field_;
};

struct ScenarioEntry {
  std::shared_ptr<const ScenarioDatabase> scenario;
  std::shared_ptr<const TemplateStore> templates;
};

/// Read-only stores shared by every session.
class Catalog {
 public:
  void add_scenario(std::shared_ptr<const ScenarioDatabase> scenario, std::shared_ptr<const TemplateStore> templates);
  void add_profile(PersonalityProfile profile);

  /// Loads `<root>/scenarios/*.json` (templates located through each
  /// scenario's `metadata.templates`) and `<root>/profiles/*.json`.
  static Catalog load_directory(const std::string& root);

  const ScenarioEntry* scenario(const std::string& id) const;
  const PersonalityProfile* profile(const std::string& id) const;
  const std::map<std::string, ScenarioEntry>& scenarios() const noexcept { return scenarios_; }

 private:
  std::map<std::string, ScenarioEntry> scenarios_;
  std::map<std::string, PersonalityProfile> profiles_;
};

/// Loads a scenario and the template document its metadata points to
/// (or `templates_path` when given).
ScenarioEntry load_scenario_bundle(const std::string& scenario_path, const std::string& templates_path = {});

struct CreateSessionRequest {
  std::string scenario;
  std::optional<std::string> profile_id;
  std::optional<nlohmann::json> inline_profile;
  SessionMode mode = SessionMode::Model;
  std::optional<std::uint64_t> seed;

  /// Parses the POST /sessions body.
  static CreateSessionRequest from_json(const nlohmann::json& body);
};

enum class Role { Trainee, Instructor };

/// Session lifecycle and turn handling behind the HTTP endpoints. Every
/// method is safe to call from any thread. Turns on one session run strictly
/// in arrival order; distinct sessions proceed independently.
class SessionService {
 public:
  explicit SessionService(std::shared_ptr<const Catalog> catalog);

  nlohmann::json list_scenarios() const;

  /// Response carries the session id, both tokens, the trainee case file and
  /// an `instructor` block with the seed for replay.
  nlohmann::json create_session(const CreateSessionRequest& request);

  nlohmann::json list_templates(const std::string& session_id, const std::string& token) const;

  /// Runs one turn. Response: `{turn, response}`.
  nlohmann::json submit_statement(const std::string& session_id, const std::string& token,
                                  const std::string& template_id, const FieldValues& values);

  nlohmann::json transcript(const std::string& session_id, const std::string& token, TranscriptView view) const;

  /// Instructor records for turns >= from_turn, in order.
  std::vector<nlohmann::json> state_records(const std::string& session_id, const std::string& token,
                                            std::uint64_t from_turn) const;

  /// Blocks until the session has completed at least `turn` turns or the
  /// timeout elapses. Returns the completed-turn count.
  std::uint64_t wait_for_turn(const std::string& session_id, const std::string& token, std::uint64_t turn,
                              std::chrono::milliseconds timeout) const;

  Role authorize(const std::string& session_id, const std::string& token) const;

 private:
  struct Entry {
    std::string trainee_token;
    std::string instructor_token;
    std::unique_ptr<Session> session;
    mutable std::mutex mutex;
    mutable std::condition_variable changed;
  };

  std::shared_ptr<Entry> find(const std::string& session_id) const;
  std::string random_token();

  std::shared_ptr<const Catalog> catalog_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mutex rng_mutex_;
  std::mt19937_64 token_rng_;
};

}  // namespace vsuspect
