#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vsuspect/session.hpp"

namespace vsuspect {

enum class TranscriptView { Trainee, Instructor };

std::optional<TranscriptView> parse_transcript_view(std::string_view text);

/// Transcript document. The trainee view holds only statement and response
/// text; the instructor view adds the hidden state of every turn and the
/// session inputs needed for replay. Both are pure functions of
/// (scenario, profile, mode, seed, statements): no ids or wall-clock times.
nlohmann::json export_transcript(const Session& session, TranscriptView view);

nlohmann::json turn_json(const TurnRecord& record, TranscriptView view);

/// Per-turn record on the instructor state stream (instructor turn plus a
/// wall-clock timestamp).
nlohmann::json instructor_record(const TurnRecord& record);

/// One scripted trainee statement.
struct ScriptStep {
  std::string template_id;
  FieldValues values;
};

/// `{"steps": [{"template": id, "fields": {name: value}}]}`
std::vector<ScriptStep> load_script(const nlohmann::json& document);
std::vector<ScriptStep> load_script_file(const std::string& path);

struct ReplayVerdict {
  bool verified = false;
  std::optional<std::uint64_t> divergent_turn;
  std::string detail;
};

/// Re-runs every statement of an instructor transcript from its recorded
/// profile, mode and seed, and compares turn by turn.
ReplayVerdict replay_transcript(const nlohmann::json& transcript, std::shared_ptr<const ScenarioDatabase> scenario,
                                std::shared_ptr<const TemplateStore> templates);

/// Canonical on-disk/over-the-wire form of a document (2-space indent,
/// trailing newline). CLI and service both write through this.
std::string dump_document(const nlohmann::json& document);

/// Reads a JSON document, raising ValidationError on I/O or parse failure.
nlohmann::json read_json_file(const std::string& path);

}  // namespace vsuspect
