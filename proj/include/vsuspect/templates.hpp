#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vsuspect/scenario.hpp"

namespace vsuspect {

/// Effect of a statement on (Psychoticism, Extraversion, Neuroticism); each
/// component is -1, 0 or 1.
using EffectWeights = std::array<int, 3>;

/// An input field of a template. `kind` is an event detail kind
/// ("date", "location", ...), a personal detail name ("spouse", "age", ...)
/// or "text" for free input.
struct FieldSpec {
  std::string name;
  std::string kind;

  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

enum class StatementCategory { Opening, AlibiProbe, Accusation, Generic };

std::string_view to_string(StatementCategory category);

struct StatementTemplate {
  std::string id;
  std::string text;
  std::vector<FieldSpec> fields;
  EffectWeights w_hot{};
  EffectWeights w_cold{};
  StatementCategory category = StatementCategory::Generic;
};

enum class ResponseBinding { Event, Personal, Generic };

std::string_view to_string(ResponseBinding binding);

struct ResponseTemplate {
  std::string id;
  std::string text;
  std::vector<FieldSpec> fields;
  ResponseBinding binding = ResponseBinding::Generic;
};

using FieldValues = std::map<std::string, std::string>;

/// A statement as sent by the trainee.
struct StatementInstance {
  std::string template_id;
  FieldValues values;
  std::string text;

  friend bool operator==(const StatementInstance&, const StatementInstance&) = default;
};

/// A resolved input field, either from the trainee's statement or filled from
/// the scenario. `source` is set when the value came from a scenario fact.
struct ResolvedField {
  std::string name;
  std::string kind;
  std::string value;
  std::optional<DetailRef> source;
};

/// A response template with every field filled in for the current turn.
struct PopulatedResponse {
  std::string template_id;
  ResponseBinding binding = ResponseBinding::Generic;
  std::optional<std::string> event_id;  // set for event-bound responses
  std::string text;
  std::vector<ResolvedField> fields;
};

/// Placeholder names `[Name]` in order of appearance.
std::vector<std::string> placeholders(std::string_view text);

/// Substitutes every `[Name]` with values.at(Name).
std::string render_text(std::string_view text, const FieldValues& values);

/// Inverse of render_text for a given template text: recovers field values
/// from a rendered string, or nullopt if it does not fit the template.
std::optional<FieldValues> extract_values(std::string_view text, std::string_view rendered);

/// Checks values against the template fields (missing, extra, type mismatch; errors name the
/// field) and renders the statement.
StatementInstance instantiate_statement(const StatementTemplate& tmpl, const FieldValues& values);

/// Many-to-many statement/response association.
class AssociationTable {
 public:
  void add(std::string statement_id, std::string response_id);
  bool contains(std::string_view statement_id, std::string_view response_id) const;
  /// Response ids associated with a statement, in insertion order.
  std::vector<std::string> responses_for(std::string_view statement_id) const;
  std::vector<std::string> statements_for(std::string_view response_id) const;
  std::size_t size() const noexcept { return pairs_.size(); }

 private:
  std::vector<std::pair<std::string, std::string>> pairs_;
  std::set<std::pair<std::string, std::string>> index_;
};

/// Statement and response templates plus their association. Immutable once
/// loaded.
class TemplateStore {
 public:
  const std::vector<StatementTemplate>& statements() const noexcept { return statements_; }
  const std::vector<ResponseTemplate>& responses() const noexcept { return responses_; }
  const AssociationTable& associations() const noexcept { return associations_; }

  const StatementTemplate* find_statement(std::string_view id) const;
  const ResponseTemplate* find_response(std::string_view id) const;

  /// Responses associated with a statement. Throws EngineError("unknown_template") for an unknown id.
  std::vector<const ResponseTemplate*> associated_responses(std::string_view statement_id) const;

 private:
  friend TemplateStore load_templates(const nlohmann::json&);

  std::vector<StatementTemplate> statements_;
  std::vector<ResponseTemplate> responses_;
  AssociationTable associations_;
};

TemplateStore load_templates(const nlohmann::json& document);
TemplateStore load_templates_file(const std::string& path);
nlohmann::json to_json(const TemplateStore& store);

/// Trainee-safe template catalog: grouped by category, field schemas only,
/// no weight vectors. Empty categories are omitted.
nlohmann::json template_catalog_view(const TemplateStore& store);

/// Decides whether one resolved field is hot-labeled in the scenario.
using HotLookup = std::function<bool(const ResolvedField&)>;

/// Hot indicator over the statement fields and the fields of every populated associated
/// response: 1 if any of them is hot, else 0.
int hot_indicator(std::span<const ResolvedField> statement_fields, std::span<const PopulatedResponse> responses,
                  const HotLookup& is_hot);

/// The statement's own fields as ResolvedFields (no scenario source).
std::vector<ResolvedField> statement_fields(const StatementTemplate& tmpl, const StatementInstance& statement);

/// Hot lookup backed by a scenario: sourced fields use the stored flag,
/// trainee-entered values are hot if they equal a hot fact of the same kind.
HotLookup scenario_hot_lookup(const ScenarioDatabase& db);

}  // namespace vsuspect
