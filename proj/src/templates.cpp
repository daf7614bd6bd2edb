#include "vsuspect/templates.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "vsuspect/errors.hpp"
#include "vsuspect/values.hpp"

namespace vsuspect {

using nlohmann::json;

std::string_view to_string(StatementCategory category) {
  switch (category) {
    case StatementCategory::Opening: return "opening";
    case StatementCategory::AlibiProbe: return "alibi-probe";
    case StatementCategory::Accusation: return "accusation";
    case StatementCategory::Generic: return "generic";
  }
  return "generic";
}

std::string_view to_string(ResponseBinding binding) {
  switch (binding) {
    case ResponseBinding::Event: return "event";
    case ResponseBinding::Personal: return "personal";
    case ResponseBinding::Generic: return "generic";
  }
  return "generic";
}

namespace {

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ' ' || c == '-';
}

// Template text as alternating literal / placeholder pieces.
struct Piece {
  bool placeholder;
  std::string text;
};

std::vector<Piece> split_template(std::string_view text) {
  std::vector<Piece> pieces;
  std::string literal;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '[') {
      const auto close = text.find(']', i + 1);
      if (close != std::string_view::npos && close > i + 1) {
        const auto name = text.substr(i + 1, close - i - 1);
        if (std::all_of(name.begin(), name.end(), is_name_char)) {
          if (!literal.empty()) pieces.push_back({false, std::move(literal)});
          literal.clear();
          pieces.push_back({true, std::string(name)});
          i = close + 1;
          continue;
        }
      }
    }
    literal.push_back(text[i++]);
  }
  if (!literal.empty()) pieces.push_back({false, std::move(literal)});
  return pieces;
}

bool match_pieces(const std::vector<Piece>& pieces, std::size_t index, std::string_view rest, FieldValues& out) {
  if (index == pieces.size()) return rest.empty();
  const Piece& piece = pieces[index];
  if (!piece.placeholder) {
    if (rest.substr(0, piece.text.size()) != piece.text) return false;
    return match_pieces(pieces, index + 1, rest.substr(piece.text.size()), out);
  }
  auto try_value = [&](std::string_view value) {
    auto saved = out;
    auto [it, inserted] = out.emplace(piece.text, std::string(value));
    if (!inserted && it->second != value) return false;
    const auto consumed = rest.substr(value.size());
    if (match_pieces(pieces, index + 1, consumed, out)) return true;
    out = std::move(saved);
    return false;
  };
  if (index + 1 == pieces.size()) return try_value(rest);
  // The next piece is a literal (placeholders are never adjacent in valid
  // templates; if they are, fall back to every split point).
  const Piece& next = pieces[index + 1];
  if (next.placeholder) {
    for (std::size_t len = 0; len <= rest.size(); ++len) {
      if (try_value(rest.substr(0, len))) return true;
    }
    return false;
  }
  for (auto pos = rest.find(next.text); pos != std::string_view::npos; pos = rest.find(next.text, pos + 1)) {
    if (try_value(rest.substr(0, pos))) return true;
  }
  return false;
}

bool value_fits_kind(std::string_view kind, std::string_view value) {
  if (kind == "date") return canonical_date(value).has_value();
  if (kind == "time") return canonical_time(value).has_value();
  return !fold_text(value).empty();
}

std::string_view kind_expectation(std::string_view kind) {
  if (kind == "date") return "a date (DD/MM/YYYY or YYYY-MM-DD)";
  if (kind == "time") return "a time (HH:MM)";
  return "a non-empty value";
}

}  // namespace

std::vector<std::string> placeholders(std::string_view text) {
  std::vector<std::string> names;
  for (auto& piece : split_template(text)) {
    if (piece.placeholder) names.push_back(std::move(piece.text));
  }
  return names;
}

std::string render_text(std::string_view text, const FieldValues& values) {
  std::string out;
  for (const auto& piece : split_template(text)) {
    out += piece.placeholder ? values.at(piece.text) : piece.text;
  }
  return out;
}

std::optional<FieldValues> extract_values(std::string_view text, std::string_view rendered) {
  FieldValues out;
  if (!match_pieces(split_template(text), 0, rendered, out)) return std::nullopt;
  return out;
}

StatementInstance instantiate_statement(const StatementTemplate& tmpl, const FieldValues& values) {
  for (const auto& field : tmpl.fields) {
    auto it = values.find(field.name);
    if (it == values.end()) {
      throw EngineError("missing_field", "missing value for field '" + field.name + "'", field.name);
    }
    if (!value_fits_kind(field.kind, it->second)) {
      throw EngineError("type_mismatch",
                        "field '" + field.name + "' expects " + std::string(kind_expectation(field.kind)), field.name);
    }
  }
  for (const auto& [name, _] : values) {
    const bool known = std::any_of(tmpl.fields.begin(), tmpl.fields.end(),
                                   [&](const FieldSpec& f) { return f.name == name; });
    if (!known) throw EngineError("extra_field", "template '" + tmpl.id + "' has no field '" + name + "'", name);
  }
  return StatementInstance{tmpl.id, values, render_text(tmpl.text, values)};
}

void AssociationTable::add(std::string statement_id, std::string response_id) {
  if (index_.emplace(statement_id, response_id).second) {
    pairs_.emplace_back(std::move(statement_id), std::move(response_id));
  }
}

bool AssociationTable::contains(std::string_view statement_id, std::string_view response_id) const {
  return index_.count({std::string(statement_id), std::string(response_id)}) > 0;
}

std::vector<std::string> AssociationTable::responses_for(std::string_view statement_id) const {
  std::vector<std::string> out;
  for (const auto& [q, r] : pairs_) {
    if (q == statement_id) out.push_back(r);
  }
  return out;
}

std::vector<std::string> AssociationTable::statements_for(std::string_view response_id) const {
  std::vector<std::string> out;
  for (const auto& [q, r] : pairs_) {
    if (r == response_id) out.push_back(q);
  }
  return out;
}

const StatementTemplate* TemplateStore::find_statement(std::string_view id) const {
  auto it = std::find_if(statements_.begin(), statements_.end(), [&](const auto& s) { return s.id == id; });
  return it == statements_.end() ? nullptr : &*it;
}

const ResponseTemplate* TemplateStore::find_response(std::string_view id) const {
  auto it = std::find_if(responses_.begin(), responses_.end(), [&](const auto& r) { return r.id == id; });
  return it == responses_.end() ? nullptr : &*it;
}

std::vector<const ResponseTemplate*> TemplateStore::associated_responses(std::string_view statement_id) const {
  if (!find_statement(statement_id)) {
    throw EngineError("unknown_template", "unknown statement template '" + std::string(statement_id) + "'",
                      "template");
  }
  std::vector<const ResponseTemplate*> out;
  for (const auto& id : associations_.responses_for(statement_id)) out.push_back(find_response(id));
  return out;
}

// ---------------------------------------------------------------------------
// Loading

namespace {

struct Diagnostics {
  std::vector<Diagnostic> list;
  void fail(std::string path, std::string message) { list.push_back({std::move(path), std::move(message)}); }
};

void check_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed,
                Diagnostics& diag) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      diag.fail(path + "/" + key, "unknown field '" + key + "'");
    }
  }
}

std::optional<std::string> required_string(const json& obj, const std::string& path, const char* key,
                                           Diagnostics& diag) {
  if (!obj.contains(key)) {
    diag.fail(path + "/" + key, "missing required field");
    return std::nullopt;
  }
  if (!obj[key].is_string() || obj[key].get<std::string>().empty()) {
    diag.fail(path + "/" + key, "expected a non-empty string");
    return std::nullopt;
  }
  return obj[key].get<std::string>();
}

std::optional<std::vector<FieldSpec>> parse_fields(const json& obj, const std::string& path,
                                                   const std::string& text, Diagnostics& diag) {
  std::vector<FieldSpec> fields;
  if (obj.contains("fields")) {
    const auto& raw = obj["fields"];
    if (!raw.is_array()) {
      diag.fail(path + "/fields", "expected an array");
      return std::nullopt;
    }
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const std::string fpath = path + "/fields/" + std::to_string(i);
      if (!raw[i].is_object()) {
        diag.fail(fpath, "expected an object");
        return std::nullopt;
      }
      check_keys(raw[i], fpath, {"name", "kind"}, diag);
      auto name = required_string(raw[i], fpath, "name", diag);
      auto kind = required_string(raw[i], fpath, "kind", diag);
      if (!name || !kind) return std::nullopt;
      if (std::any_of(fields.begin(), fields.end(), [&](const FieldSpec& f) { return f.name == *name; })) {
        diag.fail(fpath + "/name", "duplicate field '" + *name + "'");
        return std::nullopt;
      }
      fields.push_back({*name, *kind});
    }
  }
  auto names = placeholders(text);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  std::vector<std::string> declared;
  for (const auto& f : fields) declared.push_back(f.name);
  std::sort(declared.begin(), declared.end());
  if (names != declared) {
    std::string msg = "placeholders in text do not match declared fields:";
    for (const auto& n : names) {
      if (!std::binary_search(declared.begin(), declared.end(), n)) msg += " undeclared [" + n + "]";
    }
    for (const auto& n : declared) {
      if (!std::binary_search(names.begin(), names.end(), n)) msg += " unused field '" + n + "'";
    }
    diag.fail(path + "/fields", msg);
    return std::nullopt;
  }
  return fields;
}

std::optional<EffectWeights> parse_weights(const json& obj, const std::string& path, const char* key,
                                           Diagnostics& diag) {
  const std::string wpath = path + "/" + key;
  if (!obj.contains(key)) {
    diag.fail(wpath, "missing required field");
    return std::nullopt;
  }
  const auto& raw = obj[key];
  if (!raw.is_array() || raw.size() != 3) {
    diag.fail(wpath, "expected an array of 3 weights");
    return std::nullopt;
  }
  EffectWeights w{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!raw[i].is_number_integer() || raw[i].get<long long>() < -1 || raw[i].get<long long>() > 1) {
      diag.fail(wpath + "/" + std::to_string(i), "weight must be -1, 0 or 1");
      return std::nullopt;
    }
    w[i] = raw[i].get<int>();
  }
  return w;
}

std::optional<StatementCategory> parse_category(std::string_view text) {
  for (auto c : {StatementCategory::Opening, StatementCategory::AlibiProbe, StatementCategory::Accusation,
                 StatementCategory::Generic}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

std::optional<ResponseBinding> parse_binding(std::string_view text) {
  for (auto b : {ResponseBinding::Event, ResponseBinding::Personal, ResponseBinding::Generic}) {
    if (to_string(b) == text) return b;
  }
  return std::nullopt;
}

}  // namespace

TemplateStore load_templates(const json& doc) {
  Diagnostics diag;
  if (!doc.is_object()) throw ValidationError("", "template document must be a JSON object");
  check_keys(doc, "", {"statements", "responses", "associations"}, diag);
  for (const char* key : {"statements", "responses", "associations"}) {
    if (!doc.contains(key)) {
      diag.fail(std::string("/") + key, "missing required field");
    } else if (!doc[key].is_array()) {
      diag.fail(std::string("/") + key, "expected an array");
    }
  }
  if (!diag.list.empty()) throw ValidationError(std::move(diag.list));

  TemplateStore store;
  std::set<std::string> ids;

  for (std::size_t i = 0; i < doc["statements"].size(); ++i) {
    const std::string path = "/statements/" + std::to_string(i);
    const auto& raw = doc["statements"][i];
    if (!raw.is_object()) {
      diag.fail(path, "expected an object");
      continue;
    }
    check_keys(raw, path, {"id", "text", "fields", "w_hot", "w_cold", "category"}, diag);
    auto id = required_string(raw, path, "id", diag);
    auto text = required_string(raw, path, "text", diag);
    if (!id || !text) continue;
    auto fields = parse_fields(raw, path, *text, diag);
    auto w_hot = parse_weights(raw, path, "w_hot", diag);
    auto w_cold = parse_weights(raw, path, "w_cold", diag);
    StatementCategory category = StatementCategory::Generic;
    if (raw.contains("category")) {
      auto c = raw["category"].is_string() ? parse_category(raw["category"].get<std::string>()) : std::nullopt;
      if (!c) {
        diag.fail(path + "/category", "expected one of opening, alibi-probe, accusation, generic");
        continue;
      }
      category = *c;
    }
    if (!fields || !w_hot || !w_cold) continue;
    if (!ids.insert(*id).second) {
      diag.fail(path + "/id", "duplicate template id '" + *id + "'");
      continue;
    }
    store.statements_.push_back({*id, *text, std::move(*fields), *w_hot, *w_cold, category});
  }

  for (std::size_t i = 0; i < doc["responses"].size(); ++i) {
    const std::string path = "/responses/" + std::to_string(i);
    const auto& raw = doc["responses"][i];
    if (!raw.is_object()) {
      diag.fail(path, "expected an object");
      continue;
    }
    check_keys(raw, path, {"id", "text", "fields", "binding"}, diag);
    auto id = required_string(raw, path, "id", diag);
    auto text = required_string(raw, path, "text", diag);
    auto binding_text = required_string(raw, path, "binding", diag);
    if (!id || !text || !binding_text) continue;
    auto binding = parse_binding(*binding_text);
    if (!binding) {
      diag.fail(path + "/binding", "expected one of event, personal, generic");
      continue;
    }
    auto fields = parse_fields(raw, path, *text, diag);
    if (!fields) continue;
    bool good = true;
    for (std::size_t f = 0; f < fields->size(); ++f) {
      const bool event_kind = parse_detail_kind((*fields)[f].kind).has_value();
      if (*binding == ResponseBinding::Generic) {
        diag.fail(path + "/fields/" + std::to_string(f), "generic responses carry no input fields");
        good = false;
      } else if (*binding == ResponseBinding::Personal && event_kind) {
        diag.fail(path + "/fields/" + std::to_string(f) + "/kind",
                  "personal-bound response cannot use event detail kind '" + (*fields)[f].kind + "'");
        good = false;
      } else if ((*fields)[f].kind == "text") {
        diag.fail(path + "/fields/" + std::to_string(f) + "/kind", "response fields must be filled from memory");
        good = false;
      }
    }
    if (!good) continue;
    if (!ids.insert(*id).second) {
      diag.fail(path + "/id", "duplicate template id '" + *id + "'");
      continue;
    }
    store.responses_.push_back({*id, *text, std::move(*fields), *binding});
  }

  for (std::size_t i = 0; i < doc["associations"].size(); ++i) {
    const std::string path = "/associations/" + std::to_string(i);
    const auto& raw = doc["associations"][i];
    if (!raw.is_object()) {
      diag.fail(path, "expected an object");
      continue;
    }
    check_keys(raw, path, {"statement", "responses"}, diag);
    auto q = required_string(raw, path, "statement", diag);
    if (!q) continue;
    if (!store.find_statement(*q)) {
      diag.fail(path + "/statement", "dangling statement id '" + *q + "'");
      continue;
    }
    if (!raw.contains("responses") || !raw["responses"].is_array()) {
      diag.fail(path + "/responses", "expected an array of response ids");
      continue;
    }
    for (std::size_t j = 0; j < raw["responses"].size(); ++j) {
      const auto& r = raw["responses"][j];
      if (!r.is_string() || !store.find_response(r.get<std::string>())) {
        diag.fail(path + "/responses/" + std::to_string(j),
                  "dangling response id " + (r.is_string() ? "'" + r.get<std::string>() + "'" : r.dump()));
        continue;
      }
      store.associations_.add(*q, r.get<std::string>());
    }
  }

  if (!diag.list.empty()) throw ValidationError(std::move(diag.list));
  return store;
}

TemplateStore load_templates_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path, "cannot open template document");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path, std::string("malformed JSON: ") + e.what());
  }
  return load_templates(doc);
}

namespace {

json fields_json(const std::vector<FieldSpec>& fields) {
  json out = json::array();
  for (const auto& f : fields) out.push_back({{"name", f.name}, {"kind", f.kind}});
  return out;
}

}  // namespace

json to_json(const TemplateStore& store) {
  json statements = json::array();
  for (const auto& s : store.statements()) {
    statements.push_back({{"id", s.id},
                          {"text", s.text},
                          {"category", std::string(to_string(s.category))},
                          {"fields", fields_json(s.fields)},
                          {"w_hot", s.w_hot},
                          {"w_cold", s.w_cold}});
  }
  json responses = json::array();
  for (const auto& r : store.responses()) {
    responses.push_back({{"id", r.id},
                         {"text", r.text},
                         {"binding", std::string(to_string(r.binding))},
                         {"fields", fields_json(r.fields)}});
  }
  json associations = json::array();
  for (const auto& s : store.statements()) {
    auto rs = store.associations().responses_for(s.id);
    if (!rs.empty()) associations.push_back({{"statement", s.id}, {"responses", rs}});
  }
  return json{{"statements", statements}, {"responses", responses}, {"associations", associations}};
}

json template_catalog_view(const TemplateStore& store) {
  json groups = json::array();
  for (auto category : {StatementCategory::Opening, StatementCategory::AlibiProbe, StatementCategory::Accusation,
                        StatementCategory::Generic}) {
    json items = json::array();
    for (const auto& s : store.statements()) {
      if (s.category != category) continue;
      items.push_back({{"id", s.id}, {"text", s.text}, {"fields", fields_json(s.fields)}});
    }
    if (!items.empty()) groups.push_back({{"category", std::string(to_string(category))}, {"templates", items}});
  }
  return json{{"categories", groups}};
}

int hot_indicator(std::span<const ResolvedField> statement_fields, std::span<const PopulatedResponse> responses,
                  const HotLookup& is_hot) {
  for (const auto& f : statement_fields) {
    if (is_hot(f)) return 1;
  }
  for (const auto& r : responses) {
    for (const auto& f : r.fields) {
      if (is_hot(f)) return 1;
    }
  }
  return 0;
}

std::vector<ResolvedField> statement_fields(const StatementTemplate& tmpl, const StatementInstance& statement) {
  std::vector<ResolvedField> out;
  for (const auto& f : tmpl.fields) {
    auto it = statement.values.find(f.name);
    if (it != statement.values.end()) out.push_back({f.name, f.kind, it->second, std::nullopt});
  }
  return out;
}

HotLookup scenario_hot_lookup(const ScenarioDatabase& db) {
  return [&db](const ResolvedField& field) {
    if (field.source) return db.is_hot(*field.source);
    return db.value_is_hot(field.kind, field.value);
  };
}

}  // namespace vsuspect
