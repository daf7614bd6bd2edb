#include <algorithm>

#include "doctest.h"
#include "support.hpp"
#include "vsuspect/errors.hpp"

using namespace vsuspect;
using nlohmann::json;

namespace {

json small_templates() {
  return json::parse(R"({
    "statements": [
      {"id": "where", "category": "alibi-probe", "text": "Where were you on [Date]?",
       "fields": [{"name": "Date", "kind": "date"}], "w_hot": [1, 0, -1], "w_cold": [0, 0, 0]},
      {"id": "hello", "text": "Hello.", "w_hot": [0, 0, 0], "w_cold": [0, 1, 0]}
    ],
    "responses": [
      {"id": "was_at", "binding": "event", "text": "I was at [Location].",
       "fields": [{"name": "Location", "kind": "location"}]},
      {"id": "forgot", "binding": "generic", "text": "I don't remember."}
    ],
    "associations": [
      {"statement": "where", "responses": ["was_at", "forgot"]},
      {"statement": "hello", "responses": ["forgot"]}
    ]
  })");
}

std::string engine_error_code(const StatementTemplate& tmpl, const FieldValues& values, std::string* field = nullptr) {
  try {
    instantiate_statement(tmpl, values);
  } catch (const EngineError& e) {
    if (field) *field = e.field();
    return e.code();
  }
  return "";
}

bool has_diagnostic(const json& doc, const std::string& path, const std::string& fragment) {
  try {
    load_templates(doc);
  } catch (const ValidationError& e) {
    return std::any_of(e.diagnostics().begin(), e.diagnostics().end(), [&](const Diagnostic& d) {
      return d.path == path && d.message.find(fragment) != std::string::npos;
    });
  }
  return false;
}

ResolvedField field(std::string kind, std::string value) { return {kind, kind, std::move(value), std::nullopt}; }

}  // namespace

TEST_CASE("placeholders and rendering") {
  CHECK(placeholders("Where were you on [Date] at [Time]?") == std::vector<std::string>{"Date", "Time"});
  CHECK(placeholders("Hello.").empty());
  CHECK(render_text("Where were you on [Date]?", {{"Date", "24/12/2013"}}) == "Where were you on 24/12/2013?");
}

TEST_CASE("extract_values inverts rendering") {
  const auto v = extract_values("I was [Activity] at [Location].", "I was having dinner at our home in Holon.");
  REQUIRE(v);
  CHECK(v->at("Activity") == "having dinner");
  CHECK(v->at("Location") == "our home in Holon");
  CHECK_FALSE(extract_values("I was at [Location].", "I went home."));
  CHECK(extract_values("Hello.", "Hello.")->empty());
}

TEST_CASE("statement instantiation checks fields") {
  const auto store = load_templates(small_templates());
  const auto& where = *store.find_statement("where");

  const auto ok = instantiate_statement(where, {{"Date", "24/12/2013"}});
  CHECK(ok.text == "Where were you on 24/12/2013?");
  CHECK(ok.values.at("Date") == "24/12/2013");

  std::string name;
  CHECK(engine_error_code(where, {}, &name) == "missing_field");
  CHECK(name == "Date");
  CHECK(engine_error_code(where, {{"Date", "yesterday"}}, &name) == "type_mismatch");
  CHECK(name == "Date");
  CHECK(engine_error_code(where, {{"Date", "31/02/2013"}}) == "type_mismatch");
  CHECK(engine_error_code(where, {{"Date", "24/12/2013"}, {"Time", "10:00"}}, &name) == "extra_field");
  CHECK(name == "Time");
  CHECK(engine_error_code(*store.find_statement("hello"), {}) == "");
}

TEST_CASE("association table") {
  const auto store = load_templates(small_templates());
  const auto rs = store.associated_responses("where");
  REQUIRE(rs.size() == 2);
  CHECK(rs[0]->id == "was_at");
  CHECK(rs[1]->id == "forgot");
  CHECK(store.associations().statements_for("forgot").size() == 2);
  CHECK(store.associations().contains("hello", "forgot"));
  CHECK_FALSE(store.associations().contains("hello", "was_at"));
  CHECK_THROWS_AS(store.associated_responses("nope"), EngineError);
}

TEST_CASE("template validation diagnostics") {
  SUBCASE("placeholder without declared field") {
    auto doc = small_templates();
    doc["statements"][0]["text"] = "Where were you on [Date] at [Time]?";
    CHECK(has_diagnostic(doc, "/statements/0/fields", "Time"));
  }
  SUBCASE("weights outside {-1,0,1}") {
    auto doc = small_templates();
    doc["statements"][0]["w_hot"] = {2, 0, 0};
    CHECK(has_diagnostic(doc, "/statements/0/w_hot/0", "weight must be"));
  }
  SUBCASE("wrong weight arity") {
    auto doc = small_templates();
    doc["statements"][1]["w_cold"] = {0, 1};
    CHECK(has_diagnostic(doc, "/statements/1/w_cold", "3 weights"));
  }
  SUBCASE("duplicate ids across kinds") {
    auto doc = small_templates();
    doc["responses"][1]["id"] = "hello";
    CHECK(has_diagnostic(doc, "/responses/1/id", "duplicate template id"));
  }
  SUBCASE("dangling association") {
    auto doc = small_templates();
    doc["associations"][0]["responses"].push_back("ghost");
    CHECK(has_diagnostic(doc, "/associations/0/responses/2", "ghost"));
  }
  SUBCASE("generic response with fields") {
    auto doc = small_templates();
    doc["responses"][1]["text"] = "I was at [Location].";
    doc["responses"][1]["fields"] = {{{"name", "Location"}, {"kind", "location"}}};
    CHECK(has_diagnostic(doc, "/responses/1/fields/0", "no input fields"));
  }
  SUBCASE("personal response with event kind") {
    auto doc = small_templates();
    doc["responses"][0]["binding"] = "personal";
    CHECK(has_diagnostic(doc, "/responses/0/fields/0/kind", "event detail kind"));
  }
}

TEST_CASE("shipped catalog loads and round-trips") {
  const auto& store = *testing::burglary().templates;
  CHECK(store.statements().size() >= 15);
  CHECK(store.responses().size() >= 20);
  CHECK(load_templates(to_json(store)).statements().size() == store.statements().size());
  // Two statements share one "I don't remember" response.
  CHECK(store.associations().statements_for("dont_remember").size() >= 2);
}

TEST_CASE("catalog view omits weights and is grouped") {
  const auto view = template_catalog_view(*testing::burglary().templates);
  const std::string text = view.dump();
  CHECK(text.find("w_hot") == std::string::npos);
  CHECK(text.find("w_cold") == std::string::npos);
  REQUIRE(view["categories"].size() >= 3);
  CHECK(view["categories"][0]["category"] == "opening");
  for (const auto& c : view["categories"]) CHECK_FALSE(c["templates"].empty());
}

TEST_CASE("hot indicator") {
  const HotLookup hot_if_spouse = [](const ResolvedField& f) { return f.kind == "spouse"; };
  std::vector<ResolvedField> stmt{field("date", "24/12/2013")};
  std::vector<PopulatedResponse> responses(2);
  responses[0].fields = {field("location", "home")};

  CHECK(hot_indicator(stmt, responses, hot_if_spouse) == 0);
  responses[1].fields = {field("spouse", "Dana")};
  CHECK(hot_indicator(stmt, responses, hot_if_spouse) == 1);
  CHECK(hot_indicator({}, {}, hot_if_spouse) == 0);
  stmt.push_back(field("spouse", "Dana"));
  CHECK(hot_indicator(stmt, {}, hot_if_spouse) == 1);
}

TEST_CASE("scenario hot lookup") {
  const auto& db = *testing::burglary().scenario;
  const auto lookup = scenario_hot_lookup(db);
  CHECK(lookup(field("objects", "earrings")));
  CHECK_FALSE(lookup(field("location", "14 Herzl Street, Holon")));
  ResolvedField sourced{"Spouse", "spouse", "Dana", DetailRef{PersonalRef{"spouse"}}};
  CHECK(lookup(sourced));
  ResolvedField cold{"Age", "age", "46", DetailRef{PersonalRef{"age"}}};
  CHECK_FALSE(lookup(cold));
}
