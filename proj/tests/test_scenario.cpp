#include <algorithm>

#include "doctest.h"
#include "support.hpp"
#include "vsuspect/errors.hpp"
#include "vsuspect/values.hpp"

using namespace vsuspect;
using nlohmann::json;

namespace {

json minimal_scenario() {
  return json::parse(R"({
    "metadata": {"id": "mini", "title": "Mini"},
    "personal": {"age": 30, "spouse": {"value": "Ann", "hot": true}},
    "events": [
      {"id": "crime", "label": "Criminal",
       "details": {"date": "2020-01-05", "time": "22:00", "location": "the bank",
                   "objects": {"value": ["cash"], "hot": true}}},
      {"id": "alibi", "label": "Alibi", "truthful": false,
       "details": {"date": "05/01/2020", "time": "22:00", "location": "the cinema"}}
    ],
    "case_file": {"narrative": "A bank was robbed.", "known_facts": [{"event": "crime", "detail": "location"}],
                  "evidence": []}
  })");
}

bool has_diagnostic(const ValidationError& e, const std::string& path, const std::string& fragment) {
  return std::any_of(e.diagnostics().begin(), e.diagnostics().end(), [&](const Diagnostic& d) {
    return d.path == path && d.message.find(fragment) != std::string::npos;
  });
}

// Loads `doc` expecting failure and returns the error.
ValidationError load_failure(const json& doc) {
  try {
    load_scenario(doc);
  } catch (const ValidationError& e) {
    return e;
  }
  FAIL("document loaded without error");
  return ValidationError("", "");
}

}  // namespace

TEST_CASE("dates and times canonicalize") {
  CHECK(canonical_date("24/12/2013") == "2013-12-24");
  CHECK(canonical_date("2013-12-24") == "2013-12-24");
  CHECK_FALSE(canonical_date("31/02/2013"));
  CHECK_FALSE(canonical_date("2013-13-01"));
  CHECK_FALSE(canonical_date("24-12-2013"));
  CHECK(canonical_date("29/02/2012") == "2012-02-29");
  CHECK(canonical_time("9:05") == "09:05");
  CHECK(canonical_time("21:30") == "21:30");
  CHECK_FALSE(canonical_time("24:00"));
  CHECK_FALSE(canonical_time("21:3"));
  CHECK(fold_text("  The  Bank ") == "the bank");
}

TEST_CASE("minimal scenario loads and canonicalizes") {
  const auto db = load_scenario(minimal_scenario());
  REQUIRE(db.events().size() == 2);
  CHECK(db.criminal_event()->id == "crime");
  CHECK(db.find_event("alibi")->details.at(DetailKind::Date).items.at(0) == "2020-01-05");
  CHECK_FALSE(db.find_event("alibi")->truthful);
  CHECK(db.find_event("crime")->truthful);
  CHECK(db.personal_detail("age")->render() == "30");
  CHECK(db.is_hot(PersonalRef{"spouse"}));
  CHECK_FALSE(db.is_hot(PersonalRef{"age"}));
  CHECK(db.is_hot(EventDetailRef{"crime", DetailKind::Objects}));
  CHECK_FALSE(db.is_hot(EventDetailRef{"crime", DetailKind::Location}));
  CHECK(db.value_is_hot("objects", "CASH"));
  CHECK(db.value_is_hot("spouse", "ann"));
  CHECK_FALSE(db.value_is_hot("location", "the bank"));
}

TEST_CASE("scenario round-trips through JSON") {
  const auto db = load_scenario(minimal_scenario());
  CHECK(load_scenario(to_json(db)) == db);
  const auto& burglary = *testing::burglary().scenario;
  CHECK(load_scenario(to_json(burglary)) == burglary);
}

TEST_CASE("scenario validation diagnostics") {
  SUBCASE("empty event database") {
    auto doc = minimal_scenario();
    doc["events"] = json::array();
    CHECK(has_diagnostic(load_failure(doc), "/events", "empty event database"));
  }
  SUBCASE("multiple labels") {
    auto doc = minimal_scenario();
    doc["events"][1]["label"] = {"Alibi", "LegalAccess"};
    CHECK(has_diagnostic(load_failure(doc), "/events/1/label", "mutually exclusive"));
  }
  SUBCASE("unknown label") {
    auto doc = minimal_scenario();
    doc["events"][1]["label"] = "Heist";
    CHECK(has_diagnostic(load_failure(doc), "/events/1/label", "unknown label"));
  }
  SUBCASE("alibi marked truthful") {
    auto doc = minimal_scenario();
    doc["events"][1]["truthful"] = true;
    CHECK(has_diagnostic(load_failure(doc), "/events/1/truthful", "false events"));
  }
  SUBCASE("duplicate id") {
    auto doc = minimal_scenario();
    doc["events"][1]["id"] = "crime";
    CHECK(has_diagnostic(load_failure(doc), "/events/1/id", "duplicate event id"));
  }
  SUBCASE("second criminal event") {
    auto doc = minimal_scenario();
    doc["events"][1]["label"] = "Criminal";
    doc["events"][1].erase("truthful");
    CHECK(has_diagnostic(load_failure(doc), "/events/1/label", "at most one Criminal event"));
  }
  SUBCASE("missing date and bad time") {
    auto doc = minimal_scenario();
    doc["events"][0]["details"].erase("date");
    doc["events"][1]["details"]["time"] = "25:00";
    const auto e = load_failure(doc);
    CHECK(has_diagnostic(e, "/events/0/details/date", "missing required detail"));
    CHECK(has_diagnostic(e, "/events/1/details/time", ""));
    CHECK(e.diagnostics().size() >= 2);
  }
  SUBCASE("unknown detail kind") {
    auto doc = minimal_scenario();
    doc["events"][0]["details"]["weapon"] = "a knife";
    CHECK(has_diagnostic(load_failure(doc), "/events/0/details/weapon", "unknown detail kind"));
  }
  SUBCASE("dangling case-file reference") {
    auto doc = minimal_scenario();
    doc["case_file"]["known_facts"] = {{{"event", "ghost"}, {"detail", "date"}}, {{"personal", "income"}}};
    const auto e = load_failure(doc);
    CHECK(has_diagnostic(e, "/case_file/known_facts/0/event", "dangling reference"));
    CHECK(has_diagnostic(e, "/case_file/known_facts/1/personal", "dangling reference"));
  }
  SUBCASE("event lacks the referenced detail") {
    auto doc = minimal_scenario();
    doc["case_file"]["known_facts"] = {{{"event", "alibi"}, {"detail", "objects"}}};
    CHECK(has_diagnostic(load_failure(doc), "/case_file/known_facts/0/detail", "has no objects"));
  }
  SUBCASE("unknown top-level field") {
    auto doc = minimal_scenario();
    doc["extras"] = 1;
    CHECK(has_diagnostic(load_failure(doc), "/extras", "unknown field"));
  }
  SUBCASE("personal name clashes with detail kind") {
    auto doc = minimal_scenario();
    doc["personal"]["location"] = "home";
    CHECK(has_diagnostic(load_failure(doc), "/personal/location", "clashes"));
  }
  SUBCASE("bad hot flag") {
    auto doc = minimal_scenario();
    doc["personal"]["spouse"]["hot"] = "yes";
    CHECK(has_diagnostic(load_failure(doc), "/personal/spouse/hot", "boolean"));
  }
}

TEST_CASE("event queries") {
  const auto& db = *testing::burglary().scenario;

  SUBCASE("date filter resolves the dinner event") {
    const auto hits = db.query_events(EventFilter().where("date", "24/12/2013"));
    REQUIRE(hits.size() == 1);
    CHECK(hits[0]->id == "holiday_dinner");
  }
  SUBCASE("results ordered by date then time, truthful first") {
    const auto hits = db.query_events(EventFilter().where("date", "2013-02-12"));
    REQUIRE(hits.size() == 3);
    CHECK(hits[0]->id == "workday");
    CHECK(hits[1]->id == "break_in");
    CHECK(hits[2]->id == "brother_visit");
  }
  SUBCASE("conjunctive filters") {
    const auto hits =
        db.query_events(EventFilter().where("date", "12/02/2013").where("location", "14 herzl street, holon"));
    REQUIRE(hits.size() == 1);
    CHECK(hits[0]->id == "break_in");
  }
  SUBCASE("list details match any item") {
    const auto hits = db.query_events(EventFilter().where("objects", "Earrings"));
    REQUIRE(hits.size() == 2);
    CHECK(hits[0]->id == "flea_market");
    CHECK(hits[1]->id == "break_in");
  }
  SUBCASE("no match") { CHECK(db.query_events(EventFilter().where("date", "2001-01-01")).empty()); }
  SUBCASE("unknown detail kind") {
    try {
      EventFilter().where("weapon", "knife");
      FAIL("expected EngineError");
    } catch (const EngineError& e) {
      CHECK(e.code() == "unknown_detail_kind");
    }
  }
}

TEST_CASE("case file view exposes only narrative, facts and evidence") {
  const auto view = case_file_view(*testing::burglary().scenario);
  CHECK(view.contains("narrative"));
  CHECK(view["known_facts"].size() == 5);
  CHECK(view["evidence"].size() == 2);
  const std::string text = view.dump();
  CHECK(text.find("hot") == std::string::npos);
  CHECK(text.find("Criminal") == std::string::npos);
  CHECK(text.find("brother") == std::string::npos);
}
