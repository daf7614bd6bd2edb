// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "live_server.hpp"
#include "support.hpp"
#include "vsuspect/batch.hpp"

using namespace vsuspect;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

struct Criterion {
  std::string id;
  double budget_seconds;  // 0: no runtime bound
  std::function<Outcome()> run;
};

Outcome fail(std::string detail) { return {false, std::move(detail)}; }

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(4);
  ss << v;
  return ss.str();
}

// ---------------------------------------------------------------------------
// State update

Outcome state_update_exactness() {
  std::mt19937_64 gen(20240601);
  std::uniform_real_distribution<double> sd(-10.0, 10.0), sig(0.0, 3.0);
  std::uniform_int_distribution<int> wd(-1, 1), hd(0, 1);
  double worst = 0.0;
  for (int c = 0; c < 1000; ++c) {
    InternalState prev{{sd(gen), sd(gen), sd(gen)}, static_cast<std::uint64_t>(c)};
    const Vec3 sigma{sig(gen), sig(gen), sig(gen)};
    const EffectWeights wh{wd(gen), wd(gen), wd(gen)}, wc{wd(gen), wd(gen), wd(gen)};
    const int hot = hd(gen);
    const auto next = update_state(prev, sigma, wh, wc, hot);
    if (next.turn != prev.turn + 1) return fail("turn counter not advanced in case " + std::to_string(c));
    for (int i = 0; i < 3; ++i) {
      const double expected = prev.s[i] + sigma[i] * (hot * wh[i] + (1 - hot) * wc[i]);
      worst = std::max(worst, std::abs(next.s[i] - expected));
    }
  }
  if (worst > 1e-12) return fail("max deviation " + fmt(worst));
  return {true, "1000 cases, max deviation " + fmt(worst)};
}

// ---------------------------------------------------------------------------
// Mental integrity

// Written out from the section table, independent of the interval parser.
int oracle_zone(int trait, double v) {
  if (trait < 2) {
    if (v >= -3 && v <= 3) return 0;
    if ((v >= -5 && v < -3) || (v > 3 && v <= 5)) return 1;
    return 2;
  }
  if (v >= -3 && v <= 3) return 0;
  if ((v >= -5 && v < -3) || v > 3) return 1;
  return 2;
}

Outcome mental_integrity_oracle() {
  const auto bounds = SectionBounds::defaults();
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> wide(-8.0, 8.0);
  // Boundary points and their floating-point neighbours.
  std::vector<double> edges;
  for (double b : {-5.0, -3.0, 3.0, 5.0}) {
    edges.push_back(b);
    edges.push_back(std::nextafter(b, -1e9));
    edges.push_back(std::nextafter(b, 1e9));
  }
  edges.push_back(1e300);
  edges.push_back(-1e300);
  std::uniform_int_distribution<std::size_t> pick(0, edges.size() - 1);
  std::bernoulli_distribution use_edge(0.25);
  for (int c = 0; c < 100000; ++c) {
    Vec3 s;
    for (auto& v : s) v = use_edge(gen) ? edges[pick(gen)] : wide(gen);
    const auto mi = mental_integrity(s, bounds);
    std::array<int, 3> expected{};
    for (int t = 0; t < 3; ++t) ++expected[oracle_zone(t, s[t])];
    if (mi.counts != expected) {
      return fail("mismatch at (" + fmt(s[0]) + ", " + fmt(s[1]) + ", " + fmt(s[2]) + ")");
    }
    if (mi.green() + mi.orange() + mi.red() != 3) return fail("counts do not sum to 3");
  }
  return {true, "100000 vectors agree with oracle, counts sum to 3"};
}

// ---------------------------------------------------------------------------
// Hot indicator

Outcome hot_indicator_property() {
  std::mt19937_64 gen(1234);
  std::uniform_int_distribution<int> nfields(0, 4), nresponses(0, 5), name(0, 39);
  std::bernoulli_distribution hot_coin(0.08);
  std::size_t hot_cases = 0;
  for (int c = 0; c < 20000; ++c) {
    std::set<std::string> hot_names;
    for (int i = 0; i < 40; ++i) {
      if (hot_coin(gen)) hot_names.insert("f" + std::to_string(i));
    }
    const HotLookup lookup = [&](const ResolvedField& f) { return hot_names.count(f.value) > 0; };
    auto make_field = [&] {
      const std::string v = "f" + std::to_string(name(gen));
      return ResolvedField{v, "location", v, std::nullopt};
    };
    std::vector<ResolvedField> stmt(static_cast<std::size_t>(nfields(gen)));
    for (auto& f : stmt) f = make_field();
    std::vector<PopulatedResponse> resp(static_cast<std::size_t>(nresponses(gen)));
    for (auto& r : resp) {
      r.fields.resize(static_cast<std::size_t>(nfields(gen)));
      for (auto& f : r.fields) f = make_field();
    }

    // Brute force over the union of all fields.
    std::vector<std::string> all;
    for (const auto& f : stmt) all.push_back(f.value);
    for (const auto& r : resp) {
      for (const auto& f : r.fields) all.push_back(f.value);
    }
    int expected = 0;
    for (const auto& v : all) expected |= hot_names.count(v) ? 1 : 0;
    const int got = hot_indicator(stmt, resp, lookup);
    if (got != expected) return fail("case " + std::to_string(c) + ": got " + std::to_string(got));
    hot_cases += static_cast<std::size_t>(got);

    // Adding a hot field never lowers the indicator.
    if (!all.empty()) {
      const std::string promoted = all[static_cast<std::size_t>(c) % all.size()];
      hot_names.insert(promoted);
      if (hot_indicator(stmt, resp, lookup) != 1) return fail("not monotone in case " + std::to_string(c));
    }
    auto extra = stmt;
    extra.push_back(ResolvedField{"x", "location", "hot-extra", std::nullopt});
    hot_names.insert("hot-extra");
    if (hot_indicator(extra, resp, lookup) != 1) return fail("added hot field ignored in case " + std::to_string(c));
  }
  return {true, "20000 cases match brute force (" + std::to_string(hot_cases) + " hot), monotone"};
}

// ---------------------------------------------------------------------------
// Policy anchors

Outcome policy_anchors() {
  const auto policy = PolicyTable::defaults();
  const auto stable = policy.distribution(MentalIntegrity{{3, 0, 0}}, ContextClass::CriminalRelated);
  const auto broken = policy.distribution(MentalIntegrity{{0, 0, 3}}, ContextClass::CriminalRelated);
  if (!(stable == ResponseDistribution{0.0, 1.0, 0.0})) return fail("(3,0,0) anchor differs");
  if (!(broken == ResponseDistribution{0.5, 0.1, 0.4})) return fail("(0,0,3) anchor differs");
  const auto shipped = testing::experiment_profile().policy;
  if (!(shipped.distribution(MentalIntegrity{{3, 0, 0}}, ContextClass::CriminalRelated) == stable) ||
      !(shipped.distribution(MentalIntegrity{{0, 0, 3}}, ContextClass::CriminalRelated) == broken)) {
    return fail("experiment profile policy differs from the defaults");
  }
  return {true, "(3,0,0) -> (0,1,0) and (0,0,3) -> (0.5,0.1,0.4), bit-exact"};
}

// ---------------------------------------------------------------------------
// Sampling

PopulatedResponse stub(std::string id) {
  PopulatedResponse r;
  r.template_id = std::move(id);
  return r;
}

Outcome sampling_fidelity() {
  CandidatePartition part;
  for (int i = 0; i < 5; ++i) part.truthful.push_back(stub("t" + std::to_string(i)));
  part.deceptive.push_back(stub("f0"));
  for (int i = 0; i < 5; ++i) part.neutral.push_back(stub("n" + std::to_string(i)));
  const ResponseDistribution dist{0.5, 0.1, 0.4};
  SessionRng rng(42);
  constexpr int kDraws = 10000;
  std::array<int, 3> subsets{};
  std::array<std::array<int, 5>, 3> within{};
  for (int d = 0; d < kDraws; ++d) {
    const auto sel = select_response(part, dist, rng);
    const auto k = static_cast<std::size_t>(sel.subset);
    ++subsets[k];
    const auto& pool = part.subset(sel.subset);
    within[k][static_cast<std::size_t>(sel.response - pool.data())]++;
  }
  std::string detail = "subset freq";
  for (std::size_t k = 0; k < 3; ++k) {
    const double f = subsets[k] / static_cast<double>(kDraws);
    const double want = k == 0 ? 0.5 : k == 1 ? 0.1 : 0.4;
    detail += " " + fmt(f);
    if (std::abs(f - want) > 0.02) return fail("subset " + std::to_string(k) + " frequency " + fmt(f));
  }
  double worst = 0.0;
  for (std::size_t k : {std::size_t{0}, std::size_t{2}}) {
    for (int c : within[k]) worst = std::max(worst, std::abs(c / static_cast<double>(subsets[k]) - 0.2));
  }
  if (worst > 0.02) return fail("in-subset deviation " + fmt(worst));
  return {true, detail + "; max in-subset deviation from 0.2 is " + fmt(worst)};
}

// ---------------------------------------------------------------------------
// Determinism, replay, CLI/service agreement

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const int raw = std::system((std::string(VSUSPECT_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

// Runs a script through the HTTP service and downloads the given view.
std::string service_transcript(const std::string& scenario, const std::string& profile, std::uint64_t seed,
                               const std::string& mode, const std::vector<ScriptStep>& script,
                               TranscriptView view, std::vector<std::string>* trainee_payloads = nullptr) {
  testing::LiveServer live;
  auto cli = live.client();
  const json req{{"scenario", scenario}, {"profile", profile}, {"seed", seed}, {"mode", mode}};
  auto res = cli.Post("/sessions", req.dump(), "application/json");
  if (!res || res->status != 201) throw std::runtime_error("session creation failed");
  const auto created = json::parse(res->body);
  const std::string id = created["session_id"];
  const auto trainee = testing::bearer(created["trainee_token"]);
  const auto instructor = testing::bearer(created["instructor_token"]);
  if (trainee_payloads) {
    trainee_payloads->push_back(cli.Get("/scenarios")->body);
    trainee_payloads->push_back(created["case_file"].dump());
    trainee_payloads->push_back(cli.Get("/sessions/" + id + "/templates", trainee)->body);
  }
  for (const auto& step : script) {
    const json body{{"template", step.template_id}, {"fields", step.values}};
    res = cli.Post("/sessions/" + id + "/statements", trainee, body.dump(), "application/json");
    if (!res || res->status != 200) throw std::runtime_error("statement rejected");
    if (trainee_payloads) trainee_payloads->push_back(res->body);
  }
  if (trainee_payloads) {
    // Error payloads seen by the trainee.
    trainee_payloads->push_back(
        cli.Post("/sessions/" + id + "/statements", trainee, R"({"template": "where_on_date"})", "application/json")
            ->body);
    trainee_payloads->push_back(cli.Get("/sessions/" + id + "/transcript?view=instructor", trainee)->body);
    trainee_payloads->push_back(cli.Get("/sessions/" + id + "/state?poll=1", trainee)->body);
    trainee_payloads->push_back(cli.Get("/sessions/" + id + "/transcript?view=trainee", trainee)->body);
  }
  const auto& who = view == TranscriptView::Instructor ? instructor : trainee;
  res = cli.Get("/sessions/" + id + "/transcript?view=" + (view == TranscriptView::Instructor ? "instructor" : "trainee"),
                who);
  if (!res || res->status != 200) throw std::runtime_error("transcript download failed");
  return res->body;
}

Outcome determinism_and_replay() {
  const auto dir = fs::temp_directory_path() / ("vsuspect_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string common = "simulate --scenario " + testing::data_path("scenarios/burglary.json") +
                             " --profile " + testing::data_path("profiles/experiment.json") + " --script " +
                             testing::data_path("scripts/burglary_15.json") + " --seed 42 --out ";
  const auto first = dir / "first.json";
  const auto second = dir / "second.json";
  if (run_cli(common + first.string()) != 0 || run_cli(common + second.string()) != 0) {
    return fail("CLI simulate failed");
  }
  const std::string bytes = read_file(first);
  const std::string again = read_file(second);
  fs::remove_all(dir);
  if (bytes.empty() || bytes != again) return fail("two CLI runs differ");
  const auto doc = json::parse(bytes);
  if (doc["turns"].size() != 15) return fail("expected 15 turns");

  // Replay: rebuild the session from the recorded header and statements.
  const auto b = testing::burglary();
  Session replayed("replay", b.scenario, b.templates, load_profile(doc["session"]["profile"]),
                   *parse_session_mode(doc["session"]["mode"].get<std::string>()),
                   doc["session"]["seed"].get<std::uint64_t>());
  for (const auto& t : doc["turns"]) {
    replayed.step(t["statement"]["template"].get<std::string>(), t["statement"]["fields"].get<FieldValues>());
  }
  if (dump_document(export_transcript(replayed, TranscriptView::Instructor)) != bytes) {
    return fail("replayed transcript is not byte-identical");
  }
  if (!replay_transcript(doc, b.scenario, b.templates).verified) return fail("replay verification failed");

  const std::string served = service_transcript("burglary", "experiment", 42, "model", testing::burglary_script(),
                                                TranscriptView::Instructor);
  if (served != bytes) return fail("service transcript differs from CLI transcript");
  return {true, "15 turns, seed 42: CLI runs, replay and service download byte-identical (" +
                    std::to_string(bytes.size()) + " bytes)"};
}

// ---------------------------------------------------------------------------
// Experiment configuration

Outcome experiment_configuration() {
  const auto profile = testing::experiment_profile();
  if (!(profile.s0 == Vec3{0, 0, -3}) || !(profile.sigma == Vec3{0.5, 0.5, 0.5})) return fail("profile values differ");
  if (!(mental_integrity(profile.s0, profile.sections) == MentalIntegrity{{3, 0, 0}})) {
    return fail("initial integrity is not (3,0,0)");
  }
  auto svc = std::make_shared<SessionService>(testing::shared_catalog());
  const auto b = testing::burglary();
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Session s("exp", b.scenario, b.templates, profile, SessionMode::Model, seed);
    const auto& r = s.step("where_on_date_time", {{"Date", "12/02/2013"}, {"Time", "21:30"}});
    if (r.event_id != "break_in") return fail("probe did not resolve the Criminal event");
    if (r.context != ContextClass::CriminalRelated) return fail("probe not criminal-related");
    if (!(r.integrity == MentalIntegrity{{3, 0, 0}})) return fail("integrity left (3,0,0) on turn 1");
    if (!(r.distribution == ResponseDistribution{0, 1, 0})) return fail("distribution is not (0,1,0)");
    if (r.subset != SubsetKind::False) return fail("seed " + std::to_string(seed) + " did not answer falsely");
  }
  // Same through the service front door.
  CreateSessionRequest req;
  req.scenario = "burglary";
  req.profile_id = "experiment";
  req.seed = 42;
  const auto created = svc->create_session(req);
  svc->submit_statement(created["session_id"], created["trainee_token"], "where_on_date_time",
                        {{"Date", "12/02/2013"}, {"Time", "21:30"}});
  const auto rec = svc->state_records(created["session_id"], created["instructor_token"], 1).at(0);
  if (rec["subset"] != "false" || rec["integrity"] != json{3, 0, 0}) return fail("service session disagrees");
  return {true, "s'=(3,0,0) at start; first Criminal-event probe answered from the false subset for 100 seeds"};
}

// ---------------------------------------------------------------------------
// Random baseline

Outcome random_baseline_uniformity() {
  const auto b = testing::burglary();
  const auto profile = testing::experiment_profile();
  const FieldValues probe{{"Date", "12/02/2013"}, {"Time", "21:30"}};
  std::map<std::string, int> counts;
  std::size_t candidates = 0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    Session s("base", b.scenario, b.templates, profile, SessionMode::RandomBaseline, seed);
    Session m("model", b.scenario, b.templates, profile, SessionMode::Model, seed);
    const auto& r = s.step("where_on_date_time", probe);
    const auto& mr = m.step("where_on_date_time", probe);
    if (!(r.state_after == mr.state_after)) return fail("state differs from model mode");
    candidates = r.candidate_count;
    ++counts[r.response_template.value_or("") + "@" + r.response_event.value_or("")];
  }
  if (counts.size() != candidates) return fail("only " + std::to_string(counts.size()) + " candidates were chosen");
  double worst = 0.0;
  for (const auto& [_, c] : counts) worst = std::max(worst, std::abs(c / 1000.0 - 1.0 / candidates));
  if (worst > 0.03) return fail("max deviation from uniform " + fmt(worst));

  // Whole-script trajectories.
  const auto script = testing::burglary_script();
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Session s("base", b.scenario, b.templates, profile, SessionMode::RandomBaseline, seed);
    Session m("model", b.scenario, b.templates, profile, SessionMode::Model, seed + 1000);
    for (const auto& step : script) {
      if (!(s.step(step.template_id, step.values).state_after == m.step(step.template_id, step.values).state_after)) {
        return fail("trajectory differs on the 15-turn script");
      }
    }
  }
  return {true, std::to_string(candidates) + " candidates, max deviation from uniform " + fmt(worst) +
                    "; trajectories equal model mode"};
}

// ---------------------------------------------------------------------------
// Information hiding

// Returns the first leak found in a trainee payload, or an empty string.
std::string find_leak(const json& doc, const std::string& path = "") {
  static const std::set<std::string> kHiddenKeys{
      "state", "state_before", "state_after", "s", "s0", "sigma", "integrity", "hot", "w_hot", "w_cold",
      "label", "labels", "truthful", "distribution", "context", "subset", "event", "response_event", "kind_of_event"};
  static const std::set<std::string> kLabels{"Criminal", "Alibi", "LegalAccess", "Neutral"};
  if (doc.is_object()) {
    for (const auto& [key, value] : doc.items()) {
      if (kHiddenKeys.count(key)) return path + "/" + key;
      if (auto leak = find_leak(value, path + "/" + key); !leak.empty()) return leak;
    }
  } else if (doc.is_array()) {
    if (doc.size() == 3 && doc[0].is_number() && doc[1].is_number() && doc[2].is_number()) {
      return path + " (numeric triple)";
    }
    for (std::size_t i = 0; i < doc.size(); ++i) {
      if (auto leak = find_leak(doc[i], path + "/" + std::to_string(i)); !leak.empty()) return leak;
    }
  } else if (doc.is_boolean()) {
    return path + " (boolean flag)";
  } else if (doc.is_string() && kLabels.count(doc.get<std::string>())) {
    return path + " (event label)";
  }
  return "";
}

Outcome information_hiding() {
  std::vector<std::string> payloads;
  std::size_t turns = 0;
  for (const char* mode : {"model", "random"}) {
    service_transcript("burglary", "experiment", 42, mode, testing::burglary_script(), TranscriptView::Trainee,
                       &payloads);
    turns += 15;
  }
  const std::vector<ScriptStep> drug_script{{"greet", {}},
                                            {"married", {}},
                                            {"where_on_date", {{"Date", "20/11/2014"}}},
                                            {"who_with", {}},
                                            {"been_to", {{"Location", "Ben Gurion airport"}}},
                                            {"accuse", {}}};
  service_transcript("drug_trafficking", "volatile", 9, "model", drug_script, TranscriptView::Trainee, &payloads);
  turns += drug_script.size();

  for (std::size_t i = 0; i < payloads.size(); ++i) {
    const auto doc = json::parse(payloads[i]);
    if (auto leak = find_leak(doc); !leak.empty()) return fail("payload " + std::to_string(i) + " leaks " + leak);
  }
  // The scanner must catch the instructor view.
  const auto b = testing::burglary();
  const auto instructor = simulate_once(
      {b.scenario, b.templates, testing::experiment_profile(), testing::burglary_script(), SessionMode::Model}, 42);
  if (find_leak(instructor).empty()) return fail("scanner missed hidden state in the instructor view");
  return {true, std::to_string(payloads.size()) + " trainee payloads over " + std::to_string(turns) +
                    " turns are clean; instructor view is flagged"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"state-update-exactness", 1.0, state_update_exactness},
      {"mental-integrity-oracle", 5.0, mental_integrity_oracle},
      {"hot-indicator-property", 5.0, hot_indicator_property},
      {"policy-anchors-bit-exact", 0.0, policy_anchors},
      {"sampling-fidelity", 5.0, sampling_fidelity},
      {"determinism-replay", 0.0, determinism_and_replay},
      {"experiment-configuration", 0.0, experiment_configuration},
      {"random-baseline", 0.0, random_baseline_uniformity},
      {"information-hiding", 0.0, information_hiding},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (out.passed && c.budget_seconds > 0 && secs >= c.budget_seconds) {
      out = fail("took " + fmt(secs) + " s, budget " + fmt(c.budget_seconds) + " s");
    }
    if (!out.passed) ++failures;
    std::printf("%s %-26s %s (%.3f s)\n", out.passed ? "PASS" : "FAIL", c.id.c_str(), out.detail.c_str(), secs);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
