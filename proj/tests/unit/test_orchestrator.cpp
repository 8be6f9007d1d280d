#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hri/orchestrator/pipeline.hpp"

using namespace hri;
using namespace hri::orch;

namespace {

const std::string kData = HRI_DATA_DIR;

const fuzzy::IT2FuzzySystem& controller() {
  static const auto sys = fuzzy::IT2FuzzySystem::default_axis_controller();
  return sys;
}

// Synthetic records: every stage time at the given mean, and the
// given count of trials failing first at each stage.
std::vector<TrialRecord> synthetic(const std::array<double, 4>& times, double total,
                                   const std::array<int, 4>& first_failures, int n) {
  std::vector<TrialRecord> out;
  for (int i = 0; i < n; ++i) {
    TrialRecord r;
    r.id = "s" + std::to_string(i);
    r.metrics.time = times;
    r.metrics.accuracy = {100, 100, 100, 100};
    int k = i;
    for (std::size_t s = 0; s < 4; ++s) {
      if (k < first_failures[s]) {
        for (std::size_t d = s; d < 4; ++d) r.metrics.accuracy[d] = 0;
        break;
      }
      k -= first_failures[s];
    }
    finalize(r, total);
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("timing identity and accuracy rule") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> t(0.0, 20.0);
  for (int i = 0; i < 2000; ++i) {
    TrialRecord r;
    for (auto& v : r.metrics.time) v = t(rng);
    for (auto& a : r.metrics.accuracy) a = rng() % 4 ? 100 : 0;
    finalize(r, stage_time_sum(r.metrics) + t(rng));
    CHECK(identity_holds(r));
    CHECK(r.t_total == stage_time_sum(r.metrics) + r.overhead);
    const bool all = std::all_of(r.metrics.accuracy.begin(), r.metrics.accuracy.end(),
                                 [](int a) { return a == 100; });
    CHECK(r.a_total == (all ? 100 : 0));
  }
  TrialRecord r;
  r.metrics.time = {1.0, 1.0, 1.0, 1.0};
  finalize(r, 3.0);  // measured below the stage sum
  CHECK(r.overhead == 0.0);
  CHECK(identity_holds(r));
  r.t_total += 1e-12;
  CHECK_FALSE(identity_holds(r));
}

TEST_CASE("aggregate over table-style means") {
  const auto recs = synthetic({3.41, 3.40, 9.09, 10.08}, 35.37, {2, 5, 2, 6}, 60);
  const auto rep = aggregate(recs);
  CHECK(rep.trials == 60);
  CHECK(rep.row("c").mean == doctest::Approx(35.37 - (3.41 + 3.40 + 9.09 + 10.08)).epsilon(1e-12));
  CHECK(std::abs(rep.row("c").mean - 9.39) < 0.01);
  CHECK(std::abs(rep.time_contribution[2] - 25.72) < 0.05);
  CHECK(std::abs(rep.time_contribution[3] - 28.49) < 0.05);
  const double sum = std::accumulate(rep.time_contribution.begin(), rep.time_contribution.end(), 0.0);
  CHECK(sum + rep.overhead_share == doctest::Approx(100.0));
  CHECK(sum <= 100.0);

  CHECK(rep.errors.failed == 15);
  const double expected[] = {100.0 * 2 / 15, 100.0 * 5 / 15, 100.0 * 2 / 15, 100.0 * 6 / 15};
  for (std::size_t i = 0; i < 4; ++i) CHECK(rep.errors.percent[i] == doctest::Approx(expected[i]));
  CHECK(std::abs(rep.errors.percent[1] - 33.33) < 0.01);
  CHECK(std::abs(rep.errors.percent[3] - 40.0) < 0.01);

  // Cumulative accuracies and their sample standard deviations.
  CHECK(rep.row("a_stt").mean == doctest::Approx(96.6667).epsilon(1e-5));
  CHECK(std::abs(rep.row("a_stt").sd - 18.10) < 0.005);
  CHECK(std::abs(rep.row("a_ae").sd - 32.37) < 0.005);
  CHECK(std::abs(rep.row("a_od").sd - 36.01) < 0.005);
  CHECK(std::abs(rep.row("a_ra").sd - 43.67) < 0.005);
  CHECK(rep.row("a_total").mean == 75.0);
  CHECK(rep.row("a_total").min == 0.0);
  CHECK(rep.row("a_total").max == 100.0);
}

TEST_CASE("aggregate edge cases") {
  CHECK_THROWS_AS(aggregate(std::vector<TrialRecord>{}), std::invalid_argument);
  const auto one = synthetic({1, 2, 3, 4}, 12, {0, 0, 0, 0}, 1);
  const auto rep = aggregate(one);
  CHECK(rep.row("t_total").sd == 0.0);
  CHECK(rep.row("t_total").min == rep.row("t_total").max);
  CHECK(rep.errors.no_failures);
  for (double p : rep.errors.percent) CHECK(p == 0.0);

  auto broken = one;
  broken[0].t_total += 1.0;
  CHECK_THROWS_AS(aggregate(broken), std::logic_error);
}

TEST_CASE("first-failure attribution partitions failures") {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 200; ++round) {
    std::array<int, 4> ff{};
    for (auto& c : ff) c = static_cast<int>(rng() % 6);
    const int n = std::accumulate(ff.begin(), ff.end(), 0) + static_cast<int>(rng() % 10);
    if (n == 0) continue;
    const auto e = error_attribution(synthetic({1, 1, 1, 1}, 5, ff, n));
    CHECK(e.counts == ff);
    CHECK(e.failed == std::accumulate(ff.begin(), ff.end(), 0));
    if (e.failed > 0) {
      CHECK(std::accumulate(e.percent.begin(), e.percent.end(), 0.0) == doctest::Approx(100.0));
    }
  }
  const auto all_ra = error_attribution(synthetic({1, 1, 1, 1}, 5, {0, 0, 0, 4}, 10));
  CHECK(all_ra.percent[3] == 100.0);
}

TEST_CASE("exports") {
  const auto recs = synthetic({3.41, 3.40, 9.09, 10.08}, 35.37, {2, 5, 2, 6}, 60);
  const auto rep = aggregate(recs);
  std::ostringstream csv;
  write_summary_csv(csv, rep);
  CHECK(csv.str().rfind("metric,mean,sd,min,max\nt_stt,3.4100,0.0000,3.4100,3.4100\n", 0) == 0);
  std::ostringstream trials;
  write_trials_csv(trials, recs);
  const auto text = trials.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 61);
  const auto j = to_json(rep);
  CHECK(j["error_contribution"]["ra"].get<double>() == doctest::Approx(40.0));
  CHECK(j["metrics"]["t_total"]["mean"].get<double>() == doctest::Approx(35.37));
  std::ostringstream table;
  print_summary(table, rep);
  CHECK(table.str().find("a_total") != std::string::npos);
}

TEST_CASE("text normalization") {
  CHECK(normalize_text("  Grab   the Apple!! ") == "grab the apple");
  CHECK(normalize_text("Place the pear at 640 , 600.") == "place the pear at 640, 600");
  CHECK(normalize_text("x at 1.5, -2") == "x at 1.5, -2");
  CHECK(normalize_text("...") == "");
}

TEST_CASE("mock extraction table") {
  const std::pair<const char*, const char*> cases[] = {
      {"grab the apple", "[pick_up(apple)]"},
      {"Pick up the green apple, please.", "[pick_up(\"green apple\")]"},
      {"give me the lemon", "[pick_up(lemon), hand_over(lemon)]"},
      {"hand over the pear", "[pick_up(pear), hand_over(pear)]"},
      {"move the apple to the left of the orange", "[move_object_to_left_of(apple, orange)]"},
      {"put the banana right of the pear", "[move_object_to_right_of(banana, pear)]"},
      {"place the lemon above the apple", "[move_object_above(lemon, apple)]"},
      {"move the orange below the lemon", "[move_object_below(orange, lemon)]"},
      {"place the pear at 640, 600", "[place_at(pear, 640, 600)]"},
      {"grab the apple then give me the pear",
       "[pick_up(apple), pick_up(pear), hand_over(pear)]"},
      {"what is the weather", "[]"},
      {"", "[]"},
  };
  for (const auto& [text, want] : cases) {
    CAPTURE(text);
    CHECK(mock_extract(text) == want);
    CHECK_NOTHROW(grammar::parse_actions(mock_extract(text)));
  }
}

TEST_CASE("fault corruptions always change the result") {
  CHECK(corrupt_transcript("grab the apple") == "grab the");
  CHECK(corrupt_transcript("apple") == "uh");
  for (const char* raw :
       {"[pick_up(apple)]", "[pick_up(a), hand_over(a)]", "[move_object_to_left_of(a, b)]",
        "[move_object_below(a, b)]", "[place_at(a, 1, 2)]", "[place_at(a, 5, 5)]"}) {
    CAPTURE(raw);
    const auto c = corrupt_actions(raw);
    CHECK(grammar::parse_actions(c) != grammar::parse_actions(raw));
  }
  CHECK(corrupt_actions("not a list") == "[]");
  CHECK(corrupt_actions("[]") == "[]");
}

TEST_CASE("fault rates and plans") {
  const auto f = FaultRates::parse("stt=0.05,ra=0.1");
  CHECK(f.rate[0] == 0.05);
  CHECK(f.rate[3] == 0.1);
  CHECK(f.any());
  CHECK_FALSE(FaultRates{}.any());
  CHECK_THROWS_AS(FaultRates::parse("xx=0.1"), std::invalid_argument);
  CHECK_THROWS_AS(FaultRates::parse("stt=2"), std::invalid_argument);
  CHECK_THROWS_AS(FaultRates::parse("stt"), std::invalid_argument);
  CHECK_THROWS_AS(FaultRates::parse("stt=0.1x"), std::invalid_argument);

  FaultRates r;
  r.rate = {2.0 / 60, 5.0 / 60, 2.0 / 60, 6.0 / 60};
  const auto plan = plan_faults(60, r, 42);
  std::array<int, 4> counts{};
  for (const auto& p : plan) {
    if (p) ++counts[static_cast<std::size_t>(*p)];
  }
  CHECK(counts == std::array<int, 4>{2, 5, 2, 6});
  CHECK(plan == plan_faults(60, r, 42));
  CHECK(plan != plan_faults(60, r, 43));
  r.rate = {0.5, 0.5, 0.5, 0.0};
  CHECK_THROWS_AS(plan_faults(10, r, 1), std::invalid_argument);
}

TEST_CASE("predicates") {
  sim::SceneState s;
  s.objects["a"] = {100, 100, 150, 150};
  s.objects["b"] = {300, 300, 350, 350};
  auto p = [](const char* j) { return predicate_from_json(nlohmann::json::parse(j)); };
  CHECK(p(R"({"left_of": ["a", "b"]})")->holds(s));
  CHECK_FALSE(p(R"({"right_of": ["a", "b"]})")->holds(s));
  CHECK(p(R"({"above": ["a", "b"]})")->holds(s));
  CHECK(p(R"({"below": ["b", "a"]})")->holds(s));
  CHECK(p(R"({"held": null})")->holds(s));
  CHECK_FALSE(p(R"({"held": "a"})")->holds(s));
  CHECK(p(R"({"at": ["a", 130, 125], "tol": 5})")->holds(s));
  CHECK_FALSE(p(R"({"near": ["a", "b"]})")->holds(s));
  CHECK(p(R"({"near": ["a", "b"], "tol": 300})")->holds(s));
  CHECK_FALSE(p(R"({"all": [{"held": null}, {"left_of": ["b", "a"]}]})")->holds(s));
  CHECK_FALSE(p(R"({"left_of": ["a", "zzz"]})")->holds(s));
  CHECK_THROWS_AS(p(R"({"sideways": ["a"]})"), ScriptError);
  CHECK_THROWS_AS(p(R"({"left_of": ["a"]})"), ScriptError);
  CHECK_THROWS_AS(p(R"({"all": []})"), ScriptError);
  const auto round = p(R"({"at": ["a", 1, 2], "tol": 3})")->to_json();
  CHECK(predicate_from_json(round)->to_json() == round);
}

TEST_CASE("script parsing reports the failing line") {
  std::istringstream good(
      "# comment\n\n"
      R"({"id": "x", "scene_file": "scenes/table_a.json", "utterance": "grab the apple", "expected_actions": "[pick_up(apple)]", "expected_final": {"held": "apple"}, "seed": 3})"
      "\n");
  const auto t = parse_script(good, kData);
  REQUIRE(t.size() == 1);
  CHECK(t[0].expected_transcript == "grab the apple");
  CHECK(t[0].scene.objects.count("apple") == 1);

  std::istringstream bad(
      R"({"id": "x", "scene_file": "scenes/table_a.json", "utterance": "u", "expected_actions": "[pick_up(apple)]", "expected_final": {"held": "apple"}})"
      "\n{\"id\": \"y\"}\n");
  try {
    parse_script(bad, kData, "s.jsonl");
    FAIL("expected ScriptError");
  } catch (const ScriptError& e) {
    CHECK(std::string(e.what()).rfind("s.jsonl:2: ", 0) == 0);
  }
  CHECK_THROWS_AS(load_script(kData + "/missing.jsonl"), ScriptError);
}

TEST_CASE("bundled script: 60 trials whose goals are not already met") {
  const auto trials = load_script(kData + "/scripts/benchmark_60.jsonl");
  REQUIRE(trials.size() == 60);
  for (const auto& t : trials) {
    CAPTURE(t.id);
    CHECK_FALSE(t.expected_final->holds(t.scene));
    CHECK(grammar::parse_actions(mock_extract(t.utterance)) == t.expected_actions);
  }
}

TEST_CASE("session audio: wake lands before speech and end-pointing closes it") {
  const PipelineConfig cfg;
  const auto stream = synthesize_session("grab the apple", cfg, 9);
  audio::MarkerToneClassifier clf;
  const auto cap = capture_utterance(stream, clf, cfg);
  REQUIRE(cap);
  CHECK(cap->wake.detected_at == doctest::Approx(2.0));
  CHECK(cap->utterance.speech);
  CHECK_FALSE(cap->utterance.truncated);
  // 0.2 s gap + 3 words at 0.35 s, on a frame boundary, + 5 s silence.
  CHECK(cap->utterance.duration(16000.0) == doctest::Approx(6.25));
}

TEST_CASE("interactive command: grab the apple") {
  SimClock clock;
  Pipeline p(clock, controller());
  sim::SceneSim scene(sim::load_scene(kData + "/scenes/table_a.json"));
  std::vector<std::string> stages;
  const auto out = p.run_command(scene, CommandInput{{}, "grab the apple", {}}, 1, {},
                                 [&](const std::string& type, const nlohmann::json& j) {
                                   if (type == "stage" && j["state"] != "running") {
                                     stages.push_back(j["stage"].get<std::string>());
                                   }
                                 });
  CHECK(out.record.a_total == 100);
  CHECK(scene.state().held == std::optional<std::string>("apple"));
  CHECK(out.record.metrics.t(Stage::STT) == 0.0);
  CHECK(out.record.metrics.t(Stage::AE) > 2.0);
  CHECK(stages == std::vector<std::string>{"stt", "ae", "od", "ra"});
  CHECK(identity_holds(out.record));
}

TEST_CASE("interactive command: unknown object leaves the scene alone") {
  SimClock clock;
  Pipeline p(clock, controller());
  sim::SceneSim scene(sim::load_scene(kData + "/scenes/table_a.json"));
  const auto before = scene.state().objects;
  const auto out = p.run_command(scene, CommandInput{{}, "grab the kiwi", {}}, 1);
  CHECK(out.record.a_total == 0);
  CHECK(out.record.first_failure == Stage::OD);
  CHECK(out.record.failure_reason.find("object not detected") != std::string::npos);
  CHECK(out.executions.front().reason == sim::kReasonNotDetected);
  CHECK(scene.state().objects == before);
  CHECK_FALSE(scene.state().held);
}

TEST_CASE("direct actions skip extraction; parse errors stop at AE") {
  SimClock clock;
  Pipeline p(clock, controller());
  sim::SceneSim scene(sim::load_scene(kData + "/scenes/table_a.json"));
  CommandInput in;
  in.actions = grammar::parse_actions("[pick_up(banana), hand_over(banana)]");
  const auto ok = p.run_command(scene, in, 2);
  CHECK(ok.record.a_total == 100);
  CHECK(ok.record.metrics.t(Stage::AE) == 0.0);

  std::vector<nlohmann::json> errors;
  const auto bad = p.run_command(scene, CommandInput{{}, "", {}}, 3);
  CHECK(bad.record.first_failure == Stage::STT);
  CHECK(bad.record.a_total == 0);
}

TEST_CASE("trial judging and fault propagation") {
  const auto trials = load_script(kData + "/scripts/benchmark_60.jsonl");
  const auto& t = trials.front();  // grab the apple
  SimClock clock;
  Pipeline p(clock, controller());

  const auto ok = p.run_trial(t, 7);
  CHECK(ok.a_total == 100);
  CHECK(ok.overhead > 5.0);  // speaking plus five seconds of silence
  CHECK(identity_holds(ok));

  for (Stage s : kStages) {
    CAPTURE(stage_key(s));
    const auto r = p.run_trial(t, 7, s);
    CHECK(r.a_total == 0);
    CHECK(r.first_failure == s);
    for (Stage d : kStages) {
      CHECK(r.metrics.a(d) == (static_cast<int>(d) < static_cast<int>(s) ? 100 : 0));
    }
    CHECK_FALSE(r.errored);
  }

  // Expected final scene that the command cannot produce.
  auto wrong = t;
  wrong.expected_final = predicate_from_json({{"held", "banana"}});
  const auto r = p.run_trial(wrong, 7);
  CHECK(r.metrics.a(Stage::OD) == 100);
  CHECK(r.metrics.a(Stage::RA) == 0);
  CHECK(r.a_total == 0);
}

TEST_CASE("replays are identical") {
  auto trials = load_script(kData + "/scripts/benchmark_60.jsonl");
  trials.resize(12);
  auto run = [&](std::uint64_t seed) {
    SimClock clock;
    Pipeline p(clock, controller());
    FaultRates f;
    f.rate = {0.1, 0.1, 0.0, 0.1};
    const auto b = run_batch(trials, p, seed, f);
    std::ostringstream out;
    write_trials_csv(out, b.records);
    return to_json(b.report).dump() + out.str();
  };
  const auto a = run(11);
  CHECK(a == run(11));
  CHECK(a != run(12));
  SimClock clock;
  Pipeline p(clock, controller());
  CHECK_THROWS_AS(run_batch({}, p, 1), ScriptError);
}

TEST_CASE("external adapters need endpoints") {
  SimClock clock;
  ExternalEndpoints e;
  e.stt_url = "http://127.0.0.1:1/stt";
  CHECK_THROWS_WITH_AS(Pipeline(clock, controller(), {}, AdapterKind::External, e),
                       doctest::Contains("HRI_AE_URL"), std::invalid_argument);
}
