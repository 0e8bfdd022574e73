#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "doctest.h"
#include "spinlab/experiments.hpp"
#include "spinlab/records.hpp"
#include "spinlab/rng.hpp"

using namespace spinlab;
using nlohmann::json;

namespace {

json erased(const ExperimentRecord& rec) {
  json j = rec.to_json();
  j.erase("wall_seconds");
  return j;
}

json dump_all(const std::vector<ExperimentRecord>& recs) {
  json arr = json::array();
  for (const auto& r : recs) arr.push_back(erased(r));
  return arr;
}

ExperimentSpec tiny_extinction() {
  ExperimentSpec s;
  s.name = "extinction_scaling";
  s.ns = {64};
  s.d = 4;
  s.graph_seeds = {1, 2};
  s.rule = {{"kind", "ising"}, {"beta", 2.0}};
  s.init = "biased:0.9";
  s.replicas = 3;
  s.seed = 5;
  return s;
}

}  // namespace

TEST_CASE("spec json round trip and strict keys") {
  auto s = tiny_extinction();
  s.params = {{"note", 1}};
  const auto j = s.to_json();
  const auto r = ExperimentSpec::from_json(j);
  CHECK(r.to_json() == j);
  CHECK(r.name == s.name);
  CHECK(r.graph_seeds == s.graph_seeds);
  CHECK(r.horizon == -1.0);

  auto bad = j;
  bad["bogus"] = 1;
  CHECK_THROWS_WITH_AS(ExperimentSpec::from_json(bad),
                       "spec: unknown key 'bogus'", std::invalid_argument);
}

TEST_CASE("spec validation") {
  auto s = tiny_extinction();
  s.name = "nope";
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = tiny_extinction();
  s.replicas = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = tiny_extinction();
  s.ns = {};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = tiny_extinction();
  s.ns = {3};
  s.d = 7;  // odd * odd
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.d = 4;  // odd n is fine with even d
  CHECK_NOTHROW(s.validate());
  s = tiny_extinction();
  s.horizon = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = tiny_extinction();
  s.graph_seeds = {};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  // lemma_suite runs off-graph and skips the grid checks.
  s = ExperimentSpec{};
  s.name = "lemma_suite";
  s.ns = {};
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("rule json parsing") {
  const auto ising = rule_from_json(7, {{"kind", "ising"}, {"beta", 1.5}});
  CHECK(ising.name() == "ising");
  CHECK(ising.beta == 1.5);
  CHECK(ising.d == 7);
  CHECK(rule_from_json(7, json::object()).beta == 3.0);  // defaults

  const double bp = 6.0 + std::log(2.0);
  const auto dom = rule_from_json(7, {{"kind", "potts_dominating"}, {"beta_p", bp}});
  CHECK(dom.q == 3);
  CHECK(dom.beta == doctest::Approx(3.0).epsilon(1e-12));
  const auto jd = rule_json(dom);
  CHECK(jd.at("kind") == "potts_dominating");
  CHECK(jd.at("beta_p").get<double>() == bp);
  CHECK(jd.at("q") == 3);
  CHECK(jd.at("beta").get<double>() == doctest::Approx(3.0));

  const auto noisy = rule_from_json(7, {{"kind", "noisy_majority"}, {"p", 0.05}});
  CHECK(rule_json(noisy).at("p").get<double>() == 0.05);

  const auto pg = rule_from_json(7, {{"kind", "potts_glauber"}, {"beta_p", 1.0}, {"q", 4}});
  CHECK(pg.q == 4);
  CHECK_FALSE(pg.two_spin());

  CHECK_THROWS_AS(rule_from_json(7, {{"kind", "nope"}}), std::invalid_argument);
}

TEST_CASE("init string parsing") {
  CHECK(make_two_spin_init("all_plus", 10, 1).spin_sum() == 10);
  CHECK(make_two_spin_init("all_minus", 10, 1).spin_sum() == -10);
  CHECK(make_two_spin_init("biased:0.3", 10, 1).spin_sum() == 4);
  CHECK_THROWS_AS(make_two_spin_init("bogus", 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_two_spin_init("biased:2.0", 10, 1), std::invalid_argument);

  const auto p = make_potts_init("all_plus", 6, 3, 1);
  CHECK(p.counts() == std::vector<std::int64_t>{6, 0, 0});
  CHECK(make_potts_init("biased:0.5", 100, 3, 1).counts()[0] >= 50);
  CHECK_THROWS_AS(make_potts_init("bogus", 6, 3, 1), std::invalid_argument);
}

TEST_CASE("extinction sweep: grid, keys, determinism") {
  const auto spec = tiny_extinction();
  const auto recs = run_experiment(spec);
  REQUIRE(recs.size() == 6);  // 1 n x 2 graphs x 3 replicas

  for (const auto& rec : recs) {
    CHECK(rec.experiment == "extinction_scaling");
    CHECK(rec.n == 64);
    CHECK(rec.d == 4);
    CHECK(rec.horizon == doctest::Approx(10.0 * std::log(64.0)));
    CHECK(rec.rule.at("kind") == "ising");
    CHECK(rec.observables.contains("events"));
    CHECK(rec.observables.contains("extinct"));
    CHECK(rec.observables.contains("extinction_time"));
    CHECK(rec.observables.contains("final_minus"));
    CHECK(rec.observables.contains("initial_minus"));
    CHECK(rec.observables.at("initial_minus").get<int>() == 3);
    CHECK(rec.violations.empty());
    CHECK(rec.wall_seconds >= 0.0);
    // strong plus drift at beta = 2: the legacy set dies within the horizon
    CHECK(rec.observables.at("extinct").get<bool>());
  }
  // distinct cells get distinct streams, derived position-independently
  CHECK(recs[0].stream_seed !=
        recs[1].stream_seed);
  const auto want = mix_seed(
      mix_seed(mix_seed(mix_seed(5, 0x7377656570ull), 64), 1), 0);
  CHECK(recs[0].stream_seed == want);

  const auto again = run_experiment(spec);
  CHECK(dump_all(recs) == dump_all(again));
}

TEST_CASE("worker count does not affect results") {
  const auto spec = tiny_extinction();
  setenv("SPINLAB_THREADS", "1", 1);
  const auto serial = run_experiment(spec);
  setenv("SPINLAB_THREADS", "4", 1);
  const auto parallel = run_experiment(spec);
  unsetenv("SPINLAB_THREADS");
  CHECK(dump_all(serial) == dump_all(parallel));
}

TEST_CASE("zero horizon reports the initial state") {
  auto spec = tiny_extinction();
  spec.horizon = 0.0;
  spec.graph_seeds = {1};
  spec.replicas = 1;
  const auto recs = run_experiment(spec);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].observables.at("events").get<std::int64_t>() == 0);
  CHECK(recs[0].observables.at("final_minus") ==
        recs[0].observables.at("initial_minus"));
  CHECK_FALSE(recs[0].observables.at("extinct").get<bool>());
}

TEST_CASE("jsonl persistence and summarize_path") {
  const std::string path = "/tmp/spinlab_test_records.jsonl";
  std::remove(path.c_str());
  auto spec = tiny_extinction();
  spec.out = path;
  const auto recs = run_experiment(spec);
  const auto lines = read_jsonl(path);
  REQUIRE(lines.size() == recs.size());
  CHECK(lines[0].at("experiment") == "extinction_scaling");

  const auto sum = summarize_path(path);
  CHECK_FALSE(sum.any_violation);
  CHECK(sum.groups.size() >= 1);
  CHECK(sum.text.find("extinction_scaling") != std::string::npos);
  CHECK(sum.csv.rfind("experiment,n,d,rule,count,violations", 0) == 0);
  std::remove(path.c_str());

  CHECK_THROWS_AS(summarize_path("/tmp/spinlab_absent.jsonl"), std::runtime_error);
  CHECK_THROWS_AS(summarize(std::vector<json>{}), std::runtime_error);
}

TEST_CASE("summary quantiles, violations, growth fit") {
  std::vector<json> records;
  auto base = [](int n, double extinction) {
    ExperimentRecord r;
    r.experiment = "extinction_scaling";
    r.n = n;
    r.d = 7;
    r.rule = {{"kind", "ising"}, {"beta", 3.0}, {"d", 7}};
    r.observables = {{"extinct", true}, {"extinction_time", extinction}};
    return r;
  };
  // one group of four records with a known quartile spread
  for (double x : {4.0, 1.0, 3.0, 2.0}) {
    auto r = base(100, x);
    r.observables["x"] = x;
    records.push_back(r.to_json());
  }
  // two more sizes so the growth fit has three distinct n
  records.push_back(base(1000, 1.5 * std::log(1000.0) + 0.5).to_json());
  records.push_back(base(10000, 1.5 * std::log(10000.0) + 0.5).to_json());
  // overwrite the n=100 median to sit exactly on the same line
  for (auto& j : records)
    if (j.at("n") == 100)
      j["observables"]["extinction_time"] = 1.5 * std::log(100.0) + 0.5;

  auto sum = summarize(records);
  CHECK_FALSE(sum.any_violation);
  bool saw_group = false, saw_fit = false;
  for (const auto& g : sum.groups) {
    if (g.contains("fit")) {
      saw_fit = true;
      CHECK(g.at("slope").get<double>() == doctest::Approx(1.5).epsilon(1e-9));
      CHECK(g.at("intercept").get<double>() == doctest::Approx(0.5).epsilon(1e-6));
      CHECK(g.at("rms_residual").get<double>() < 1e-9);
    } else if (g.at("n") == 100) {
      saw_group = true;
      CHECK(g.at("count") == 4);
      CHECK(g.at("violations") == 0);
      CHECK(g.at("median").at("x").get<double>() == doctest::Approx(2.5));
      CHECK(g.at("q25").at("x").get<double>() == doctest::Approx(1.75));
      CHECK(g.at("q75").at("x").get<double>() == doctest::Approx(3.25));
    }
  }
  CHECK(saw_group);
  CHECK(saw_fit);

  // violations are weighted into the group and trip the flag
  auto viol = base(100, 2.0);
  viol.violations = {{"structural", 2}, {"first_structural", "v=3"}};
  records.push_back(viol.to_json());
  sum = summarize(records);
  CHECK(sum.any_violation);
  for (const auto& g : sum.groups)
    if (!g.contains("fit") && g.at("n") == 100) CHECK(g.at("violations") == 3);
}

TEST_CASE("stationarity smoke on the complete fixture") {
  ExperimentSpec s;
  s.name = "stationarity_oracle";
  s.ns = {4};
  s.d = 3;
  s.rule = {{"kind", "ising"}, {"beta", 1.0}};
  s.params = {{"fixture", "complete"}, {"events", 200000}};
  s.seed = 2;
  const auto recs = run_experiment(s);
  REQUIRE(recs.size() == 1);
  const auto& obs = recs[0].observables;
  CHECK(obs.at("fixture") == "complete");
  CHECK(obs.at("events").get<std::int64_t>() == 200000);
  CHECK(obs.at("counted").get<std::int64_t>() == 180000);  // after 10% burn-in
  CHECK(obs.at("states").get<int>() == 16);
  CHECK(obs.at("tv").get<double>() < 0.1);
  CHECK(recs[0].violations.empty());
}

TEST_CASE("lemma suite smoke") {
  ExperimentSpec s;
  s.name = "lemma_suite";
  s.seed = 7;
  s.params = {{"tri_samples", 50}, {"kmax_check", 30}};
  const auto recs = run_experiment(s);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].observables.at("all_pass").get<bool>());
  CHECK(recs[0].violations.empty());
  const auto& checks = recs[0].observables.at("checks");
  CHECK(checks.is_array());
  CHECK(checks.size() >= 6);
}

TEST_CASE("potts coupling smoke") {
  ExperimentSpec s;
  s.name = "potts_coupling";
  s.ns = {60};
  s.d = 7;
  s.graph_seeds = {2};
  s.rule = {{"kind", "potts_glauber"}, {"beta_p", 2.0 + std::log(2.0)}, {"q", 3}};
  s.init = "biased:0.9";
  s.horizon = 5.0;
  s.seed = 3;
  const auto recs = run_experiment(s);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].violations.empty());
  CHECK(recs[0].observables.at("events").get<std::int64_t>() > 0);
  CHECK(recs[0].observables.contains("current_disagreements"));
}

TEST_CASE("rigid tails smoke") {
  ExperimentSpec s;
  s.name = "rigid_tails";
  s.ns = {300};
  s.d = 7;
  s.rule = {{"kind", "ising"}, {"beta", 0.5}};
  s.horizon = 3.0;
  // R = 1 so radius-R balls at n = 300 are mostly tree-like and the guarded
  // checks actually fire; the short horizon needs a faster scan cadence too.
  s.params = {{"R", 1}};
  s.scan_every = 100;
  s.seed = 11;
  const auto recs = run_experiment(s);
  REQUIRE(recs.size() == 1);
  const auto& obs = recs[0].observables;
  CHECK(obs.at("R").get<int>() == 1);
  CHECK(obs.at("structural_checks").get<std::int64_t>() > 0);
  CHECK(recs[0].violations.empty());
  CHECK(obs.at("final_minus_rigid").get<std::int64_t>() >=
        obs.at("final_minus_standard").get<std::int64_t>());
}

TEST_CASE("drift smoke hits the up level") {
  ExperimentSpec s;
  s.name = "magnetization_drift";
  s.ns = {200};
  s.d = 7;
  s.rule = {{"kind", "ising"}, {"beta", 2.0}};
  s.init = "biased:0.3";
  s.params = {{"up_level", 0.9}};
  s.seed = 6;
  const auto recs = run_experiment(s);
  REQUIRE(recs.size() == 1);
  const auto& obs = recs[0].observables;
  CHECK(obs.at("initial_m").get<double>() == doctest::Approx(0.3).epsilon(0.05));
  CHECK(obs.at("hit_up").get<bool>());
  CHECK(obs.at("hit_time_up").get<double>() > 0.0);
  CHECK(obs.at("final_m").get<double>() >= 0.9);
}
