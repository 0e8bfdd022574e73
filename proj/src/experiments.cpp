#include "spinlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "spinlab/events.hpp"
#include "spinlab/gibbs.hpp"
#include "spinlab/psi.hpp"
#include "spinlab/rng.hpp"
#include "spinlab/stats.hpp"

namespace spinlab {

using nlohmann::json;

namespace {

const std::vector<std::string> kExperimentNames = {
    "extinction_scaling", "rigid_tails",        "tau_R_survival",
    "magnetization_drift", "potts_coupling",    "stationarity_oracle",
    "lemma_suite"};

struct Cell {
  int n = 0;
  std::uint64_t graph_seed = 0;
  int replica = 0;
};

// Position-independent: the same (n, graph seed, replica) triple draws the
// same stream no matter how the grid is sliced.
std::uint64_t cell_stream_seed(const ExperimentSpec& spec, const Cell& c) {
  std::uint64_t s = mix_seed(spec.seed, 0x7377656570ull);
  s = mix_seed(s, static_cast<std::uint64_t>(c.n));
  s = mix_seed(s, c.graph_seed);
  s = mix_seed(s, static_cast<std::uint64_t>(c.replica));
  return s;
}

double resolve_horizon(const ExperimentSpec& spec, int n) {
  if (spec.horizon >= 0) return spec.horizon;
  if (spec.name == "extinction_scaling" || spec.name == "tau_R_survival")
    return 10.0 * std::log(std::max(n, 2));
  if (spec.name == "magnetization_drift") return 600.0;
  return 20.0;  // rigid_tails, potts_coupling; stationarity overrides later
}

EngineOptions engine_options(const ExperimentSpec& spec) {
  EngineOptions opts;
  opts.scan_every = static_cast<int>(spec.scan_every);
  opts.paranoid = spec.paranoid;
  return opts;
}

std::int64_t count_minus(const TwoSpinConfig& c) {
  std::int64_t k = 0;
  for (std::int8_t s : c.spins) k += (s == -1);
  return k;
}

json optional_time(const std::optional<double>& t) {
  return t ? json(*t) : json(nullptr);
}

// ---- runners ------------------------------------------------------------

void run_extinction(const ExperimentSpec& spec, const Cell& c,
                    ExperimentRecord& rec) {
  const Graph g = generate_random_regular(c.n, spec.d, c.graph_seed);
  const UpdateRule rule = rule_from_json(g.d, spec.rule);
  if (!rule.two_spin())
    throw std::invalid_argument("extinction: rule must be two-spin");
  rec.rule = rule_json(rule);
  TwoSpinConfig init = make_two_spin_init(spec.init, g.n, rec.stream_seed);
  rec.observables["initial_minus"] = count_minus(init);

  EventStream stream(rec.stream_seed, g.n);
  EngineOptions opts = engine_options(spec);
  bool extinct_seen = false;
  opts.stop = [&] { return extinct_seen; };

  std::int64_t seen = 0;
  std::vector<double> tt, t_minus, t_clusters, t_legacy, t_legacy_alive,
      t_max_region, t_max_projection;
  auto observe = [&](const UpdateEvent& ev, const ApplyResult&,
                     const TwoSpinConfig&, const ClusterStore& st) {
    ++seen;
    if (st.legacy_extinct()) extinct_seen = true;
    if (spec.observe_every > 0 && seen % spec.observe_every == 0) {
      tt.push_back(ev.time);
      t_minus.push_back(static_cast<double>(st.n_minus()));
      t_clusters.push_back(static_cast<double>(st.n_live()));
      t_legacy.push_back(static_cast<double>(st.legacy_vertex_count()));
      t_legacy_alive.push_back(static_cast<double>(st.legacy_alive()));
      t_max_region.push_back(static_cast<double>(st.max_region_live()));
      t_max_projection.push_back(static_cast<double>(st.max_projection_live()));
    }
  };

  const SingleStoreResult out = run_single_with_store(
      g, rule, std::move(init), stream, rec.horizon, opts, observe);

  rec.observables["events"] = out.events;
  rec.observables["extinct"] = out.legacy_extinction_time.has_value();
  rec.observables["extinction_time"] = optional_time(out.legacy_extinction_time);
  rec.observables["final_minus"] = out.store.n_minus();
  rec.observables["final_magnetization"] = magnetization_ising(out.final);
  if (spec.observe_every > 0)
    rec.observables["trace"] = {{"t", tt},
                                {"n_minus", t_minus},
                                {"n_clusters", t_clusters},
                                {"legacy_size", t_legacy},
                                {"legacy_alive", t_legacy_alive},
                                {"max_region", t_max_region},
                                {"max_projection", t_max_projection}};
}

void run_rigid(const ExperimentSpec& spec, const Cell& c,
               ExperimentRecord& rec) {
  const Graph g = generate_random_regular(c.n, spec.d, c.graph_seed);
  const UpdateRule rule = rule_from_json(g.d, spec.rule);
  if (!rule.two_spin())
    throw std::invalid_argument("rigid: rule must be two-spin");
  rec.rule = rule_json(rule);
  const int R = spec.params.value("R", dynamics_radius(g.n, g.d));

  EventStream stream(rec.stream_seed, g.n);
  const RigidPairResult out =
      run_rigid_pair(g, rule, stream, rec.horizon, R, engine_options(spec));

  std::int64_t max_peak = 0;
  for (const auto& [id, cl] : out.store_rigid.live())
    max_peak = std::max(max_peak, cl.peak_region);
  for (const auto& row : out.store_rigid.dead())
    max_peak = std::max(max_peak, row.peak_region);

  rec.observables["R"] = R;
  rec.observables["events"] = out.events;
  rec.observables["rejected_flips"] = out.rejected_flips;
  rec.observables["structural_checks"] = out.structural_checks;
  rec.observables["tau_R_reached"] = out.tau_R_time.has_value();
  rec.observables["tau_R_time"] = optional_time(out.tau_R_time);
  rec.observables["max_projection"] = out.store_rigid.max_projection_running();
  rec.observables["max_peak_region"] = max_peak;
  rec.observables["guard_active"] = out.guard_active_throughout;
  rec.observables["final_minus_standard"] = count_minus(out.final_standard);
  rec.observables["final_minus_rigid"] = count_minus(out.final_rigid);
  if (out.structural_violations > 0) {
    rec.violations["structural"] = out.structural_violations;
    rec.violations["first_structural"] = out.first_structural_violation;
  }
}

void run_drift(const ExperimentSpec& spec, const Cell& c,
               ExperimentRecord& rec) {
  const Graph g = generate_random_regular(c.n, spec.d, c.graph_seed);
  const UpdateRule rule = rule_from_json(g.d, spec.rule);
  if (!rule.two_spin())
    throw std::invalid_argument("drift: rule must be two-spin");
  rec.rule = rule_json(rule);
  const double up_level = spec.params.value("up_level", 0.99);
  const bool stop_on_hit = spec.params.value("stop_on_hit", true);

  TwoSpinConfig init = make_two_spin_init(spec.init, g.n, rec.stream_seed);
  std::int64_t ssum = init.spin_sum();
  const double m0 = static_cast<double>(ssum) / g.n;
  double min_m = m0;
  std::optional<double> hit;
  bool done = false;
  std::int64_t seen = 0;
  std::vector<double> tt, tm;

  EventStream stream(rec.stream_seed, g.n);
  EngineOptions opts = engine_options(spec);
  opts.stop = [&] { return done; };
  auto observe = [&](const UpdateEvent& ev, const ApplyResult& ra,
                     const TwoSpinConfig&) {
    ++seen;
    if (ra.changed) ssum += 2 * ra.new_spin;
    const double m = static_cast<double>(ssum) / g.n;
    min_m = std::min(min_m, m);
    if (!hit && m >= up_level) {
      hit = ev.time;
      if (stop_on_hit) done = true;
    }
    if (spec.observe_every > 0 && seen % spec.observe_every == 0) {
      tt.push_back(ev.time);
      tm.push_back(m);
    }
  };

  const SingleRunResult out =
      run_single(g, rule, std::move(init), stream, rec.horizon, opts, observe);

  rec.observables["events"] = out.events;
  rec.observables["flips"] = out.flips;
  rec.observables["initial_m"] = m0;
  rec.observables["final_m"] = magnetization_ising(out.final);
  rec.observables["min_m"] = min_m;
  rec.observables["up_level"] = up_level;
  rec.observables["hit_up"] = hit.has_value();
  rec.observables["hit_time_up"] = optional_time(hit);
  if (spec.observe_every > 0)
    rec.observables["trace"] = {{"t", tt}, {"m", tm}};
}

void run_potts(const ExperimentSpec& spec, const Cell& c,
               ExperimentRecord& rec) {
  const Graph g = generate_random_regular(c.n, spec.d, c.graph_seed);
  const UpdateRule rule = rule_from_json(g.d, spec.rule);
  if (rule.kind != RuleKind::potts_glauber)
    throw std::invalid_argument("potts coupling: rule must be potts_glauber");
  rec.rule = rule_json(rule);
  const PottsConfig y0 =
      make_potts_init(spec.init, g.n, rule.q, rec.stream_seed);

  EventStream stream(rec.stream_seed, g.n);
  const PottsTripleResult out =
      run_potts_triple(g, y0, rule.beta_p, rule.q, stream, rec.horizon,
                       engine_options(spec));

  rec.observables["events"] = out.events;
  rec.observables["legacy_extinct"] = out.legacy_extinction_time.has_value();
  rec.observables["extinction_time"] = optional_time(out.legacy_extinction_time);
  rec.observables["current_disagreements"] = out.current_disagreements;
  rec.observables["post_extinction_disagreements"] =
      out.post_extinction_disagreements;
  rec.observables["final_m_free"] = magnetization_potts(out.final_free);
  rec.observables["final_m_one"] = magnetization_potts(out.final_one);
  rec.observables["final_minus_x"] = count_minus(out.final_x);
  if (out.support_violations > 0)
    rec.violations["support"] = out.support_violations;
  if (out.disagreement_violations > 0)
    rec.violations["disagreement"] = out.disagreement_violations;
  if (!out.first_violation.empty())
    rec.violations["first"] = out.first_violation;
}

void run_stationarity(const ExperimentSpec& spec, const Cell& c,
                      ExperimentRecord& rec) {
  const std::string fixture = spec.params.value("fixture", "random");
  Graph g;
  if (fixture == "complete")
    g = complete_graph(c.n);
  else if (fixture == "cycle")
    g = cycle_graph(c.n);
  else if (fixture == "petersen")
    g = petersen_graph();
  else if (fixture == "random")
    g = generate_random_regular(c.n, spec.d, c.graph_seed);
  else
    throw std::invalid_argument("stationarity: unknown fixture '" + fixture +
                                "'");
  if (fixture == "petersen" && c.n != 10)
    throw std::invalid_argument("stationarity: petersen fixture needs n=10");
  if (g.n > 20)
    throw std::invalid_argument("stationarity: exact law needs n <= 20");
  rec.n = g.n;
  rec.d = g.d;

  const UpdateRule rule = rule_from_json(g.d, spec.rule);
  if (rule.kind != RuleKind::ising)
    throw std::invalid_argument("stationarity: exact law needs the ising rule");
  rec.rule = rule_json(rule);

  const auto target =
      spec.params.value("events", static_cast<std::int64_t>(10'000'000));
  if (target < 10) throw std::invalid_argument("stationarity: events too small");
  const std::int64_t burn = target / 10;
  rec.horizon = spec.horizon >= 0
                    ? spec.horizon
                    : 2.2 * static_cast<double>(target) / g.n + 1.0;

  TwoSpinConfig init = make_two_spin_init(spec.init, g.n, rec.stream_seed);
  std::uint32_t idx = 0;
  for (int v = 0; v < g.n; ++v)
    if (init.spins[v] == 1) idx |= (1u << v);

  std::vector<std::int64_t> counts(std::size_t{1} << g.n, 0);
  std::int64_t seen = 0, counted = 0;
  bool done = false;
  EngineOptions opts = engine_options(spec);
  opts.stop = [&] { return done; };
  auto observe = [&](const UpdateEvent& ev, const ApplyResult& ra,
                     const TwoSpinConfig&) {
    ++seen;
    if (ra.changed) idx ^= (1u << ev.vertex);
    if (seen > burn) {
      ++counts[idx];
      ++counted;
    }
    done = seen >= target;
  };

  EventStream stream(rec.stream_seed, g.n);
  run_single(g, rule, std::move(init), stream, rec.horizon, opts, observe);
  if (counted == 0)
    throw std::runtime_error("stationarity: no events past burn-in");

  std::vector<double> empirical(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    empirical[i] = static_cast<double>(counts[i]) / counted;
  const std::vector<double> exact = exact_gibbs_ising(g, rule.beta);

  rec.observables["fixture"] = fixture;
  rec.observables["events"] = seen;
  rec.observables["counted"] = counted;
  rec.observables["states"] = counts.size();
  rec.observables["tv"] = tv_distance(empirical, exact);
}

// The fixed parameter grid for the dominating-rate margin check; beta_p is
// laid out so the derived two-spin temperature comes out at the target.
double grid_beta_p(double beta, int q, int d) {
  return 2.0 * beta + 7.0 * std::log(static_cast<double>(q - 1)) / d;
}

void run_lemmas(const ExperimentSpec& spec, const Cell& c,
                ExperimentRecord& rec) {
  json checks = json::array();
  bool all_pass = true;
  std::int64_t failed = 0;
  auto add = [&](const Report& rep) {
    json row;
    row["check"] = rep.check;
    row["params"] = rep.params;
    row["pass"] = rep.pass;
    row["worst_margin"] = rep.worst_margin;
    if (!rep.witnesses.empty()) row["first_witness"] = rep.witnesses.front();
    checks.push_back(row);
    all_pass = all_pass && rep.pass;
    failed += !rep.pass;
  };

  // activity-tail machinery at verification-scale exponents
  const PsiPmf scaled = make_psi(7, spec.params.value("g0", 10.0),
                                 spec.params.value("g1", 2.0), 200);
  const int kchk = spec.params.value("kmax_check", 50);
  for (int q : {1, 2, 7}) add(verify_simple_convolution(scaled, q, kchk));
  for (int q : {2, 7}) add(verify_psi_tail_bounds(scaled, q, kchk));

  // dominating-rate margin across the supported corner of parameter space
  for (int q : {2, 3, 4, 5})
    for (int d : {7, 9, 12})
      for (double beta : {1.0, 3.0})
        add(verify_potts_domination(grid_beta_p(beta, q, d), q, d));

  // a deliberately out-of-range point must fail and name the composition
  {
    const Report neg = check_potts_domination(1.0, 0.5, 3, 7);
    json row;
    row["check"] = "potts_domination_negative_control";
    row["params"] = neg.params;
    row["pass"] = !neg.pass && !neg.witnesses.empty();
    row["worst_margin"] = neg.worst_margin;
    if (!neg.witnesses.empty()) row["first_witness"] = neg.witnesses.front();
    checks.push_back(row);
    all_pass = all_pass && row["pass"].get<bool>();
    failed += !row["pass"].get<bool>();
  }

  // trifurcation halving on random trees: |Tri(A)| <= floor(|A|/2)
  {
    const int samples = spec.params.value("tri_samples", 500);
    Rng rng(mix_seed(rec.stream_seed, 0x747269ull));
    json row;
    row["check"] = "trifurcation_halving";
    row["params"] = {{"samples", samples}};
    row["pass"] = true;
    row["worst_margin"] = 0.0;
    double worst = 0.0;  // tri - floor(|A|/2), want <= 0
    for (int s = 0; s < samples; ++s) {
      const int tn = 20 + static_cast<int>(rng.below(61));
      const Graph tree = random_tree(tn, rng.u64());
      const int asize =
          1 + static_cast<int>(rng.below(std::min(40, tn)));
      std::vector<std::int32_t> verts(tn);
      for (int v = 0; v < tn; ++v) verts[v] = v;
      for (int i = 0; i < asize; ++i) {
        const auto j = i + static_cast<int>(rng.below(tn - i));
        std::swap(verts[i], verts[j]);
      }
      std::unordered_set<std::int32_t> A(verts.begin(),
                                         verts.begin() + asize);
      const int R = 1 + static_cast<int>(rng.below(4));
      const int tri = count_trifurcations(tree, A, R);
      const double slack = tri - asize / 2;
      if (slack > worst) worst = slack;
      if (tri > asize / 2) {
        row["pass"] = false;
        if (!row.contains("first_witness")) {
          std::ostringstream os;
          os << "sample " << s << ": n=" << tn << " |A|=" << asize
             << " R=" << R << " tri=" << tri;
          row["first_witness"] = os.str();
        }
      }
    }
    row["worst_margin"] = -worst;
    checks.push_back(row);
    all_pass = all_pass && row["pass"].get<bool>();
    failed += !row["pass"].get<bool>();
  }

  rec.observables["checks"] = checks;
  rec.observables["all_pass"] = all_pass;
  if (failed > 0) rec.violations["failed_checks"] = failed;
  (void)c;
}

ExperimentRecord run_cell(const ExperimentSpec& spec, const Cell& c) {
  ExperimentRecord rec;
  rec.experiment = spec.name;
  rec.n = c.n;
  rec.d = spec.d;
  rec.graph_seed = c.graph_seed;
  rec.rule = spec.rule;
  rec.stream_seed = cell_stream_seed(spec, c);
  rec.horizon = resolve_horizon(spec, c.n);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (spec.name == "extinction_scaling")
      run_extinction(spec, c, rec);
    else if (spec.name == "rigid_tails" || spec.name == "tau_R_survival")
      run_rigid(spec, c, rec);
    else if (spec.name == "magnetization_drift")
      run_drift(spec, c, rec);
    else if (spec.name == "potts_coupling")
      run_potts(spec, c, rec);
    else if (spec.name == "stationarity_oracle")
      run_stationarity(spec, c, rec);
    else if (spec.name == "lemma_suite")
      run_lemmas(spec, c, rec);
    else
      throw std::invalid_argument("experiment: unknown name '" + spec.name +
                                  "'");
  } catch (const std::exception& e) {
    rec.violations["error"] = e.what();
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rec;
}

int worker_count(std::size_t cells) {
  unsigned hw = std::thread::hardware_concurrency();
  int workers = hw ? static_cast<int>(hw) : 4;
  if (const char* env = std::getenv("SPINLAB_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed >= 1) workers = parsed;
  }
  return std::max(1, std::min<int>(workers, static_cast<int>(cells)));
}

}  // namespace

// ---- spec ---------------------------------------------------------------

ExperimentSpec ExperimentSpec::from_json(const json& j) {
  ExperimentSpec s;
  for (const auto& [key, val] : j.items()) {
    if (key == "name")
      s.name = val.get<std::string>();
    else if (key == "ns")
      s.ns = val.get<std::vector<int>>();
    else if (key == "d")
      s.d = val.get<int>();
    else if (key == "graph_seeds")
      s.graph_seeds = val.get<std::vector<std::uint64_t>>();
    else if (key == "rule")
      s.rule = val;
    else if (key == "init")
      s.init = val.get<std::string>();
    else if (key == "horizon")
      s.horizon = val.get<double>();
    else if (key == "replicas")
      s.replicas = val.get<int>();
    else if (key == "scan_every")
      s.scan_every = val.get<std::int64_t>();
    else if (key == "observe_every")
      s.observe_every = val.get<std::int64_t>();
    else if (key == "paranoid")
      s.paranoid = val.get<bool>();
    else if (key == "seed")
      s.seed = val.get<std::uint64_t>();
    else if (key == "out")
      s.out = val.get<std::string>();
    else if (key == "params")
      s.params = val;
    else
      throw std::invalid_argument("spec: unknown key '" + key + "'");
  }
  s.validate();
  return s;
}

json ExperimentSpec::to_json() const {
  return json{{"name", name},
              {"ns", ns},
              {"d", d},
              {"graph_seeds", graph_seeds},
              {"rule", rule},
              {"init", init},
              {"horizon", horizon},
              {"replicas", replicas},
              {"scan_every", scan_every},
              {"observe_every", observe_every},
              {"paranoid", paranoid},
              {"seed", seed},
              {"out", out},
              {"params", params}};
}

void ExperimentSpec::validate() const {
  if (std::find(kExperimentNames.begin(), kExperimentNames.end(), name) ==
      kExperimentNames.end())
    throw std::invalid_argument("spec: unknown experiment '" + name + "'");
  if (replicas < 1) throw std::invalid_argument("spec: replicas must be >= 1");
  if (scan_every < 0 || observe_every < 0)
    throw std::invalid_argument("spec: cadences must be >= 0");
  if (!std::isfinite(horizon))
    throw std::invalid_argument("spec: horizon must be finite");
  if (d < 1) throw std::invalid_argument("spec: d must be >= 1");
  if (name == "lemma_suite") return;
  if (ns.empty()) throw std::invalid_argument("spec: ns must be nonempty");
  const bool fixture_graph =
      name == "stationarity_oracle" &&
      params.value("fixture", "random") != "random";
  for (int n : ns) {
    if (n < 2) throw std::invalid_argument("spec: every n must be >= 2");
    if (!fixture_graph && n % 2 != 0 && d % 2 != 0)
      throw std::invalid_argument("spec: n*d must be even for every n");
  }
  if (graph_seeds.empty())
    throw std::invalid_argument("spec: graph_seeds must be nonempty");
}

// ---- rule and init parsing ----------------------------------------------

UpdateRule rule_from_json(int d, const json& j) {
  const std::string kind = j.value("kind", "ising");
  if (kind == "ising") return UpdateRule::ising(j.value("beta", 3.0), d);
  if (kind == "potts_dominating")
    return UpdateRule::potts_dominating(j.at("beta_p").get<double>(),
                                        j.value("q", 3), d);
  if (kind == "noisy_majority")
    return UpdateRule::noisy_majority(j.at("p").get<double>(), d);
  if (kind == "potts_glauber")
    return UpdateRule::potts_glauber(j.at("beta_p").get<double>(),
                                     j.value("q", 3), d);
  throw std::invalid_argument("rule: unknown kind '" + kind + "'");
}

json rule_json(const UpdateRule& r) {
  json j{{"kind", r.name()}, {"d", r.d}};
  switch (r.kind) {
    case RuleKind::ising:
      j["beta"] = r.beta;
      break;
    case RuleKind::potts_dominating:
      j["beta_p"] = r.beta_p;
      j["q"] = r.q;
      j["beta"] = r.beta;  // derived
      break;
    case RuleKind::noisy_majority:
      j["p"] = r.flip_noise;
      break;
    case RuleKind::potts_glauber:
      j["beta_p"] = r.beta_p;
      j["q"] = r.q;
      break;
  }
  return j;
}

TwoSpinConfig make_two_spin_init(const std::string& spec, int n,
                                 std::uint64_t seed) {
  if (spec == "all_plus") return TwoSpinConfig::all_plus(n);
  if (spec == "all_minus") return TwoSpinConfig::all_minus(n);
  if (spec.starts_with("biased:"))
    return TwoSpinConfig::biased(n, std::stod(spec.substr(7)), seed);
  if (spec.starts_with("file:"))
    return TwoSpinConfig::from_file(spec.substr(5), n);
  throw std::invalid_argument("init: unknown spec '" + spec + "'");
}

PottsConfig make_potts_init(const std::string& spec, int n, int q,
                            std::uint64_t seed) {
  if (spec == "all_plus" || spec == "all_one") return PottsConfig::all_one(n, q);
  if (spec.starts_with("biased:"))
    return PottsConfig::biased(n, q, std::stod(spec.substr(7)), seed);
  if (spec.starts_with("file:"))
    return PottsConfig::from_file(spec.substr(5), n, q);
  throw std::invalid_argument("init: unknown q-state spec '" + spec + "'");
}

// ---- sweep driver -------------------------------------------------------

std::vector<ExperimentRecord> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<Cell> cells;
  if (spec.name == "lemma_suite") {
    for (int r = 0; r < spec.replicas; ++r) cells.push_back({0, 0, r});
  } else {
    for (int n : spec.ns)
      for (std::uint64_t gs : spec.graph_seeds)
        for (int r = 0; r < spec.replicas; ++r) cells.push_back({n, gs, r});
  }

  std::vector<ExperimentRecord> records(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      records[i] = run_cell(spec, cells[i]);
    }
  };
  const int workers = worker_count(cells.size());
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  if (!spec.out.empty())
    for (const auto& rec : records) append_jsonl(spec.out, rec.to_json());
  return records;
}

// ---- summaries ----------------------------------------------------------

namespace {

struct GroupAcc {
  std::string experiment;
  int n = 0;
  int d = 0;
  std::string rule_kind;
  int count = 0;
  std::int64_t violations = 0;
  std::map<std::string, std::vector<double>> nums;
};

std::int64_t violation_weight(const json& v) {
  if (v.is_number()) {
    const double x = v.get<double>();
    return static_cast<std::int64_t>(std::llround(std::fabs(x)));
  }
  if (v.is_boolean()) return v.get<bool>() ? 1 : 0;
  return 1;  // error strings and anything else count once
}

}  // namespace

Summary summarize(const std::vector<json>& records) {
  if (records.empty()) throw std::runtime_error("summarize: no records");
  std::map<std::string, GroupAcc> groups;
  for (const auto& r : records) {
    GroupAcc probe;
    probe.experiment = r.value("experiment", "?");
    probe.n = r.value("n", 0);
    probe.d = r.value("d", 0);
    if (r.contains("rule") && r["rule"].is_object())
      probe.rule_kind = r["rule"].value("kind", "?");
    std::ostringstream key;
    key << probe.experiment << '|' << probe.rule_kind << "|d=" << probe.d
        << "|n=" << std::setw(9) << std::setfill('0') << probe.n;
    auto& grp = groups[key.str()];
    if (grp.count == 0) {
      grp.experiment = probe.experiment;
      grp.n = probe.n;
      grp.d = probe.d;
      grp.rule_kind = probe.rule_kind;
    }
    ++grp.count;
    if (r.contains("violations"))
      for (const auto& [k, v] : r["violations"].items()) {
        (void)k;
        grp.violations += violation_weight(v);
      }
    if (r.contains("observables"))
      for (const auto& [k, v] : r["observables"].items()) {
        if (v.is_number())
          grp.nums[k].push_back(v.get<double>());
        else if (v.is_boolean())
          grp.nums[k].push_back(v.get<bool>() ? 1.0 : 0.0);
      }
  }

  Summary sum;
  std::ostringstream text, csv;
  csv << "experiment,n,d,rule,count,violations,observable,median,q25,q75\n";
  // (experiment, rule, d) -> n -> median extinction time, for the growth fit
  std::map<std::string, std::map<int, double>> fit_series;
  for (const auto& [key, grp] : groups) {
    (void)key;
    sum.any_violation = sum.any_violation || grp.violations > 0;
    json jg{{"experiment", grp.experiment}, {"n", grp.n},     {"d", grp.d},
            {"rule", grp.rule_kind},        {"count", grp.count},
            {"violations", grp.violations}};
    json med = json::object(), q25 = json::object(), q75 = json::object();
    text << grp.experiment << " n=" << grp.n << " d=" << grp.d << " rule="
         << grp.rule_kind << " cells=" << grp.count
         << " violations=" << grp.violations << "\n";
    for (const auto& [name, xs] : grp.nums) {
      const double m = median(xs);
      med[name] = m;
      q25[name] = quantile(xs, 0.25);
      q75[name] = quantile(xs, 0.75);
      text << "  " << name << " median=" << m << " q25=" << q25[name].get<double>()
           << " q75=" << q75[name].get<double>() << " (" << xs.size() << " obs)\n";
      csv << grp.experiment << ',' << grp.n << ',' << grp.d << ','
          << grp.rule_kind << ',' << grp.count << ',' << grp.violations << ','
          << name << ',' << m << ',' << q25[name].get<double>() << ','
          << q75[name].get<double>() << "\n";
      if (name == "extinction_time")
        fit_series[grp.experiment + "|" + grp.rule_kind + "|" +
                   std::to_string(grp.d)][grp.n] = m;
    }
    jg["median"] = med;
    jg["q25"] = q25;
    jg["q75"] = q75;
    sum.groups.push_back(jg);
  }

  for (const auto& [key, series] : fit_series) {
    if (series.size() < 3) continue;
    std::vector<double> ns, ys;
    for (const auto& [n, y] : series) {
      ns.push_back(n);
      ys.push_back(y);
    }
    const SlopeFit fit = fit_log_slope(ns, ys);
    json jf{{"fit", true},
            {"series", key},
            {"observable", "extinction_time"},
            {"slope", fit.slope},
            {"intercept", fit.intercept},
            {"rms_residual", fit.rms_residual}};
    sum.groups.push_back(jf);
    text << "fit " << key << ": extinction_time ~ " << fit.slope
         << " ln n + " << fit.intercept << " (rms " << fit.rms_residual
         << ")\n";
  }

  sum.text = text.str();
  sum.csv = csv.str();
  return sum;
}

Summary summarize_path(const std::string& path) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
        files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  std::vector<json> records;
  for (const auto& f : files)
    for (auto& j : read_jsonl(f)) records.push_back(std::move(j));
  return summarize(records);
}

}  // namespace spinlab
