// Command-line front end: graph generation/audit, single trajectories,
// experiment sweeps, and the verification suites. Exit code is nonzero iff
// a requested check or run reported a violation.
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spinlab/chain.hpp"
#include "spinlab/events.hpp"
#include "spinlab/experiments.hpp"
#include "spinlab/gibbs.hpp"
#include "spinlab/graph.hpp"
#include "spinlab/psi.hpp"
#include "spinlab/records.hpp"
#include "spinlab/rng.hpp"

namespace {

using nlohmann::json;
using namespace spinlab;

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<std::int32_t> sample_subset(const Graph& g, std::int64_t size,
                                        Rng& rng) {
  std::vector<std::int32_t> verts(g.n);
  for (int v = 0; v < g.n; ++v) verts[v] = v;
  size = std::min<std::int64_t>(size, g.n);
  for (std::int64_t i = 0; i < size; ++i) {
    const auto j = i + static_cast<std::int64_t>(rng.below(g.n - i));
    std::swap(verts[i], verts[j]);
  }
  verts.resize(size);
  return verts;
}

void print_expansion(const ExpansionReport& rep) {
  std::cout << "  " << (rep.pass ? "[pass] " : "[FAIL] ") << rep.check
            << " |S|=" << rep.set_size << " offenders=" << rep.count
            << " bound=" << rep.bound << "\n";
}

int audit_graph(const std::string& path, int radius,
                const std::string& checks_csv, double lambda2_slack,
                int samples) {
  const Graph g = read_graph(path);
  const int R = radius >= 0 ? radius : audit_radius(g.n, g.d);
  std::cout << "graph n=" << g.n << " d=" << g.d << " seed=" << g.seed
            << " audit radius R=" << R << "\n";
  int failures = 0;
  for (const std::string& check : split_csv(checks_csv)) {
    if (check == "treelike") {
      std::vector<std::int32_t> violators;
      const bool ok = is_one_locally_treelike(g, R, &violators);
      std::cout << "  " << (ok ? "[pass]" : "[FAIL]")
                << " treelike: every radius-" << R
                << " ball has tree excess <= 1";
      if (!ok) std::cout << " (" << violators.size() << " violating centers)";
      std::cout << "\n";
      failures += !ok;
    } else if (check == "lambda2") {
      const Lambda2Report rep = estimate_lambda2(g);
      const double bound = 2.0 * std::sqrt(g.d - 1.0) + lambda2_slack;
      const bool ok = rep.converged && rep.estimate <= bound;
      std::cout << "  " << (ok ? "[pass]" : "[FAIL]")
                << " lambda2: " << rep.estimate << " vs bound " << bound
                << (rep.converged ? "" : " (power iteration not converged)")
                << "\n";
      failures += !ok;
    } else if (check == "expansion") {
      Rng rng(mix_seed(g.seed, 0x617564697400ull));
      const double gamma0 = 0.01, delta = 0.05, eta = 0.25;
      const double p_eta = 0.1, p_delta = 0.3;
      for (int s = 0; s < samples; ++s) {
        // majority-threshold sets up to the 10*gamma0*n cap
        const auto cap = static_cast<std::int64_t>(10.0 * gamma0 * g.n);
        if (cap >= 1) {
          const auto sz = 1 + static_cast<std::int64_t>(rng.below(cap));
          const auto rep =
              check_majority_expansion(g, sample_subset(g, sz, rng), gamma0);
          if (!rep.pass || s == 0) print_expansion(rep);
          failures += !rep.pass;
        }
        const auto dcap = static_cast<std::int64_t>(delta * g.n);
        if (dcap >= 1) {
          const auto sz = 1 + static_cast<std::int64_t>(rng.below(dcap));
          const auto rep = check_degree_expansion(g, sample_subset(g, sz, rng),
                                                  delta, eta);
          if (!rep.pass || s == 0) print_expansion(rep);
          failures += !rep.pass;
        }
        // full three-part partition with the required S1 margin
        const auto small = static_cast<std::int64_t>(
            g.n * (1.0 - p_delta) / 3.0);
        if (small >= 1) {
          const auto pool = sample_subset(g, g.n, rng);  // permutation
          std::vector<std::vector<std::int32_t>> parts(3);
          parts[0].assign(pool.begin(), pool.end() - 2 * small);
          parts[1].assign(pool.end() - 2 * small, pool.end() - small);
          parts[2].assign(pool.end() - small, pool.end());
          const auto rep = check_partition_expansion(g, parts, p_eta, p_delta);
          if (!rep.pass || s == 0) print_expansion(rep);
          failures += !rep.pass;
        }
      }
    } else {
      std::cout << "  [FAIL] unknown check '" << check << "'\n";
      ++failures;
    }
  }
  std::cout << (failures ? "audit: FAIL\n" : "audit: ok\n");
  return failures ? 1 : 0;
}

struct RunArgs {
  std::string graph_file;
  std::string rule_kind = "ising";
  double beta = 3.0;
  double beta_p = 2.0;
  int q = 3;
  double p = 0.0;
  std::string init = "all_plus";
  double horizon = 10.0;
  std::uint64_t seed = 1;
  std::string observers;
  std::int64_t observe_every = 1000;
  std::int64_t scan_every = 1000;
  bool paranoid = false;
  std::string out;
};

json rule_args_json(const RunArgs& a) {
  json j{{"kind", a.rule_kind}};
  if (a.rule_kind == "ising") j["beta"] = a.beta;
  if (a.rule_kind == "potts_dominating" || a.rule_kind == "potts_glauber") {
    j["beta_p"] = a.beta_p;
    j["q"] = a.q;
  }
  if (a.rule_kind == "noisy_majority") j["p"] = a.p;
  return j;
}

int run_trajectory(const RunArgs& a) {
  const Graph g = read_graph(a.graph_file);
  const UpdateRule rule = rule_from_json(g.d, rule_args_json(a));
  if (!rule.two_spin())
    throw std::runtime_error(
        "run: q-state chains run through 'experiment run' with the "
        "potts_coupling experiment");
  bool want_mag = false, want_clusters = false;
  for (const auto& ob : split_csv(a.observers)) {
    if (ob == "mag")
      want_mag = true;
    else if (ob == "clusters")
      want_clusters = true;
    else
      throw std::runtime_error("run: unknown observer '" + ob + "'");
  }

  TwoSpinConfig init = make_two_spin_init(a.init, g.n, a.seed);
  std::int64_t ssum = init.spin_sum();
  EventStream stream(a.seed, g.n);
  EngineOptions opts;
  opts.scan_every = static_cast<int>(a.scan_every);
  opts.paranoid = a.paranoid;

  json rec;
  rec["command"] = "run";
  rec["graph"] = {{"n", g.n}, {"d", g.d}, {"seed", g.seed}};
  rec["rule"] = rule_json(rule);
  rec["init"] = a.init;
  rec["horizon"] = a.horizon;
  rec["stream_seed"] = a.seed;
  rec["generator"] = kGeneratorName;
  json obs = json::object();

  std::vector<double> tt, tm, t_minus, t_clusters, t_legacy_alive,
      t_legacy_size, t_max_region, t_max_projection;
  std::int64_t seen = 0;
  const auto cadence = a.observe_every;

  if (want_clusters) {
    auto observe = [&](const UpdateEvent& ev, const ApplyResult& ra,
                       const TwoSpinConfig&, const ClusterStore& st) {
      ++seen;
      if (ra.changed) ssum += 2 * ra.new_spin;
      if (cadence > 0 && seen % cadence == 0) {
        tt.push_back(ev.time);
        if (want_mag) tm.push_back(static_cast<double>(ssum) / g.n);
        t_minus.push_back(static_cast<double>(st.n_minus()));
        t_clusters.push_back(static_cast<double>(st.n_live()));
        t_legacy_alive.push_back(static_cast<double>(st.legacy_alive()));
        t_legacy_size.push_back(static_cast<double>(st.legacy_vertex_count()));
        t_max_region.push_back(static_cast<double>(st.max_region_live()));
        t_max_projection.push_back(
            static_cast<double>(st.max_projection_live()));
      }
    };
    const SingleStoreResult out = run_single_with_store(
        g, rule, std::move(init), stream, a.horizon, opts, observe);
    obs["events"] = out.events;
    obs["final_magnetization"] = magnetization_ising(out.final);
    obs["final_minus"] = out.store.n_minus();
    obs["live_clusters"] = out.store.n_live();
    obs["dead_clusters"] = out.store.dead().size();
    obs["legacy_extinct"] = out.legacy_extinction_time.has_value();
    if (out.legacy_extinction_time)
      obs["extinction_time"] = *out.legacy_extinction_time;
    obs["max_projection"] = out.store.max_projection_running();
    json trace{{"t", tt},
               {"n_minus", t_minus},
               {"n_clusters", t_clusters},
               {"legacy_alive", t_legacy_alive},
               {"legacy_size", t_legacy_size},
               {"max_region", t_max_region},
               {"max_projection", t_max_projection}};
    if (want_mag) trace["m"] = tm;
    obs["trace"] = trace;
  } else {
    auto observe = [&](const UpdateEvent& ev, const ApplyResult& ra,
                       const TwoSpinConfig&) {
      ++seen;
      if (ra.changed) ssum += 2 * ra.new_spin;
      if (want_mag && cadence > 0 && seen % cadence == 0) {
        tt.push_back(ev.time);
        tm.push_back(static_cast<double>(ssum) / g.n);
      }
    };
    const SingleRunResult out = run_single(g, rule, std::move(init), stream,
                                           a.horizon, opts, observe);
    obs["events"] = out.events;
    obs["flips"] = out.flips;
    obs["final_magnetization"] = magnetization_ising(out.final);
    if (want_mag) obs["trace"] = {{"t", tt}, {"m", tm}};
  }
  rec["observables"] = obs;

  if (!a.out.empty()) append_jsonl(a.out, rec);
  std::cout << "run: n=" << g.n << " events=" << obs["events"]
            << " final_m=" << obs["final_magnetization"] << "\n";
  return 0;
}

int verify_lemmas() {
  ExperimentSpec spec;
  spec.name = "lemma_suite";
  spec.seed = 7;
  const auto records = run_experiment(spec);
  int failures = 0;
  for (const auto& rec : records) {
    for (const auto& row : rec.observables["checks"]) {
      const bool pass = row["pass"].get<bool>();
      std::cout << "  " << (pass ? "[pass] " : "[FAIL] ")
                << row["check"].get<std::string>()
                << " margin=" << row["worst_margin"].get<double>();
      if (row.contains("first_witness"))
        std::cout << " witness: " << row["first_witness"].get<std::string>();
      std::cout << "\n";
      failures += !pass;
    }
    if (rec.violations.contains("error")) {
      std::cout << "  [FAIL] " << rec.violations["error"].get<std::string>()
                << "\n";
      ++failures;
    }
  }
  return failures;
}

int verify_invariants() {
  int failures = 0;
  auto report = [&](bool ok, const std::string& what,
                    const std::string& detail) {
    std::cout << "  " << (ok ? "[pass] " : "[FAIL] ") << what;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    failures += !ok;
  };

  {  // monotone coupling: three ordered chains stay ordered, every event scanned
    const Graph g = generate_random_regular(200, 7, 11);
    const UpdateRule rule = UpdateRule::ising(0.5, g.d);
    std::vector<TwoSpinConfig> inits;
    inits.push_back(TwoSpinConfig::all_minus(g.n));
    inits.push_back(TwoSpinConfig::biased(g.n, 0.5, 21));
    inits.push_back(TwoSpinConfig::all_plus(g.n));
    EventStream stream(31, g.n);
    EngineOptions opts;
    opts.paranoid = true;
    const auto out =
        run_grand_coupled(g, rule, std::move(inits), stream, 10.0, opts);
    report(out.order_violations == 0, "monotone coupling order",
           out.first_violation);
  }
  {  // standard/rigid pair: domination plus the structural degree laws
    const Graph g = generate_random_regular(500, 7, 13);
    const UpdateRule rule = UpdateRule::ising(0.4, g.d);
    EventStream stream(33, g.n);
    EngineOptions opts;
    opts.scan_every = 200;
    std::string detail;
    bool ok = true;
    try {
      const auto out = run_rigid_pair(g, rule, stream, 10.0, 1, opts);
      ok = out.structural_violations == 0;
      detail = out.first_structural_violation;
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    report(ok, "rigid pair domination and degree laws", detail);
  }
  {  // three-chain q-state coupling: support and disagreement inclusions
    const Graph g = generate_random_regular(200, 7, 17);
    const PottsConfig y0 = PottsConfig::biased(g.n, 3, 0.9, 23);
    EventStream stream(37, g.n);
    EngineOptions opts;
    opts.scan_every = 200;
    std::string detail;
    bool ok = true;
    try {
      const auto out = run_potts_triple(g, y0, 2.0 + std::log(2.0), 3, stream,
                                        10.0, opts);
      ok = out.support_violations == 0 && out.disagreement_violations == 0;
      detail = out.first_violation;
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    report(ok, "three-chain coupling inclusions", detail);
  }
  return failures;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spinlab: Glauber dynamics and spacetime clusters on random "
               "regular graphs"};
  app.require_subcommand(1);
  int rc = 0;

  // graph gen / audit
  auto* graph_cmd = app.add_subcommand("graph", "generate or audit graphs");
  graph_cmd->require_subcommand(1);
  int gen_n = 0, gen_d = 7;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  auto* gen = graph_cmd->add_subcommand("gen", "write a random regular graph");
  gen->add_option("--n", gen_n, "vertex count")->required();
  gen->add_option("--d", gen_d, "degree");
  gen->add_option("--seed", gen_seed, "generation seed");
  gen->add_option("--out", gen_out, "output path")->required();
  gen->callback([&] {
    write_graph(gen_out, generate_random_regular(gen_n, gen_d, gen_seed));
    std::cout << "wrote " << gen_out << " (n=" << gen_n << " d=" << gen_d
              << " seed=" << gen_seed << ")\n";
  });

  std::string audit_in, audit_checks = "treelike,lambda2,expansion";
  int audit_r = -1, audit_samples = 20;
  double audit_slack = 0.2;
  auto* audit = graph_cmd->add_subcommand("audit", "structural checks");
  audit->add_option("--in", audit_in, "graph file")->required();
  audit->add_option("--radius", audit_r,
                    "ball radius (default: floor(ln n / 4 ln d))");
  audit->add_option("--checks", audit_checks, "comma list");
  audit->add_option("--lambda2-slack", audit_slack,
                    "slack over 2 sqrt(d-1)");
  audit->add_option("--samples", audit_samples, "expansion sample rounds");
  audit->callback([&] {
    rc = audit_graph(audit_in, audit_r, audit_checks, audit_slack,
                     audit_samples);
  });

  // run
  RunArgs ra;
  auto* run = app.add_subcommand("run", "single trajectory on a graph file");
  run->add_option("--graph", ra.graph_file, "graph file")->required();
  run->add_option("--rule", ra.rule_kind,
                  "ising|potts_dominating|noisy_majority");
  run->add_option("--beta", ra.beta, "two-spin inverse temperature");
  run->add_option("--beta-p", ra.beta_p, "q-state inverse temperature");
  run->add_option("--q", ra.q, "state count");
  run->add_option("--p", ra.p, "minority-follow probability");
  run->add_option("--init", ra.init,
                  "all_plus|all_minus|biased:EPS|file:PATH");
  run->add_option("--horizon", ra.horizon, "run length in chain time");
  run->add_option("--seed", ra.seed, "stream and init seed");
  run->add_option("--observers", ra.observers, "comma list: mag,clusters");
  run->add_option("--observe-every", ra.observe_every,
                  "trace cadence in events");
  run->add_option("--scan-every", ra.scan_every,
                  "invariant scan cadence in events");
  run->add_flag("--paranoid", ra.paranoid, "scan after every event");
  run->add_option("--out", ra.out, "append record to this jsonl file");
  run->callback([&] { rc = run_trajectory(ra); });

  // experiment run / summarize
  auto* exp = app.add_subcommand("experiment", "configured sweeps");
  exp->require_subcommand(1);
  std::string spec_file;
  auto* exp_run = exp->add_subcommand("run", "run a spec file");
  exp_run->add_option("--spec", spec_file, "json spec")->required();
  exp_run->callback([&] {
    std::ifstream in(spec_file);
    if (!in) throw std::runtime_error("experiment: cannot open " + spec_file);
    json j;
    in >> j;
    const ExperimentSpec spec = ExperimentSpec::from_json(j);
    const auto records = run_experiment(spec);
    std::vector<json> rows;
    rows.reserve(records.size());
    for (const auto& r : records) rows.push_back(r.to_json());
    const Summary sum = summarize(rows);
    std::cout << sum.text;
    if (!spec.out.empty())
      std::cout << "appended " << records.size() << " records to " << spec.out
                << "\n";
    rc = sum.any_violation ? 1 : 0;
  });

  std::string sum_in, sum_csv;
  auto* exp_sum = exp->add_subcommand("summarize", "aggregate records");
  exp_sum->add_option("--in", sum_in, "jsonl file or directory")->required();
  exp_sum->add_option("--csv", sum_csv, "also write csv here");
  exp_sum->callback([&] {
    const Summary sum = summarize_path(sum_in);
    std::cout << sum.text;
    if (!sum_csv.empty()) {
      std::ofstream out(sum_csv);
      if (!out) throw std::runtime_error("summarize: cannot open " + sum_csv);
      out << sum.csv;
    }
    rc = sum.any_violation ? 1 : 0;
  });

  // verify
  std::string suite = "all";
  auto* verify = app.add_subcommand("verify", "lemma and invariant suites");
  verify->add_option("--suite", suite, "lemmas|invariants|all");
  verify->callback([&] {
    int failures = 0;
    if (suite == "lemmas" || suite == "all") {
      std::cout << "lemma suite:\n";
      failures += verify_lemmas();
    }
    if (suite == "invariants" || suite == "all") {
      std::cout << "invariant suite:\n";
      failures += verify_invariants();
    }
    if (suite != "lemmas" && suite != "invariants" && suite != "all")
      throw std::runtime_error("verify: unknown suite '" + suite + "'");
    std::cout << (failures ? "verify: FAIL\n" : "verify: ok\n");
    rc = failures ? 1 : 0;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "spinlab: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
