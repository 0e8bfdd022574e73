#include "spinlab/chain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "spinlab/kernels.hpp"
#include "spinlab/rng.hpp"

namespace spinlab {

namespace {

// ceil with a nudge so a product that should be integral but landed a few
// ulps high does not get rounded up a whole slot
std::int64_t ceil_count(double x) {
  return static_cast<std::int64_t>(std::ceil(x - 1e-9));
}

std::vector<std::int32_t> pick_uniform_subset(int n, std::int64_t k,
                                              std::uint64_t seed) {
  std::vector<std::int32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(seed, 0x696e6974));
  for (int i = n - 1; i > 0; --i)
    std::swap(order[i], order[rng.below(static_cast<std::uint64_t>(i + 1))]);
  order.resize(static_cast<std::size_t>(std::min<std::int64_t>(k, n)));
  return order;
}

}  // namespace

TwoSpinConfig TwoSpinConfig::all_plus(int n) {
  TwoSpinConfig c;
  c.spins.assign(n, +1);
  return c;
}

TwoSpinConfig TwoSpinConfig::all_minus(int n) {
  TwoSpinConfig c;
  c.spins.assign(n, -1);
  return c;
}

TwoSpinConfig TwoSpinConfig::biased(int n, double eps, std::uint64_t seed) {
  if (!(eps >= 0 && eps <= 1))
    throw std::invalid_argument("biased init: eps must be in [0,1]");
  TwoSpinConfig c;
  c.spins.assign(n, -1);
  const std::int64_t k = ceil_count((1.0 + eps) * n / 2.0);
  for (std::int32_t v : pick_uniform_subset(n, k, seed)) c.spins[v] = +1;
  return c;
}

TwoSpinConfig TwoSpinConfig::from_file(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("spin init: cannot open " + path);
  TwoSpinConfig c;
  c.spins.resize(n);
  for (int v = 0; v < n; ++v) {
    int s;
    if (!(in >> s) || (s != 1 && s != -1))
      throw std::runtime_error("spin init: expected n entries of +1/-1 in " + path);
    c.spins[v] = static_cast<std::int8_t>(s);
  }
  return c;
}

std::int64_t TwoSpinConfig::spin_sum() const {
  return kernels::sum_i8(spins.data(), spins.size());
}

bool TwoSpinConfig::leq(const TwoSpinConfig& other) const {
  for (std::size_t v = 0; v < spins.size(); ++v)
    if (spins[v] > other.spins[v]) return false;
  return true;
}

double magnetization_ising(const TwoSpinConfig& c) {
  return static_cast<double>(c.spin_sum()) / static_cast<double>(c.n());
}

PottsConfig PottsConfig::all_one(int n, int q) {
  PottsConfig c;
  c.q = q;
  c.states.assign(n, 1);
  return c;
}

PottsConfig PottsConfig::biased(int n, int q, double eps, std::uint64_t seed) {
  if (!(eps >= 0 && eps <= 1))
    throw std::invalid_argument("biased init: eps must be in [0,1]");
  PottsConfig c;
  c.q = q;
  c.states.resize(n);
  Rng rng(mix_seed(seed, 0x71696e69));
  for (int v = 0; v < n; ++v)
    c.states[v] = static_cast<std::uint8_t>(1 + rng.below(q));
  for (std::int32_t v : pick_uniform_subset(n, ceil_count(eps * n), seed))
    c.states[v] = 1;
  return c;
}

PottsConfig PottsConfig::from_file(const std::string& path, int n, int q) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("state init: cannot open " + path);
  PottsConfig c;
  c.q = q;
  c.states.resize(n);
  for (int v = 0; v < n; ++v) {
    int s;
    if (!(in >> s) || s < 1 || s > q)
      throw std::runtime_error("state init: expected n entries in 1..q in " + path);
    c.states[v] = static_cast<std::uint8_t>(s);
  }
  return c;
}

std::vector<std::int64_t> PottsConfig::counts() const {
  std::vector<std::int64_t> c(q, 0);
  for (std::uint8_t s : states) ++c[s - 1];
  return c;
}

double magnetization_potts(const PottsConfig& c) {
  const auto cnt = c.counts();
  std::int64_t rest = 0;
  for (int k = 1; k < c.q; ++k) rest = std::max(rest, cnt[k]);
  return static_cast<double>(cnt[0] - rest) / static_cast<double>(c.n());
}

ApplyResult apply_two_spin(TwoSpinConfig& cfg, const Graph& g,
                           const UpdateRule& rule, const UpdateEvent& ev,
                           const std::function<bool(std::int32_t)>& reject_hook) {
  const std::int32_t v = ev.vertex;
  std::int8_t buf[64];
  const auto nb = g.neighbors(v);
  for (std::size_t k = 0; k < nb.size(); ++k) buf[k] = cfg.spins[nb[k]];
  const double pp = p_plus(rule, {buf, nb.size()});

  ApplyResult res;
  res.old_spin = cfg.spins[v];
  res.new_spin = (ev.uniform <= 1.0 - pp) ? -1 : +1;
  if (res.new_spin == res.old_spin) return res;
  if (res.old_spin == -1 && res.new_spin == +1 && reject_hook && reject_hook(v)) {
    res.rejected = true;
    res.new_spin = res.old_spin;
    return res;
  }
  cfg.spins[v] = res.new_spin;
  res.changed = true;
  return res;
}

GrandCoupledResult run_grand_coupled(const Graph& g, const UpdateRule& rule,
                                     std::vector<TwoSpinConfig> inits,
                                     EventStream& stream, double horizon,
                                     const EngineOptions& opts) {
  const std::size_t m = inits.size();
  if (m == 0) throw std::invalid_argument("coupled run: no chains");
  for (const auto& c : inits)
    if (c.n() != g.n) throw std::invalid_argument("coupled run: config size mismatch");

  // record which ordered pairs start comparable; only those are law-bound
  std::vector<std::pair<int, int>> comparable;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i != j && inits[i].leq(inits[j]))
        comparable.emplace_back(static_cast<int>(i), static_cast<int>(j));

  GrandCoupledResult res;
  res.finals = std::move(inits);
  auto& chains = res.finals;

  auto note_violation = [&](int lo, int hi, std::int32_t v, double t) {
    ++res.order_violations;
    if (res.first_violation.empty()) {
      std::ostringstream os;
      os << "order violation: chain " << lo << " above chain " << hi
         << " at vertex " << v << " time " << t;
      res.first_violation = os.str();
    }
  };

  for (;;) {
    const UpdateEvent ev = stream.next();
    if (ev.time > horizon) break;
    ++res.events;
    for (auto& c : chains) apply_two_spin(c, g, rule, ev);
    for (auto [lo, hi] : comparable)
      if (chains[lo].spins[ev.vertex] > chains[hi].spins[ev.vertex])
        note_violation(lo, hi, ev.vertex, ev.time);
    if (opts.paranoid ||
        (opts.scan_every > 0 && res.events % opts.scan_every == 0))
      for (auto [lo, hi] : comparable)
        if (!chains[lo].leq(chains[hi])) note_violation(lo, hi, -1, ev.time);
    if (opts.on_event) opts.on_event(ev);
    if (opts.stop && opts.stop()) break;
  }
  return res;
}

SingleRunResult run_single(const Graph& g, const UpdateRule& rule,
                           TwoSpinConfig init, EventStream& stream,
                           double horizon, const EngineOptions& opts,
                           const SingleObserver& observe) {
  if (init.n() != g.n) throw std::invalid_argument("run: config size mismatch");
  SingleRunResult res;
  res.final = std::move(init);
  for (;;) {
    const UpdateEvent ev = stream.next();
    if (ev.time > horizon) break;
    ++res.events;
    const ApplyResult ra = apply_two_spin(res.final, g, rule, ev);
    res.flips += ra.changed;
    if (observe) observe(ev, ra, res.final);
    if (opts.on_event) opts.on_event(ev);
    if (opts.stop && opts.stop()) break;
  }
  return res;
}

SingleStoreResult run_single_with_store(const Graph& g, const UpdateRule& rule,
                                        TwoSpinConfig init, EventStream& stream,
                                        double horizon,
                                        const EngineOptions& opts,
                                        const StoreObserver& observe) {
  if (init.n() != g.n) throw std::invalid_argument("run: config size mismatch");
  SingleStoreResult res;
  res.final = std::move(init);
  res.store = ClusterStore(g, res.final.spins);
  auto& store = res.store;
  for (;;) {
    const UpdateEvent ev = stream.next();
    if (ev.time > horizon) break;
    ++res.events;
    const ApplyResult ra = apply_two_spin(res.final, g, rule, ev);
    if (ra.changed) {
      if (ra.new_spin == -1)
        store.on_flip_to_minus(g, ev.vertex, ev.time);
      else
        store.on_flip_to_plus(ev.vertex, ev.time);
    }
    if (observe) observe(ev, ra, res.final, store);
    if (opts.paranoid ||
        (opts.scan_every > 0 && res.events % opts.scan_every == 0)) {
      const ScanReport scan = store.full_scan(g);
      if (!scan.ok)
        throw std::logic_error("cluster store scan failed: " + scan.detail);
      for (int u = 0; u < g.n; ++u)
        if ((res.final.spins[u] == -1) != store.is_minus(u))
          throw std::logic_error("cluster store out of sync with spins");
    }
    if (opts.on_event) opts.on_event(ev);
    if (opts.stop && opts.stop()) break;
  }
  res.legacy_extinction_time = store.legacy_extinction_time();
  return res;
}

RigidPairResult run_rigid_pair(const Graph& g, const UpdateRule& rule,
                               EventStream& stream, double horizon, int R,
                               const EngineOptions& opts) {
  RigidPairResult res;
  res.final_standard = TwoSpinConfig::all_plus(g.n);
  res.final_rigid = TwoSpinConfig::all_plus(g.n);
  res.store_rigid = ClusterStore(g, res.final_rigid.spins);
  auto& std_chain = res.final_standard;
  auto& rigid_chain = res.final_rigid;
  auto& store = res.store_rigid;

  res.guard_active_throughout = is_one_locally_treelike(g, R);

  // The degree laws are statements about B_R(v) having at most one cycle, so
  // each vertex is guarded by its own ball, not by a global flag. R = 0 balls
  // carry no structure and the laws say nothing there.
  std::vector<char> ball_ok(g.n, 0);
  if (R >= 1)
    for (int v = 0; v < g.n; ++v)
      ball_ok[v] = ball(g, v, R).tree_excess <= 1;

  auto hook = [&](std::int32_t v) {
    const bool tri = store.is_trifurcation(g, v, R);
    if (tri) ++res.rejected_flips;
    return tri;
  };

  auto note_structural = [&](const char* law, std::int32_t v, double t) {
    ++res.structural_violations;
    if (res.first_structural_violation.empty()) {
      std::ostringstream os;
      os << law << " at vertex " << v << " time " << t;
      res.first_structural_violation = os.str();
    }
  };

  // Degree laws checked around a vertex whose neighborhood just changed:
  // (L1) a minus non-trifurcation vertex has <= 3 minus neighbors;
  // (L2) a plus vertex adjacent to a region whose accumulated projection is
  //      still <= R has <= 3 neighbors inside that region.
  auto check_vertex = [&](std::int32_t u, double t) {
    ++res.structural_checks;
    if (rigid_chain.spins[u] == -1) {
      int minus_nbrs = 0;
      for (int w : g.neighbors(u)) minus_nbrs += (rigid_chain.spins[w] == -1);
      if (minus_nbrs > 3 && !store.is_trifurcation(g, u, R))
        note_structural("minus degree law", u, t);
    } else {
      std::int64_t ids[64];
      int counts[64];
      int distinct = 0;
      for (int w : g.neighbors(u)) {
        const std::int64_t id = store.cluster_id(w);
        if (id < 0) continue;
        int k = 0;
        while (k < distinct && ids[k] != id) ++k;
        if (k == distinct) {
          ids[distinct] = id;
          counts[distinct++] = 1;
        } else {
          ++counts[k];
        }
      }
      for (int k = 0; k < distinct; ++k)
        if (counts[k] > 3 &&
            static_cast<std::int64_t>(
                store.cluster_by_id(ids[k]).projection.size()) <= R)
          note_structural("plus degree law", u, t);
    }
  };

  for (;;) {
    const UpdateEvent ev = stream.next();
    if (ev.time > horizon) break;
    ++res.events;
    const std::int32_t v = ev.vertex;

    apply_two_spin(std_chain, g, rule, ev);
    const ApplyResult ra = apply_two_spin(rigid_chain, g, rule, ev, hook);
    if (ra.changed) {
      if (ra.new_spin == -1)
        store.on_flip_to_minus(g, v, ev.time);
      else
        store.on_flip_to_plus(v, ev.time);
    }

    if (rigid_chain.spins[v] > std_chain.spins[v]) {
      std::ostringstream os;
      os << "domination violation: rigid spin above standard at vertex " << v
         << " time " << ev.time;
      throw DominationViolation(os.str());
    }

    if (!res.tau_R_time && store.tau_R_reached(R)) res.tau_R_time = ev.time;

    if (ball_ok[v]) check_vertex(v, ev.time);
    for (int w : g.neighbors(v))
      if (ball_ok[w]) check_vertex(w, ev.time);

    if (opts.paranoid ||
        (opts.scan_every > 0 && res.events % opts.scan_every == 0)) {
      if (!rigid_chain.leq(std_chain))
        throw DominationViolation("domination violation found by full scan");
      const ScanReport scan = store.full_scan(g);
      if (!scan.ok)
        throw std::logic_error("cluster store scan failed: " + scan.detail);
      for (int u = 0; u < g.n; ++u)
        if ((rigid_chain.spins[u] == -1) != store.is_minus(u))
          throw std::logic_error("cluster store out of sync with spins");
      for (int u = 0; u < g.n; ++u)
        if (ball_ok[u]) check_vertex(u, ev.time);
    }

    if (opts.on_event) opts.on_event(ev);
    if (opts.stop && opts.stop()) break;
  }
  res.guard_active_throughout =
      res.guard_active_throughout && !store.tau_R_reached(R);
  return res;
}

PottsTripleResult run_potts_triple(const Graph& g, const PottsConfig& y0,
                                   double beta_p, int q, EventStream& stream,
                                   double horizon, const EngineOptions& opts) {
  if (y0.n() != g.n) throw std::invalid_argument("triple run: config size mismatch");
  if (y0.q != q) throw std::invalid_argument("triple run: q mismatch");
  const UpdateRule rule_x = UpdateRule::potts_dominating(beta_p, q, g.d);

  PottsTripleResult res;
  res.final_free = y0;
  res.final_one = PottsConfig::all_one(g.n, q);
  res.final_x.spins.resize(g.n);
  for (int v = 0; v < g.n; ++v)
    res.final_x.spins[v] = (y0.states[v] == 1) ? +1 : -1;
  res.store_x = ClusterStore(g, res.final_x.spins);
  auto& yf = res.final_free;
  auto& y1 = res.final_one;
  auto& x = res.final_x;
  auto& store = res.store_x;

  for (int v = 0; v < g.n; ++v)
    res.current_disagreements += (yf.states[v] != y1.states[v]);
  if (store.legacy_extinct())
    res.legacy_extinction_time = store.legacy_extinction_time().value_or(0.0);

  auto note = [&](const char* what, std::int32_t v, double t,
                  std::int64_t& counter) {
    ++counter;
    if (res.first_violation.empty()) {
      std::ostringstream os;
      os << what << " at vertex " << v << " time " << t;
      res.first_violation = os.str();
    }
  };

  // interval partition lookup: state 1 first, then 2..q ascending
  auto pick_state = [&](const std::vector<double>& p, double u) {
    double cum = 0;
    for (int k = 0; k < q; ++k) {
      cum += p[k];
      if (u < cum) return static_cast<std::uint8_t>(k + 1);
    }
    return static_cast<std::uint8_t>(q);  // u landed in the rounding sliver
  };

  auto check_vertex = [&](std::int32_t u, double t) {
    if ((yf.states[u] != 1 || y1.states[u] != 1) && x.spins[u] != -1)
      note("support inclusion violated", u, t, res.support_violations);
    if (yf.states[u] != y1.states[u] && !store.in_legacy_region(u))
      note("disagreement outside the legacy region", u, t,
           res.disagreement_violations);
  };

  std::uint8_t nbr_f[64], nbr_1[64];
  std::int8_t nbr_x[64];

  for (;;) {
    const UpdateEvent ev = stream.next();
    if (ev.time > horizon) break;
    ++res.events;
    const std::int32_t v = ev.vertex;
    const auto nb = g.neighbors(v);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      nbr_f[k] = yf.states[nb[k]];
      nbr_1[k] = y1.states[nb[k]];
      nbr_x[k] = x.spins[nb[k]];
    }
    const auto pf = potts_conditional(beta_p, q, {nbr_f, nb.size()});
    const auto p1 = potts_conditional(beta_p, q, {nbr_1, nb.size()});
    const double px = p_plus(rule_x, {nbr_x, nb.size()});

    const bool disagreed = (yf.states[v] != y1.states[v]);
    const std::uint8_t sf = pick_state(pf, ev.uniform);
    const std::uint8_t s1 = pick_state(p1, ev.uniform);
    yf.states[v] = sf;
    y1.states[v] = s1;
    res.current_disagreements += (sf != s1) - disagreed;

    // plus interval at the bottom for the dominating chain
    const std::int8_t sx = (ev.uniform < px) ? +1 : -1;
    if (sx != x.spins[v]) {
      x.spins[v] = sx;
      if (sx == -1)
        store.on_flip_to_minus(g, v, ev.time);
      else
        store.on_flip_to_plus(v, ev.time);
    }

    if (!res.legacy_extinction_time && store.legacy_extinct())
      res.legacy_extinction_time =
          store.legacy_extinction_time().value_or(ev.time);

    check_vertex(v, ev.time);
    if (res.legacy_extinction_time && ev.time > *res.legacy_extinction_time &&
        sf != s1)
      ++res.post_extinction_disagreements;

    if (opts.paranoid ||
        (opts.scan_every > 0 && res.events % opts.scan_every == 0)) {
      for (int u = 0; u < g.n; ++u) check_vertex(u, ev.time);
      const ScanReport scan = store.full_scan(g);
      if (!scan.ok)
        throw std::logic_error("cluster store scan failed: " + scan.detail);
      for (int u = 0; u < g.n; ++u)
        if ((x.spins[u] == -1) != store.is_minus(u))
          throw std::logic_error("cluster store out of sync with spins");
    }

    if (opts.on_event) opts.on_event(ev);
    if (opts.stop && opts.stop()) break;
  }
  return res;
}

}  // namespace spinlab
