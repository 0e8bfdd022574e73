#include "spinlab/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spinlab/kernels.hpp"

namespace spinlab {

namespace {

constexpr std::size_t kMaxStates = std::size_t{1} << 20;

std::size_t potts_state_count(int n, int q) {
  std::size_t size = 1;
  for (int v = 0; v < n; ++v) {
    if (size > kMaxStates / static_cast<std::size_t>(q))
      throw std::invalid_argument("exact gibbs: state space larger than 2^20");
    size *= static_cast<std::size_t>(q);
  }
  return size;
}

std::vector<double> normalize_log_weights(std::vector<double> logw) {
  const double m = *std::max_element(logw.begin(), logw.end());
  double z = 0.0;
  for (double& x : logw) {
    x = std::exp(x - m);
    z += x;
  }
  for (double& x : logw) x /= z;
  return logw;
}

}  // namespace

int potts_state(std::size_t config, int v, int q) {
  for (int i = 0; i < v; ++i) config /= static_cast<std::size_t>(q);
  return 1 + static_cast<int>(config % static_cast<std::size_t>(q));
}

std::vector<double> exact_gibbs_ising(const Graph& g, double beta) {
  if (g.n > 20)
    throw std::invalid_argument("exact gibbs: state space larger than 2^20");
  const std::size_t size = std::size_t{1} << g.n;
  std::vector<double> logw(size);
  for (std::size_t c = 0; c < size; ++c) {
    int energy = 0;
    for (int u = 0; u < g.n; ++u)
      for (int w : g.neighbors(u))
        if (w > u) energy += ising_spin(c, u) * ising_spin(c, w);
    logw[c] = beta * energy;
  }
  return normalize_log_weights(std::move(logw));
}

std::vector<double> exact_gibbs_potts(const Graph& g, double beta_p, int q) {
  if (q < 2) throw std::invalid_argument("exact gibbs: q must be >= 2");
  const std::size_t size = potts_state_count(g.n, q);
  std::vector<double> logw(size);
  for (std::size_t c = 0; c < size; ++c) {
    int agree = 0;
    for (int u = 0; u < g.n; ++u)
      for (int w : g.neighbors(u))
        if (w > u) agree += (potts_state(c, u, q) == potts_state(c, w, q));
    logw[c] = beta_p * agree;
  }
  return normalize_log_weights(std::move(logw));
}

std::vector<double> exact_gibbs(const Graph& g, const UpdateRule& rule) {
  switch (rule.kind) {
    case RuleKind::ising:
      return exact_gibbs_ising(g, rule.beta);
    case RuleKind::potts_glauber:
      return exact_gibbs_potts(g, rule.beta_p, rule.q);
    default:
      throw std::invalid_argument(
          "exact gibbs: rule has no explicit stationary law");
  }
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& r) {
  if (p.size() != r.size())
    throw std::invalid_argument("tv distance: length mismatch");
  if (p.empty()) throw std::invalid_argument("tv distance: empty input");
  if (std::abs(kernels::sum(p.data(), p.size()) - 1.0) > 1e-9 ||
      std::abs(kernels::sum(r.data(), r.size()) - 1.0) > 1e-9)
    throw std::invalid_argument("tv distance: inputs must sum to 1");
  return 0.5 * kernels::abs_diff_sum(p.data(), r.data(), p.size());
}

std::vector<double> restrict_to_phase(
    const std::vector<double>& p, const std::function<bool(std::size_t)>& keep) {
  std::vector<double> out(p.size(), 0.0);
  double mass = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (keep(i)) {
      out[i] = p[i];
      mass += p[i];
    }
  if (mass <= 0.0) throw std::invalid_argument("restrict: null event");
  for (double& x : out) x /= mass;
  return out;
}

BalanceReport check_detailed_balance(const Graph& g, const UpdateRule& rule) {
  const std::vector<double> pi = exact_gibbs(g, rule);
  BalanceReport rep;
  rep.pass = true;

  auto track = [&](double fwd, double bwd, std::size_t c, int v) {
    const double scale = std::max({std::abs(fwd), std::abs(bwd), 1e-300});
    const double rel = std::abs(fwd - bwd) / scale;
    if (rel > rep.worst_rel) {
      rep.worst_rel = rel;
      if (rel > 1e-10) {
        rep.pass = false;
        rep.detail = "config " + std::to_string(c) + " vertex " +
                     std::to_string(v) + " rel " + std::to_string(rel);
      }
    }
  };

  if (rule.kind == RuleKind::ising) {
    std::int8_t buf[64];
    for (std::size_t c = 0; c < pi.size(); ++c)
      for (int v = 0; v < g.n; ++v) {
        const auto nb = g.neighbors(v);
        for (std::size_t k = 0; k < nb.size(); ++k)
          buf[k] = static_cast<std::int8_t>(ising_spin(c, nb[k]));
        const double pp = p_plus(rule, {buf, nb.size()});
        const std::size_t c2 = c ^ (std::size_t{1} << v);
        // flipping v does not change its neighborhood, so the reverse
        // update sees the same conditional probability
        const double fwd = pi[c] * (ising_spin(c2, v) == +1 ? pp : 1.0 - pp);
        const double bwd = pi[c2] * (ising_spin(c, v) == +1 ? pp : 1.0 - pp);
        track(fwd, bwd, c, v);
      }
    return rep;
  }

  if (rule.kind == RuleKind::potts_glauber) {
    std::uint8_t buf[64];
    std::size_t stride;
    for (std::size_t c = 0; c < pi.size(); ++c) {
      stride = 1;
      for (int v = 0; v < g.n; ++v, stride *= rule.q) {
        const auto nb = g.neighbors(v);
        for (std::size_t k = 0; k < nb.size(); ++k)
          buf[k] = static_cast<std::uint8_t>(potts_state(c, nb[k], rule.q));
        const auto cond = potts_conditional(rule.beta_p, rule.q, {buf, nb.size()});
        const int cur = potts_state(c, v, rule.q);
        for (int t = 1; t <= rule.q; ++t) {
          if (t == cur) continue;
          const std::size_t c2 = static_cast<std::size_t>(
              static_cast<long long>(c) +
              static_cast<long long>(stride) * (t - cur));
          track(pi[c] * cond[t - 1], pi[c2] * cond[cur - 1], c, v);
        }
      }
    }
    return rep;
  }

  throw std::invalid_argument("detailed balance: rule has no stationary law");
}

}  // namespace spinlab
