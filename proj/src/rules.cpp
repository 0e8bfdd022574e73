#include "spinlab/rules.hpp"

#include <cmath>
#include <stdexcept>

namespace spinlab {

UpdateRule UpdateRule::ising(double beta, int d) {
  if (beta < 0) throw std::invalid_argument("rule: beta must be >= 0");
  if (d < 1) throw std::invalid_argument("rule: d must be >= 1");
  UpdateRule r;
  r.kind = RuleKind::ising;
  r.beta = beta;
  r.d = d;
  return r;
}

UpdateRule UpdateRule::potts_dominating(double beta_p, int q, int d) {
  if (q < 2) throw std::invalid_argument("rule: q must be >= 2");
  if (d < 1) throw std::invalid_argument("rule: d must be >= 1");
  UpdateRule r;
  r.kind = RuleKind::potts_dominating;
  r.beta_p = beta_p;
  r.q = q;
  r.d = d;
  r.beta = (beta_p - 7.0 * std::log(static_cast<double>(q - 1)) / d) / 2.0;
  if (!(r.beta > 0))
    throw std::invalid_argument(
        "rule: beta_p too small, derived beta = (beta_p - 7 ln(q-1)/d)/2 must be > 0");
  return r;
}

UpdateRule UpdateRule::noisy_majority(double p, int d) {
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("rule: p must be in [0,1]");
  if (d < 1) throw std::invalid_argument("rule: d must be >= 1");
  UpdateRule r;
  r.kind = RuleKind::noisy_majority;
  r.flip_noise = p;
  r.d = d;
  return r;
}

UpdateRule UpdateRule::potts_glauber(double beta_p, int q, int d) {
  if (q < 2) throw std::invalid_argument("rule: q must be >= 2");
  if (beta_p < 0) throw std::invalid_argument("rule: beta_p must be >= 0");
  UpdateRule r;
  r.kind = RuleKind::potts_glauber;
  r.beta_p = beta_p;
  r.q = q;
  r.d = d;
  return r;
}

std::string UpdateRule::name() const {
  switch (kind) {
    case RuleKind::ising: return "ising";
    case RuleKind::potts_dominating: return "potts_dominating";
    case RuleKind::noisy_majority: return "noisy_majority";
    case RuleKind::potts_glauber: return "potts_glauber";
  }
  return "?";
}

double minority_floor(double beta, int d) {
  return 1.0 / (1.0 + std::exp(-2.0 * beta * d / 7.0));
}

double p_plus(const UpdateRule& rule, std::span<const std::int8_t> nbr_spins) {
  const int m = static_cast<int>(nbr_spins.size());
  int plus = 0;
  for (std::int8_t s : nbr_spins) plus += (s > 0);
  const int sum = 2 * plus - m;

  switch (rule.kind) {
    case RuleKind::ising:
      // 1/(1+e^{-2 beta sum}); exp saturates cleanly at either end, so this
      // is exact-limit stable for beta well past 50.
      return 1.0 / (1.0 + std::exp(-2.0 * rule.beta * sum));
    case RuleKind::potts_dominating:
      // threshold #plus >= 4m/7 compared in integers
      if (7 * plus >= 4 * m) return minority_floor(rule.beta, m);
      return 0.0;
    case RuleKind::noisy_majority:
      if (sum > 0) return 1.0 - rule.flip_noise;
      if (sum < 0) return rule.flip_noise;
      return 0.5;
    case RuleKind::potts_glauber:
      throw std::invalid_argument("p_plus: not defined for the Potts heat-bath rule");
  }
  return 0.0;
}

std::vector<double> potts_conditional(double beta_p, int q,
                                      std::span<const std::uint8_t> nbr_states) {
  if (q < 2) throw std::invalid_argument("potts_conditional: q must be >= 2");
  std::vector<int> count(q, 0);
  for (std::uint8_t s : nbr_states) {
    if (s < 1 || s > q)
      throw std::invalid_argument("potts_conditional: state out of range");
    ++count[s - 1];
  }
  int cmax = 0;
  for (int c : count) cmax = std::max(cmax, c);
  std::vector<double> p(q);
  double z = 0;
  for (int k = 0; k < q; ++k) {
    p[k] = std::exp(beta_p * (count[k] - cmax));
    z += p[k];
  }
  for (double& v : p) v /= z;
  return p;
}

}  // namespace spinlab
