// Single-site update rules. Two-spin rules map a neighbor configuration to
// the probability p_plus of resampling to +1; the Potts heat-bath rule gives
// the full conditional over states 1..q.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spinlab {

enum class RuleKind { ising, potts_dominating, noisy_majority, potts_glauber };

struct UpdateRule {
  RuleKind kind = RuleKind::ising;
  int d = 0;            // degree the rule is calibrated to
  double beta = 0;      // two-spin inverse temperature
  double beta_p = 0;    // Potts inverse temperature
  int q = 0;            // Potts state count
  double flip_noise = 0;  // noisy majority minority-follow probability

  static UpdateRule ising(double beta, int d);
  // beta is derived: beta = (beta_p - 7 ln(q-1)/d) / 2, and must be positive.
  static UpdateRule potts_dominating(double beta_p, int q, int d);
  static UpdateRule noisy_majority(double p, int d);
  static UpdateRule potts_glauber(double beta_p, int q, int d);

  bool two_spin() const { return kind != RuleKind::potts_glauber; }
  std::string name() const;
};

// The +1 resampling probability given the neighbor spins. Defined for any
// neighbor count (deficient vertices on tree fixtures use their true list).
double p_plus(const UpdateRule& rule, std::span<const std::int8_t> nbr_spins);

// Heat-bath conditional over states 1..q (index k-1), max-subtracted in the
// exponent so large beta_p stays finite; sums to 1 up to rounding.
std::vector<double> potts_conditional(double beta_p, int q,
                                      std::span<const std::uint8_t> nbr_states);

// Floor rate shared by the dominating construction: 1 / (1 + e^{-2 beta d/7}).
double minority_floor(double beta, int d);

}  // namespace spinlab
