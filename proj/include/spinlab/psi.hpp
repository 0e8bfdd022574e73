#pragma once

#include <vector>

#include "spinlab/records.hpp"

namespace spinlab {

// truncated log-space pmf on {0,...,kmax} with polynomial-exponential decay:
// mass(k) = k^-2 * d^-(g0 + g1 k) for k >= 1 and mass(0) = 1 - (the rest)
struct PsiPmf {
  int d = 7;
  double g0 = 1000.0;
  double g1 = 100.0;
  int kmax = 200;
  std::vector<double> log_mass;  // size kmax + 1

  // log of a geometric upper bound on the mass above kmax
  double log_tail_beyond() const;
};

PsiPmf make_psi(int d, double g0, double g1, int kmax = 200);

double psi_log(const PsiPmf& p, int k);

// exact q-fold self-convolution of a truncated log-space pmf; the returned
// support is 0..out_len-1 (default: the full support q*(len-1)+1).  Entries
// at index k <= len-1 are exact for the untruncated distribution too, since
// no draw above the truncation can contribute to such a small sum.
std::vector<double> convolve_log(const std::vector<double>& log_pmf, int q,
                                 int out_len = -1);

// point-mass bound P(S_q = k) <= f_q * psi_k for 1 <= k <= kmax_check,
// where f_q = sum_{i<q} (1 + 16 d^-g0)^i
Report verify_simple_convolution(const PsiPmf& p, int q, int kmax_check);

// tail bounds for q iid pairs with independent psi coordinates:
//  (a) P(S1 >= k, S2 >= l) <= 2 q^2 psi_k psi_l, via the coordinate product
//  (b) P(J >= 2, S1 >= k, S2 >= l) <= c_b psi_{k+1} psi_{l+1}, where J counts
//      pairs with both coordinates >= 1, via an exact saturating joint DP
Report verify_psi_tail_bounds(const PsiPmf& p, int q, int kmax_check);

// enumerates neighborhood count vectors (k_1..k_q) summing to d with
// 7 k_1 >= 4d and checks the dominant-state update probability
// e^{beta_p k_1} / sum_r e^{beta_p k_r} against the floor 1/(1+e^{-2 beta d/7})
Report check_potts_domination(double beta_p, double beta, int q, int d);

// same check with beta derived as (beta_p - 7 ln(q-1)/d)/2; throws when that
// comes out nonpositive
Report verify_potts_domination(double beta_p, int q, int d);

}  // namespace spinlab
