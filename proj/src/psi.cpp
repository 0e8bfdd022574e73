#include "spinlab/psi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace spinlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTol = 1e-9;  // slack allowed on log margins
constexpr int kWitnessCap = 32;

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

double PsiPmf::log_tail_beyond() const {
  const int k = kmax + 1;
  return -2.0 * std::log(k) - (g0 + g1 * k) * std::log(static_cast<double>(d)) -
         std::log1p(-std::pow(d, -g1));
}

PsiPmf make_psi(int d, double g0, double g1, int kmax) {
  if (d < 7) throw std::invalid_argument("psi: d must be >= 7");
  if (!(g0 >= 0)) throw std::invalid_argument("psi: g0 must be >= 0");
  if (!(g1 > 0)) throw std::invalid_argument("psi: g1 must be > 0");
  if (kmax < 1) throw std::invalid_argument("psi: kmax must be >= 1");
  PsiPmf p;
  p.d = d;
  p.g0 = g0;
  p.g1 = g1;
  p.kmax = kmax;
  p.log_mass.resize(kmax + 1);
  const double ld = std::log(static_cast<double>(d));
  for (int k = 1; k <= kmax; ++k)
    p.log_mass[k] = -2.0 * std::log(static_cast<double>(k)) - (g0 + g1 * k) * ld;
  // mass at zero takes the remainder; the truncated-away tail is charged to
  // the positive side so the total stays a (sub-)probability vector
  double rest = std::exp(p.log_tail_beyond());
  for (int k = kmax; k >= 1; --k) rest += std::exp(p.log_mass[k]);
  if (rest >= 1.0)
    throw std::domain_error("psi: exponents too small, positive mass exceeds 1");
  p.log_mass[0] = std::log1p(-rest);
  return p;
}

double psi_log(const PsiPmf& p, int k) {
  if (k < 0 || k > p.kmax)
    throw std::out_of_range("psi_log: k outside 0..kmax");
  return p.log_mass[k];
}

std::vector<double> convolve_log(const std::vector<double>& log_pmf, int q,
                                 int out_len) {
  if (log_pmf.empty()) throw std::invalid_argument("convolve: empty pmf");
  if (q < 1) throw std::invalid_argument("convolve: q must be >= 1");
  const int base = static_cast<int>(log_pmf.size()) - 1;
  const int full = q * base + 1;
  if (out_len < 0) out_len = full;
  if (out_len > full)
    throw std::out_of_range("convolve: requested support exceeds q*kmax");

  std::vector<double> cur = log_pmf;
  std::vector<double> next;
  for (int fold = 2; fold <= q; ++fold) {
    const int len = static_cast<int>(cur.size()) + base;
    next.assign(len, -kInf);
    for (int k = 0; k < len; ++k) {
      const int jlo = std::max(0, k - base);
      const int jhi = std::min<int>(cur.size() - 1, k);
      double m = -kInf;
      for (int j = jlo; j <= jhi; ++j)
        m = std::max(m, cur[j] + log_pmf[k - j]);
      if (m == -kInf) continue;
      double s = 0.0;
      for (int j = jlo; j <= jhi; ++j)
        s += std::exp(cur[j] + log_pmf[k - j] - m);
      next[k] = m + std::log(s);
    }
    cur.swap(next);
  }
  cur.resize(out_len);
  return cur;
}

Report verify_simple_convolution(const PsiPmf& p, int q, int kmax_check) {
  if (q < 1 || q > p.d)
    throw std::invalid_argument("simple convolution: need 1 <= q <= d");
  if (kmax_check < 1 || kmax_check > p.kmax)
    throw std::invalid_argument("simple convolution: need kmax_check <= pmf kmax");

  Report rep;
  rep.check = "simple_convolution";
  rep.params = {{"d", p.d}, {"g0", p.g0}, {"g1", p.g1},
                {"q", q},   {"kmax", kmax_check}};

  double fq = 0.0, term = 1.0;
  const double growth = 1.0 + 16.0 * std::pow(p.d, -p.g0);
  for (int i = 0; i < q; ++i) {
    fq += term;
    term *= growth;
  }
  const double log_fq = std::log(fq);

  const auto conv = convolve_log(p.log_mass, q, kmax_check + 1);
  double worst = kInf;
  int arg = -1;
  for (int k = 1; k <= kmax_check; ++k) {
    const double margin = (log_fq + psi_log(p, k)) - conv[k];
    if (margin < worst) {
      worst = margin;
      arg = k;
    }
    if (margin < -kTol && rep.witnesses.size() < kWitnessCap) {
      std::ostringstream os;
      os << "k=" << k << " margin=" << fmt(margin);
      rep.witnesses.push_back(os.str());
    }
  }
  rep.worst_margin = worst;
  rep.pass = worst >= -kTol;
  rep.extra = {{"f_q", fq}, {"argmin_k", arg}};
  return rep;
}

Report verify_psi_tail_bounds(const PsiPmf& p, int q, int kmax_check) {
  if (q < 1 || q > p.d)
    throw std::invalid_argument("tail bounds: need 1 <= q <= d");
  if (kmax_check < 0 || kmax_check + 1 > p.kmax)
    throw std::invalid_argument("tail bounds: need kmax_check + 1 <= pmf kmax");

  Report rep;
  rep.check = "psi_tail_bounds";
  rep.params = {{"d", p.d}, {"g0", p.g0}, {"g1", p.g1},
                {"q", q},   {"kmax", kmax_check}};

  // part (a): per-coordinate upper tails of the q-fold sum, inflated by the
  // truncation deficit, against sqrt(2) q psi_k; pairs then bound by products
  const auto conv = convolve_log(p.log_mass, q);
  std::vector<double> tail_log(kmax_check + 1, -kInf);
  double acc = -kInf;
  for (int j = static_cast<int>(conv.size()) - 1; j >= 0; --j) {
    acc = log_add(acc, conv[j]);
    if (j <= kmax_check) tail_log[j] = acc;
  }
  const double log_deficit = std::log(static_cast<double>(q)) + p.log_tail_beyond();
  double worst_a = kInf;
  int arg_a = -1;
  for (int k = 0; k <= kmax_check; ++k) {
    const double tail_up = std::min(log_add(tail_log[k], log_deficit), 0.0);
    const double margin =
        0.5 * std::log(2.0) + std::log(static_cast<double>(q)) + psi_log(p, k) -
        tail_up;
    if (margin < worst_a) {
      worst_a = margin;
      arg_a = k;
    }
    if (2.0 * margin < -kTol && rep.witnesses.size() < kWitnessCap) {
      std::ostringstream os;
      os << "part a: k=l=" << k << " pair margin=" << fmt(2.0 * margin);
      rep.witnesses.push_back(os.str());
    }
  }

  // part (b): joint law of (J, S1, S2) for q iid coordinate pairs, with sums
  // saturated at cap and J at 2; saturation only aggregates states, so the
  // probability of {J >= 2, S1 >= k, S2 >= l} is exact for k,l <= cap.  The
  // topmost draw class also absorbs the analytic tail above the truncation,
  // which can only inflate the left side.
  const int cap = std::max(kmax_check, 1);
  const int w = cap + 1;
  std::vector<double> cls(w);
  for (int c = 0; c < cap; ++c) cls[c] = std::exp(psi_log(p, c));
  double top = std::exp(p.log_tail_beyond());
  for (int j = p.kmax; j >= cap; --j) top += std::exp(psi_log(p, j));
  cls[cap] = top;

  std::vector<double> mass(3 * w * w, 0.0), next(3 * w * w);
  auto idx = [w](int j, int s1, int s2) { return (j * (w) + s1) * w + s2; };
  mass[idx(0, 0, 0)] = 1.0;
  for (int draw = 0; draw < q; ++draw) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int j = 0; j < 3; ++j)
      for (int s1 = 0; s1 < w; ++s1)
        for (int s2 = 0; s2 < w; ++s2) {
          const double m = mass[idx(j, s1, s2)];
          if (m == 0.0) continue;
          for (int c1 = 0; c1 < w; ++c1) {
            const double mw = m * cls[c1];
            const int t1 = std::min(s1 + c1, cap);
            for (int c2 = 0; c2 < w; ++c2) {
              const int jj = std::min(j + (c1 >= 1 && c2 >= 1), 2);
              next[idx(jj, t1, std::min(s2 + c2, cap))] += mw * cls[c2];
            }
          }
        }
    mass.swap(next);
  }

  // suffix sums of the saturated-J slab give P(J>=2, S1>=k, S2>=l)
  std::vector<double> suf(w * w, 0.0);
  for (int s1 = cap; s1 >= 0; --s1)
    for (int s2 = cap; s2 >= 0; --s2) {
      double v = mass[idx(2, s1, s2)];
      if (s1 < cap) v += suf[(s1 + 1) * w + s2];
      if (s2 < cap) v += suf[s1 * w + s2 + 1];
      if (s1 < cap && s2 < cap) v -= suf[(s1 + 1) * w + s2 + 1];
      suf[s1 * w + s2] = std::max(v, 0.0);
    }

  const bool narrow_exponents = (p.g1 >= 100.0 && p.g1 <= p.g0 / 10.0);
  double log_cb;
  if (narrow_exponents) {
    log_cb = -20.0 * std::log(static_cast<double>(p.d));
  } else {
    const double big_m = std::exp(p.log_mass[0]) +
                         std::pow(p.d, -p.g0) * (M_PI * M_PI / 6.0);
    const double log_c1 = std::log(64.0) + q * std::log(big_m) +
                          2.0 * std::log(static_cast<double>(q)) +
                          (p.g1 - p.g0) * std::log(static_cast<double>(p.d)) -
                          std::log1p(-std::pow(p.d, -p.g1));
    log_cb = 2.0 * log_c1;
  }

  double worst_b = kInf, max_ratio = -kInf;
  int arg_bk = -1, arg_bl = -1;
  std::int64_t positive_cells = 0;
  for (int k = 0; k <= kmax_check; ++k)
    for (int l = 0; l <= kmax_check; ++l) {
      const double lhs = suf[k * w + l];
      if (lhs <= 0.0) continue;
      ++positive_cells;
      const double log_ratio =
          std::log(lhs) - psi_log(p, k + 1) - psi_log(p, l + 1);
      const double margin = log_cb - log_ratio;
      if (log_ratio > max_ratio) {
        max_ratio = log_ratio;
        arg_bk = k;
        arg_bl = l;
      }
      if (margin < worst_b) worst_b = margin;
      if (margin < -kTol && rep.witnesses.size() < kWitnessCap) {
        std::ostringstream os;
        os << "part b: (k,l)=(" << k << "," << l << ") margin=" << fmt(margin);
        rep.witnesses.push_back(os.str());
      }
    }

  rep.worst_margin = std::min(2.0 * worst_a, worst_b);
  rep.pass = rep.worst_margin >= -kTol;
  rep.extra = {{"part_a_coord_margin", worst_a},
               {"part_a_argmin_k", arg_a},
               {"part_b_margin", worst_b == kInf ? 0.0 : worst_b},
               {"part_b_positive_cells", positive_cells},
               {"constant", narrow_exponents ? "d^-20" : "c1^2"},
               {"log_c_b", log_cb}};
  if (positive_cells > 0) {
    rep.extra["part_b_max_log_ratio"] = max_ratio;
    rep.extra["part_b_argmax"] = {arg_bk, arg_bl};
  }
  return rep;
}

Report check_potts_domination(double beta_p, double beta, int q, int d) {
  if (q < 2) throw std::invalid_argument("potts domination: q must be >= 2");
  if (d < 1) throw std::invalid_argument("potts domination: d must be >= 1");

  Report rep;
  rep.check = "potts_domination";
  rep.params = {{"beta_p", beta_p}, {"beta", beta}, {"q", q}, {"d", d}};

  const double floor_log = std::log1p(std::exp(-2.0 * beta * d / 7.0));
  const int k1_min = (4 * d + 6) / 7;  // smallest k1 with 7 k1 >= 4d

  double worst = kInf;
  std::vector<int> worst_counts;
  std::int64_t total = 0;
  std::vector<int> counts(q);

  auto evaluate = [&]() {
    ++total;
    double sum = 0.0;
    for (int r = 0; r < q; ++r)
      sum += std::exp(beta_p * (counts[r] - counts[0]));
    const double margin = floor_log - std::log(sum);
    if (margin < worst) {
      worst = margin;
      worst_counts = counts;
    }
    if (margin < -kTol && rep.witnesses.size() < kWitnessCap) {
      std::ostringstream os;
      os << "(";
      for (int r = 0; r < q; ++r) os << (r ? "," : "") << counts[r];
      os << ") margin=" << fmt(margin);
      rep.witnesses.push_back(os.str());
    }
  };

  auto recurse = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == q - 1) {
      counts[pos] = remaining;
      evaluate();
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      counts[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  for (int k1 = k1_min; k1 <= d; ++k1) {
    counts[0] = k1;
    recurse(recurse, 1, d - k1);
  }

  rep.worst_margin = worst;
  rep.pass = worst >= -kTol;
  rep.extra = {{"compositions", total}, {"argmin", worst_counts}};
  return rep;
}

Report verify_potts_domination(double beta_p, int q, int d) {
  if (q < 2) throw std::invalid_argument("potts domination: q must be >= 2");
  if (d < 1) throw std::invalid_argument("potts domination: d must be >= 1");
  const double beta =
      (beta_p - 7.0 * std::log(static_cast<double>(q - 1)) / d) / 2.0;
  if (!(beta > 0))
    throw std::invalid_argument(
        "potts domination: beta_p too small for this q and d");
  Report rep = check_potts_domination(beta_p, beta, q, d);
  rep.params["derived_beta"] = beta;
  return rep;
}

}  // namespace spinlab
