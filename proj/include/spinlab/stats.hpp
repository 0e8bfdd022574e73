#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace spinlab {

struct TracePoint {
  double t = 0.0;
  double value = 0.0;
};

// first time the predicate holds along a time-sorted trace, if ever
inline std::optional<double> hitting_time(
    const std::vector<TracePoint>& trace,
    const std::function<bool(double)>& pred) {
  for (const auto& p : trace)
    if (pred(p.value)) return p.t;
  return std::nullopt;
}

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

// least squares of ys against ln(ns)
inline SlopeFit fit_log_slope(const std::vector<double>& ns,
                              const std::vector<double>& ys) {
  if (ns.size() != ys.size() || ns.size() < 3)
    throw std::invalid_argument("slope fit: need >= 3 paired points");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(ns[i] > 0)) throw std::invalid_argument("slope fit: sizes must be positive");
    if (i > 0 && !(ns[i] > ns[i - 1]))
      throw std::invalid_argument("slope fit: sizes must be strictly increasing");
  }
  const std::size_t m = ns.size();
  double xbar = 0.0, ybar = 0.0;
  std::vector<double> xs(m);
  for (std::size_t i = 0; i < m; ++i) {
    xs[i] = std::log(ns[i]);
    xbar += xs[i];
    ybar += ys[i];
  }
  xbar /= m;
  ybar /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / m);
  return fit;
}

// interpolated order statistic, p in [0,1]
inline double quantile(std::vector<double> xs, double p) {
  if (xs.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p outside [0,1]");
  std::sort(xs.begin(), xs.end());
  const double pos = p * (xs.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= xs.size()) return xs.back();
  const double frac = pos - lo;
  return xs[lo] * (1.0 - frac) + xs[lo + 1] * frac;
}

inline double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

// Kolmogorov-Smirnov statistic of a sample against Exp(1)
inline double ks_exp1(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("ks: empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double cdf = 1.0 - std::exp(-xs[i]);
    worst = std::max({worst, cdf - i / n, (i + 1) / n - cdf});
  }
  return worst;
}

// chi-square statistic for observed counts against the uniform law
inline double chi_square_uniform(const std::vector<std::int64_t>& counts) {
  if (counts.size() < 2) throw std::invalid_argument("chi-square: need >= 2 cells");
  std::int64_t total = 0;
  for (std::int64_t c : counts) total += c;
  if (total <= 0) throw std::invalid_argument("chi-square: empty counts");
  const double expected = static_cast<double>(total) / counts.size();
  double stat = 0.0;
  for (std::int64_t c : counts) {
    const double r = c - expected;
    stat += r * r / expected;
  }
  return stat;
}

}  // namespace spinlab
