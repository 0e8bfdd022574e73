#include <cmath>
#include <vector>

#include "doctest.h"
#include "spinlab/rng.hpp"
#include "spinlab/stats.hpp"

using namespace spinlab;

TEST_CASE("stats: hitting time scans a trace in order") {
  const std::vector<TracePoint> trace = {
      {0.5, 0.1}, {1.0, 0.4}, {2.0, 0.9}, {3.0, 0.95}};
  auto hit = hitting_time(trace, [](double v) { return v >= 0.9; });
  REQUIRE(hit.has_value());
  CHECK(*hit == doctest::Approx(2.0));
  CHECK_FALSE(hitting_time(trace, [](double v) { return v > 1.0; }).has_value());
  CHECK(*hitting_time(trace, [](double) { return true; }) ==
        doctest::Approx(0.5));
}

TEST_CASE("stats: exact log fit recovers slope and intercept with zero residual") {
  const std::vector<double> ns = {100, 200, 400, 800, 1600};
  std::vector<double> ys;
  for (double n : ns) ys.push_back(3.0 * std::log(n) + 2.0);
  const SlopeFit fit = fit_log_slope(ns, ys);
  CHECK(fit.slope == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.rms_residual == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("stats: noisy fit stays near the true slope") {
  const std::vector<double> ns = {100, 200, 400, 800, 1600, 3200};
  std::vector<double> ys;
  Rng rng(31);
  for (double n : ns)
    ys.push_back(2.0 * std::log(n) + 0.2 * (rng.u53() - 0.5));
  const SlopeFit fit = fit_log_slope(ns, ys);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(0.1));
  CHECK(fit.rms_residual < 0.2);
}

TEST_CASE("stats: slope fit rejects degenerate inputs") {
  CHECK_THROWS_AS(fit_log_slope({100, 200}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(fit_log_slope({100, 200, 200}, {1, 2, 3}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_log_slope({-1, 200, 400}, {1, 2, 3}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_log_slope({100, 200, 400}, {1, 2}),
                  std::invalid_argument);
}

TEST_CASE("stats: interpolated quantiles") {
  const std::vector<double> xs = {4.0, 1.0, 3.0, 2.0};  // unsorted on purpose
  CHECK(median(xs) == doctest::Approx(2.5));
  CHECK(quantile(xs, 0.25) == doctest::Approx(1.75));
  CHECK(quantile(xs, 0.75) == doctest::Approx(3.25));
  CHECK(quantile(xs, 0.0) == doctest::Approx(1.0));
  CHECK(quantile(xs, 1.0) == doctest::Approx(4.0));
  CHECK(median({7.0}) == doctest::Approx(7.0));
  CHECK_THROWS_AS(quantile({}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(quantile({1.0}, 1.5), std::invalid_argument);
}

TEST_CASE("stats: ks statistic against Exp(1)") {
  // inverse-cdf grid: about as exponential as a finite sample gets
  std::vector<double> xs;
  const int n = 2000;
  for (int i = 0; i < n; ++i)
    xs.push_back(-std::log(1.0 - (i + 0.5) / n));
  CHECK(ks_exp1(xs) < 1.0 / n + 1e-9);
  // constant sample is maximally non-exponential
  CHECK(ks_exp1(std::vector<double>(100, 50.0)) > 0.9);
  CHECK_THROWS_AS(ks_exp1({}), std::invalid_argument);
}

TEST_CASE("stats: chi-square against uniform") {
  CHECK(chi_square_uniform({10, 10}) == doctest::Approx(0.0));
  CHECK(chi_square_uniform({12, 8}) == doctest::Approx(0.8));
  CHECK(chi_square_uniform({20, 0}) == doctest::Approx(20.0));
  CHECK_THROWS_AS(chi_square_uniform({5}), std::invalid_argument);
  CHECK_THROWS_AS(chi_square_uniform({0, 0}), std::invalid_argument);
}
