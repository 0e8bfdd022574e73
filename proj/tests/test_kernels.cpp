#include <cstdint>
#include <vector>

#include "doctest.h"
#include "spinlab/kernels.hpp"
#include "spinlab/rng.hpp"

using namespace spinlab;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = 2.0 * rng.u53() - 1.0;
  return v;
}

}  // namespace

TEST_CASE("kernels: hand-checked values on tiny inputs") {
  const double a[3] = {1.0, 2.0, 3.0};
  const double b[3] = {4.0, 5.0, 6.0};
  const auto& k = kernels::scalar();
  CHECK(k.dot(a, b, 3) == doctest::Approx(32.0));
  CHECK(k.sum(a, 3) == doctest::Approx(6.0));
  CHECK(k.abs_diff_sum(a, b, 3) == doctest::Approx(9.0));

  double y[3] = {1.0, 1.0, 1.0};
  k.axpy(2.0, a, y, 3);
  CHECK(y[0] == doctest::Approx(3.0));
  CHECK(y[2] == doctest::Approx(7.0));
  k.scal(0.5, y, 3);
  CHECK(y[0] == doctest::Approx(1.5));
  k.shift(1.0, y, 3);
  CHECK(y[0] == doctest::Approx(2.5));

  const std::int8_t s[5] = {1, -1, -1, 1, 1};
  CHECK(k.sum_i8(s, 5) == 1);
  CHECK(k.sum_i8(s, 0) == 0);
}

TEST_CASE("kernels: active implementation matches scalar on awkward lengths") {
  const auto& sc = kernels::scalar();
  const auto& ac = kernels::active();
  INFO("active impl: ", ac.name);
  // lengths straddling vector widths and remainders
  for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{3},
                        std::size_t{4}, std::size_t{7}, std::size_t{8},
                        std::size_t{17}, std::size_t{64}, std::size_t{200},
                        std::size_t{1003}}) {
    const auto a = random_vec(n, 11 + n);
    const auto b = random_vec(n, 29 + n);
    CHECK(ac.dot(a.data(), b.data(), n) ==
          doctest::Approx(sc.dot(a.data(), b.data(), n)).epsilon(1e-12));
    CHECK(ac.sum(a.data(), n) ==
          doctest::Approx(sc.sum(a.data(), n)).epsilon(1e-12));
    CHECK(ac.abs_diff_sum(a.data(), b.data(), n) ==
          doctest::Approx(sc.abs_diff_sum(a.data(), b.data(), n)).epsilon(1e-12));

    auto y1 = b, y2 = b;
    sc.axpy(0.75, a.data(), y1.data(), n);
    ac.axpy(0.75, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-14));

    auto z1 = a, z2 = a;
    sc.scal(-1.25, z1.data(), n);
    ac.scal(-1.25, z2.data(), n);
    sc.shift(0.3, z1.data(), n);
    ac.shift(0.3, z2.data(), n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(z1[i] == doctest::Approx(z2[i]).epsilon(1e-14));

    std::vector<std::int8_t> s(n);
    Rng rng(n + 5);
    for (auto& x : s) x = rng.u53() < 0.5 ? -1 : 1;
    CHECK(ac.sum_i8(s.data(), n) == sc.sum_i8(s.data(), n));
  }
}

TEST_CASE("kernels: dispatch reports a coherent implementation") {
  const auto& ac = kernels::active();
  if (kernels::avx2_active())
    CHECK(std::string(ac.name) == "avx2");
  else
    CHECK(std::string(ac.name) == "scalar");
  // the convenience wrappers route through the active impl
  const double a[4] = {1, 2, 3, 4};
  CHECK(kernels::sum(a, 4) == doctest::Approx(10.0));
}
