#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "levyspec/errors.hpp"
#include "levyspec/numerics.hpp"

using namespace levyspec;
using std::numbers::pi;

TEST_CASE("gauss-kronrod integrates polynomials and smooth functions") {
  auto r = integrate([](double x) { return x * x * x - 2.0 * x + 1.0; }, -1.0, 2.0);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(3.75 - 3.0 + 3.0).epsilon(1e-14));

  auto s = integrate([](double x) { return std::sin(x); }, 0.0, pi);
  CHECK(s.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("complex integrand") {
  auto r = integrate([](double u) { return std::exp(std::complex<double>(0.0, u)); }, 0.0, pi / 2.0);
  CHECK(r.value.real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.value.imag() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("semi-infinite integral") {
  auto r = integrate_to_infinity([](double x) { return std::exp(-x * x); }, 0.0, QuadOptions{1e-12});
  CHECK(r.value == doctest::Approx(std::sqrt(pi) / 2.0).epsilon(1e-11));
  auto c = integrate_to_infinity([](double x) { return 1.0 / (1.0 + x * x); }, 1.0, QuadOptions{1e-12});
  CHECK(c.value == doctest::Approx(pi / 4.0).epsilon(1e-11));
}

TEST_CASE("toward-zero integration of an integrable singularity") {
  // int_0^1 x^{-1/2} dx = 2
  auto r = integrate_toward_zero([](double x) { return 1.0 / std::sqrt(x); }, 1.0, std::pow(2.0, -0.5),
                                 QuadOptions{1e-10});
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));

  // without the ratio hint it still gets there by geometric extrapolation
  auto q = integrate_toward_zero([](double x) { return std::pow(x, -0.7); }, 1.0, std::nullopt, QuadOptions{1e-9});
  CHECK(q.value == doctest::Approx(1.0 / 0.3).epsilon(1e-7));
}

TEST_CASE("toward-zero integration flags divergence") {
  auto r = integrate_toward_zero([](double x) { return 1.0 / x; }, 1.0, std::nullopt, QuadOptions{1e-8});
  CHECK_FALSE(r.converged);
}

TEST_CASE("wynn epsilon accelerates an alternating series") {
  std::vector<double> sums;
  double s = 0.0;
  for (int k = 0; k < 20; ++k) {
    s += (k % 2 == 0 ? 1.0 : -1.0) / (k + 1.0);
    sums.push_back(s);
  }
  CHECK(wynn_epsilon(sums) == doctest::Approx(std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("oscillatory tail") {
  // int_1^inf sin(x)/x dx = pi/2 - Si(1)
  const double si1 = 0.946083070367183014941353313823;
  auto r = integrate_oscillatory_tail([](double x) { return std::sin(x) / x; }, 1.0, pi, QuadOptions{1e-10});
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(pi / 2.0 - si1).epsilon(1e-9));
}

TEST_CASE("upper incomplete gamma") {
  CHECK(upper_incomplete_gamma(1.0, 2.5) == doctest::Approx(std::exp(-2.5)).epsilon(1e-13));
  CHECK(upper_incomplete_gamma(0.5, 0.3) == doctest::Approx(std::sqrt(pi) * std::erfc(std::sqrt(0.3))).epsilon(1e-12));
  CHECK(upper_incomplete_gamma(0.5, 7.0) == doctest::Approx(std::sqrt(pi) * std::erfc(std::sqrt(7.0))).epsilon(1e-11));
  CHECK(upper_incomplete_gamma(3.0, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
  // Gamma(2, x) = (1 + x) e^-x
  for (double x : {0.1, 1.0, 3.0, 10.0, 40.0}) {
    CHECK(upper_incomplete_gamma(2.0, x) == doctest::Approx((1.0 + x) * std::exp(-x)).epsilon(1e-11));
  }
  // quadrature cross-check at a non-integer order
  const double a = 1.0 / 0.7, x = 0.4;
  auto q = integrate_to_infinity([&](double t) { return std::pow(t, a - 1.0) * std::exp(-t); }, x, QuadOptions{1e-13});
  CHECK(upper_incomplete_gamma(a, x) == doctest::Approx(q.value).epsilon(1e-10));
  CHECK_THROWS_AS(upper_incomplete_gamma(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(upper_incomplete_gamma(1.0, -1.0), DomainError);
}

TEST_CASE("stretched exponential tail") {
  CHECK(stretched_exp_tail(2.0, 1.0, 3.0) == doctest::Approx(std::exp(-6.0) / 2.0).epsilon(1e-13));
  CHECK(stretched_exp_tail(1.0, 2.0, 0.0) == doctest::Approx(std::sqrt(pi) / 2.0).epsilon(1e-13));
  auto q = integrate_to_infinity([](double u) { return std::exp(-0.8 * std::pow(u, 1.7)); }, 2.0, QuadOptions{1e-13});
  CHECK(stretched_exp_tail(0.8, 1.7, 2.0) == doctest::Approx(q.value).epsilon(1e-10));
}

TEST_CASE("log spaced grid") {
  const auto g = log_spaced(1e-4, 1.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == doctest::Approx(1e-4));
  CHECK(g[2] == doctest::Approx(1e-2));
  CHECK(g.back() == doctest::Approx(1.0));
}
