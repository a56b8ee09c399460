#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "levyspec/errors.hpp"
#include "levyspec/sampling.hpp"
#include "levyspec/spectral.hpp"

using namespace levyspec;
using std::numbers::pi;

namespace {

IncrementSample sample_of(std::initializer_list<double> xs) {
  IncrementSample s;
  s.values.resize(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) s.values[i++] = x;
  return s;
}

ECFGrid constant_ecf(const UGrid& g, Complex c, Eigen::Index n = 100) {
  ECFGrid e;
  e.grid = g;
  e.n = n;
  e.values = Eigen::ArrayXcd::Constant(g.size(), c);
  return e;
}

ECFGrid cf_on_grid(const UGrid& g, double delta) {
  ECFGrid e = constant_ecf(g, 1.0);
  for (Eigen::Index i = 0; i < g.size(); ++i) e.values[i] = std::exp(-delta * std::abs(g.point(i)));
  return e;
}

IncrementSample cauchy_sample(double delta, Eigen::Index n, std::uint64_t seed) {
  return sample_increments(LevyTriplet{0.0, 0.0, StableJumpDensity{1.0 / pi, 1.0 / pi, 1.0}}, delta, n,
                           SeedSpec{seed, 0});
}

}  // namespace

TEST_CASE("u grid") {
  const UGrid g = UGrid::symmetric(10.0, 0.05);
  CHECK(g.size() == 401);
  CHECK(g.point(200) == 0.0);
  CHECK(g.point(0) == doctest::Approx(-10.0));
  CHECK(g.point(400) == doctest::Approx(10.0));
  for (Eigen::Index i = 0; i < g.size(); ++i) CHECK(g.point(i) == -g.point(g.size() - 1 - i));
  CHECK(UGrid::with_default_step(100.0).step() == 0.1);
  CHECK(UGrid::with_default_step(10.0).step() == 0.05);
  CHECK(g.clipped(3.01).u_max() == doctest::Approx(3.0));
  CHECK(g.clipped(50.0) == g);
  CHECK_THROWS_AS(UGrid::symmetric(1.0, 0.3), DomainError);
  CHECK_THROWS_AS(UGrid::symmetric(1.0, 0.0), DomainError);
}

TEST_CASE("ECF of trivial samples") {
  const UGrid g = UGrid::symmetric(5.0, 0.1);
  const double x = 1.37;
  const ECFGrid one = ecf(sample_of({x}), g);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    CHECK(std::abs(one.values[i] - std::polar(1.0, g.point(i) * x)) < 1e-13);
  }
  const double a = 2.2;
  const ECFGrid pair = ecf(sample_of({a, -a}), g);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    CHECK(std::abs(pair.values[i] - std::cos(a * g.point(i))) < 1e-13);
  }
}

TEST_CASE("ECF invariants on a random sample") {
  const auto s = cauchy_sample(0.3, 777, 5);
  const UGrid g = UGrid::symmetric(100.0, 0.1);
  const ECFGrid e = ecf(s, g);
  const Eigen::Index K = g.half_count();
  CHECK(e.values[K] == Complex(1.0, 0.0));
  CHECK(e.n == 777);
  for (Eigen::Index k = 0; k <= K; ++k) {
    CHECK(std::abs(e.values[K + k]) <= 1.0);
    CHECK(e.values[K - k] == std::conj(e.values[K + k]));
  }
  // direct evaluation of the defining sum as the oracle
  for (Eigen::Index k : {1, 63, 64, 65, 500, 1000}) {
    Complex direct = 0.0;
    for (Eigen::Index j = 0; j < s.n(); ++j) direct += std::polar(1.0, g.point(K + k) * s.values[j]);
    direct /= double(s.n());
    CHECK(std::abs(e.values[K + k] - direct) < 1e-12);
  }
}

TEST_CASE("Dirichlet kernel identity") {
  const Eigen::ArrayXd x = Eigen::ArrayXd::LinSpaced(301, -15.0, 15.0);
  for (double m : {3.0, 2.97, 10.0}) {
    const SpectralEstimate est = spectral_estimate(constant_ecf(UGrid::symmetric(10.0, 0.05), 1.0), m, x);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double expect = x[i] == 0.0 ? m / pi : std::sin(m * x[i]) / (pi * x[i]);
      CHECK(std::abs(est.values[i] - expect) < 1e-10);
    }
    CHECK(est.imag_residual < 1e-12);
  }
}

TEST_CASE("inversion of exp(-Delta |u|) at zero") {
  const double delta = 0.8;
  const UGrid g = UGrid::symmetric(10.0, 0.05);
  const Eigen::ArrayXd x0 = Eigen::ArrayXd::Zero(1);
  for (double m : {1.0, 4.0, 10.0}) {
    const SpectralEstimate est = spectral_estimate(cf_on_grid(g, delta), m, x0);
    // piecewise-linear interpolation error O(h^2) against the exact integral
    CHECK(est.values[0] == doctest::Approx((1.0 - std::exp(-delta * m)) / (pi * delta)).epsilon(1e-4));
  }
}

TEST_CASE("cut-off beyond the grid is rejected") {
  const UGrid g = UGrid::symmetric(10.0, 0.05);
  CHECK_THROWS_AS(spectral_estimate(constant_ecf(g, 1.0), 10.5, Eigen::ArrayXd::Zero(1)), DomainError);
}

TEST_CASE("cut-off estimate of a large Cauchy sample") {
  const double delta = 1.0;
  const Eigen::Index n = 20000;
  const auto s = cauchy_sample(delta, n, 17);
  const UGrid g = UGrid::symmetric(10.0, 0.05);
  const Eigen::ArrayXd x = Eigen::ArrayXd::LinSpaced(41, -4.0, 4.0);
  const SpectralEstimate est = spectral_estimate(ecf(s, g), g.u_max(), x);
  // pointwise MC standard error of the estimator: sd of (1/2pi) int_{-m}^m cos(u(X - x)) du / sqrt(n)
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double truth = delta / (pi * (x[i] * x[i] + delta * delta));
    Eigen::ArrayXd kern = (g.u_max() * (s.values - x[i])).sin() / (pi * (s.values - x[i]));
    const double se = std::sqrt((kern - kern.mean()).square().mean() / double(n));
    // bias e^{-10}/pi is far below the standard error
    CHECK(std::abs(est.values[i] - truth) < 3.0 * se + 1e-4);
  }
  CHECK(est.imag_residual <= 1e-8 * est.values.abs().maxCoeff());
}

TEST_CASE("threshold_cf") {
  const UGrid g = UGrid::symmetric(1.0, 1.0);
  ECFGrid e = constant_ecf(g, 0.0, 100);
  e.values << 0.5, 1.0, 0.01;
  const ThresholdSpec spec{0.0, 100};  // level 0.1
  CHECK(spec.level() == doctest::Approx(0.1));
  const ECFGrid t = threshold_cf(e, spec);
  CHECK(t.values[0] == Complex(0.5));
  CHECK(t.values[1] == Complex(1.0));
  CHECK(t.values[2] == Complex(0.0));

  const ThresholdSpec huge = ThresholdSpec::make(100.0, 100);
  CHECK(huge.level() > 1.0);
  CHECK((threshold_cf(e, huge).values == Complex(0.0)).all());
  CHECK_THROWS_AS(threshold_cf(e, ThresholdSpec::make(1.0, 99)), DomainError);
}

TEST_CASE("threshold keeps the origin at kappa = 0") {
  const auto s = cauchy_sample(1.0, 50, 1);
  const UGrid g = UGrid::symmetric(10.0, 0.05);
  const ECFGrid t = threshold_cf(ecf(s, g), ThresholdSpec::make(0.0, 50));
  CHECK(t.values[g.half_count()] == Complex(1.0, 0.0));
}

TEST_CASE("threshold kept-sets shrink as kappa grows") {
  const auto s = cauchy_sample(1.0, 1000, 2);
  const UGrid g = UGrid::symmetric(10.0, 0.05);
  const ECFGrid e = ecf(s, g);
  ECFGrid prev = threshold_cf(e, ThresholdSpec::make(0.0, 1000));
  for (double kappa = 0.1; kappa < 5.0; kappa += 0.1) {
    const ECFGrid cur = threshold_cf(e, ThresholdSpec::make(kappa, 1000));
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      if (cur.values[i] != Complex(0.0)) CHECK(prev.values[i] != Complex(0.0));
    }
    prev = cur;
  }
}

TEST_CASE("adaptive estimate") {
  const auto s = cauchy_sample(1.0, 500, 3);
  const UGrid g = UGrid::symmetric(10.0, 0.05);
  const Eigen::ArrayXd x = Eigen::ArrayXd::LinSpaced(21, -5.0, 5.0);

  const SpectralEstimate zero = adaptive_estimate(s, 1e3, g, x);
  CHECK((zero.values == 0.0).all());

  // hand-thresholded ECF as the oracle
  ECFGrid e = ecf(s, g);
  const ThresholdSpec spec = ThresholdSpec::make(1.0, 500);
  ECFGrid cut = e;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (std::abs(cut.values[i]) < spec.level()) cut.values[i] = 0.0;
  }
  const SpectralEstimate a = adaptive_estimate(s, 1.0, g, x);
  const Eigen::ArrayXcd oracle = invert_cf(g, cut.values, g.u_max(), x);
  CHECK((a.values - oracle.real()).abs().maxCoeff() < 1e-14);
  CHECK(std::holds_alternative<ThresholdSpec>(a.selector));
  CHECK(std::get<ThresholdSpec>(a.selector).kappa == 1.0);
}

TEST_CASE("adaptive domain is intersected with [-n, n]") {
  const auto s = cauchy_sample(0.1, 20, 4);
  const UGrid g = UGrid::symmetric(100.0, 0.1);
  const Eigen::ArrayXd x = Eigen::ArrayXd::LinSpaced(5, -1.0, 1.0);
  const SpectralEstimate a = adaptive_estimate(s, 0.0, g, x);
  const UGrid clipped = g.clipped(20.0);
  const SpectralEstimate ref = spectral_estimate(threshold_cf(ecf(s, clipped), ThresholdSpec{0.0, 20}), 20.0, x);
  CHECK((a.values - ref.values).abs().maxCoeff() < 1e-14);
}

TEST_CASE("oracle cut-offs") {
  CHECK(oracle_cutoff(ModelClass::gaussian(), 1.0, std::exp(4.0), 1.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(oracle_cutoff(ModelClass::pure_jump(1.0, 1.0), 0.0, std::exp(1.0), 1.0) ==
        doctest::Approx(pi / 2.0).epsilon(1e-14));
  const double M = 3.0 / 1.3;  // (P + Q) / (2 - alpha) for (2, 1, 0.7)
  const double m = oracle_cutoff(ModelClass::pure_jump(M, 0.7), 0.0, 1e4, 0.1);
  CHECK(std::abs(std::exp(-M * 0.1 * std::pow(2.0 * m / pi, 0.7)) - 1e-4) < 1e-10);
  const double mg = oracle_cutoff(ModelClass::gaussian(), 0.3, 1e4, 0.1);
  CHECK(std::abs(0.1 * 0.3 * mg * mg - std::log(1e4)) < 1e-10);
  CHECK_THROWS_AS(oracle_cutoff(ModelClass::gaussian(), 0.0, 100.0, 1.0), DomainError);
  CHECK_THROWS_AS(oracle_cutoff(ModelClass::gaussian(), 1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("mixed cut-off") {
  const double c1 = 2.0 * std::pow(2.0 / pi, 1.0);
  // sigma2 = 1, M = 1, alpha = 1, Delta = 1, n = e^4: m^2 + (4/pi) m = 4
  const double m = mixed_cutoff(1.0, 1.0, 1.0, 1.0, std::exp(4.0));
  const double b = 4.0 / pi;
  CHECK(m == doctest::Approx((-b + std::sqrt(b * b + 16.0)) / 2.0).epsilon(1e-12));
  CHECK(std::abs(m * m + c1 * m - 4.0) < 1e-10);

  CHECK(mixed_cutoff(0.0, 1.2, 0.7, 0.1, 1e4) ==
        doctest::Approx(std::pow(std::log(1e4) / (2.0 * 1.2 * std::pow(2.0 / pi, 0.7) * 0.1), 1.0 / 0.7)).epsilon(1e-14));
  CHECK(mixed_cutoff(0.5, 0.0, 0.7, 0.1, 1e4) == doctest::Approx(std::sqrt(std::log(1e4) / 0.05)).epsilon(1e-14));
  CHECK_THROWS_AS(mixed_cutoff(1.0, 1.0, 1.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(mixed_cutoff(0.0, 0.0, 1.0, 1.0, 10.0), DomainError);
}

TEST_CASE("mixed cut-off residual and limits") {
  for (double alpha : {0.4, 1.0, 1.7}) {
    for (double delta : {0.01, 0.1, 1.0}) {
      const double M = 0.9, s2 = 0.6, n = 5000.0, L = std::log(n);
      const double m = mixed_cutoff(s2, M, alpha, delta, n);
      const double c = 2.0 * M * std::pow(2.0 / pi, alpha);
      CHECK(std::abs(s2 * delta * m * m + c * delta * std::pow(m, alpha) - L) < 1e-10);

      const double jump_limit = std::pow(L / (c * delta), 1.0 / alpha);
      const double gauss_limit = std::sqrt(L / (s2 * delta));
      double prev_j = 1e300, prev_g = 1e300;
      for (double eps : {1e-2, 1e-4, 1e-8}) {
        const double ej = 1.0 - mixed_cutoff(eps, M, alpha, delta, n) / jump_limit;
        const double eg = 1.0 - mixed_cutoff(s2, eps, alpha, delta, n) / gauss_limit;
        CHECK(ej > 0.0);
        CHECK(eg > 0.0);
        CHECK(ej < prev_j);
        CHECK(eg < prev_g);
        prev_j = ej;
        prev_g = eg;
      }
      // first-order perturbation of the root at eps = 1e-8
      const double pj = 1e-8 * delta * jump_limit * jump_limit / (alpha * L);
      const double cg = 2.0 * 1e-8 * std::pow(2.0 / pi, alpha);
      const double pg = cg * delta * std::pow(gauss_limit, alpha) / (2.0 * L);
      if (pj < 1e-2) CHECK(prev_j == doctest::Approx(pj).epsilon(1e-2));
      if (pg < 1e-2) CHECK(prev_g == doctest::Approx(pg).epsilon(1e-2));
    }
  }
}

TEST_CASE("mixed cut-off limits at desk-scale roots") {
  // three reference jump laws, Delta = 1
  for (auto [M, alpha] : {std::pair{2.0 / pi, 1.0}, std::pair{3.0 / 1.3, 0.7}, std::pair{3.0 / 0.3, 1.7}}) {
    for (double n : {500.0, 1e4}) {
      const double c = 2.0 * M * std::pow(2.0 / pi, alpha);
      const double jump_limit = std::pow(std::log(n) / c, 1.0 / alpha);
      CHECK(std::abs(mixed_cutoff(1e-8, M, alpha, 1.0, n) / jump_limit - 1.0) < 1e-6);
      const double gauss_limit = std::sqrt(std::log(n));
      CHECK(std::abs(mixed_cutoff(1.0, 1e-8, alpha, 1.0, n) / gauss_limit - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("plancherel norm") {
  const UGrid g = UGrid::symmetric(10.0, 0.05);
  const ECFGrid a = cf_on_grid(g, 1.0);
  CHECK(plancherel_l2(a, a) == 0.0);
  const ECFGrid zero = constant_ecf(g, 0.0);
  // (1/2pi) int e^{-2|u|} du -> 1/(2pi)
  CHECK(plancherel_l2(cf_on_grid(UGrid::symmetric(40.0, 0.01), 1.0), constant_ecf(UGrid::symmetric(40.0, 0.01), 0.0)) ==
        doctest::Approx(1.0 / (2.0 * pi)).epsilon(1e-4));
  CHECK_THROWS_AS(plancherel_l2(a, constant_ecf(UGrid::symmetric(10.0, 0.1), 0.0)), DomainError);
  // piecewise-linear integral is exact for |linear|^2
  ECFGrid lin = constant_ecf(g, 0.0);
  for (Eigen::Index i = 0; i < g.size(); ++i) lin.values[i] = Complex(g.point(i), 2.0);
  CHECK(plancherel_l2(lin, zero) == doctest::Approx((2.0 * 1000.0 / 3.0 + 4.0 * 20.0) / (2.0 * pi)).epsilon(1e-13));
}

TEST_CASE("Parseval: x-domain norm equals the frequency norm") {
  const UGrid g = UGrid::symmetric(10.0, 0.05);
  const ECFGrid e = cf_on_grid(g, 1.0);
  for (double m : {10.0, 6.0}) {
    const Eigen::ArrayXd zero = Eigen::ArrayXd::Zero(g.size());
    ECFGrid trunc = e;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      if (std::abs(g.point(i)) > m + 1e-12) trunc.values[i] = 0.0;
    }
    const double freq = plancherel_l2_window(g, e.values, Eigen::ArrayXcd::Zero(g.size()), m);
    auto f2 = [&](double x) {
      const Eigen::ArrayXd xs = Eigen::ArrayXd::Constant(1, x);
      return std::norm(invert_cf(g, e.values, m, xs)[0]);
    };
    // |f|^2 decays like x^-4 with a kink-free interpolant ends; integrate on [0, 2000] plus x^-4 tail estimate
    double space = 0.0;
    for (int k = 0; k < 2000; ++k) space += integrate(f2, k, k + 1.0, QuadOptions{1e-12}).value;
    const double edge = f2(2000.0);
    space += edge * 2000.0 / 3.0;
    CHECK(2.0 * space == doctest::Approx(freq).epsilon(1e-6));
  }
}

TEST_CASE("real-valuedness of the inversion") {
  const auto s = cauchy_sample(0.1, 300, 8);
  const UGrid g = UGrid::symmetric(100.0, 0.1);
  const Eigen::ArrayXd x = default_x_grid(s);
  const SpectralEstimate est = spectral_estimate(ecf(s, g), 37.3, x);
  CHECK(est.imag_residual <= 1e-8 * est.values.abs().maxCoeff());
}

TEST_CASE("default x grid") {
  IncrementSample s;
  s.values = Eigen::ArrayXd::LinSpaced(101, 0.0, 100.0);
  const Eigen::ArrayXd x = default_x_grid(s);
  CHECK(x.size() == 512);
  CHECK(x[0] == doctest::Approx(50.0 - 8.0 * 50.0));
  CHECK(x[511] == doctest::Approx(50.0 + 8.0 * 50.0));
}

TEST_CASE("CSV writers") {
  const UGrid g = UGrid::symmetric(1.0, 0.5);
  std::ostringstream os;
  write_ecf_csv(os, cf_on_grid(g, 1.0));
  CHECK(os.str().rfind("u,re,im\n-1,", 0) == 0);
  SpectralEstimate est;
  est.x = Eigen::ArrayXd::LinSpaced(2, 0.0, 1.0);
  est.values = Eigen::ArrayXd::Constant(2, 0.25);
  std::ostringstream o2;
  write_estimate_csv(o2, est);
  CHECK(o2.str() == "x,f_hat\n0,0.25\n1,0.25\n");
}
