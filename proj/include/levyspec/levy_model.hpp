#pragma once

// Levy triplets, characteristic functions, class-membership checks and the
// closed-form bounds on bias and density regularity.

#include <complex>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "levyspec/numerics.hpp"

namespace levyspec {

using Complex = std::complex<double>;

/// Stable Levy density p(x) = P x^-(1+alpha) on x > 0, Q |x|^-(1+alpha) on x < 0.
struct StableJumpDensity {
  double P = 0.0;
  double Q = 0.0;
  double alpha = 1.0;

  void validate() const;
  double operator()(double x) const;
};

/// Arbitrary Levy density given pointwise.
///
/// `integrability_hint` is the exponent h with p(x) ~ |x|^-(1+h) near 0. When
/// `regularly_varying` is set the near-zero quadrature may extrapolate the
/// remaining mass analytically from that exponent.
struct CustomJumpDensity {
  std::function<double(double)> density;
  double integrability_hint = 1.0;
  bool regularly_varying = false;
  std::string name = "custom";

  double operator()(double x) const { return density(x); }
};

using JumpPart = std::variant<std::monostate, StableJumpDensity, CustomJumpDensity>;

struct LevyTriplet {
  double b = 0.0;
  double sigma2 = 0.0;
  JumpPart jumps;

  void validate() const;
  bool has_jumps() const { return !std::holds_alternative<std::monostate>(jumps); }
  std::string describe() const;
};

/// Stable law S(alpha, gamma, beta, delta) in the one-parameterisation:
/// E exp(iuX) = exp(i delta u - gamma^alpha |u|^alpha (1 - i beta tan(pi alpha/2) sgn u))
/// for alpha != 1, and exp(i delta u - gamma |u| (1 + i beta (2/pi) sgn u log|u|)) at alpha = 1.
struct StableLaw {
  double alpha = 2.0;
  double gamma = 1.0;
  double beta = 0.0;
  double delta = 0.0;

  void validate() const;
};

enum class ClassTag { GaussianDominant, PureJump, Mixed };

/// Regularity class of a triplet: T+ (Gaussian part present), T_{0,M,alpha}
/// (pure jump), or their intersection T_{+,M,alpha}.
struct ModelClass {
  ClassTag tag = ClassTag::GaussianDominant;
  double M = 0.0;
  double alpha = 0.0;

  static ModelClass gaussian() { return {ClassTag::GaussianDominant, 0.0, 0.0}; }
  static ModelClass pure_jump(double M, double alpha);
  static ModelClass mixed(double M, double alpha);
  void validate() const;
};

// Built-in jump densities.

/// Stable density as a generic evaluator (quadrature paths only).
CustomJumpDensity as_custom(const StableJumpDensity& j);

/// p(x) = |x|^-(a+1) + |x|^-(b+1) (1 + sin(1/|x|)) / 2 with 0 <= a < b < 2.
CustomJumpDensity oscillating_density(double a, double b);

/// Density switching between x^-2 and x^-3/2 on the blocks (2^-2^(k+1), 2^-2^k].
CustomJumpDensity partition_density();

/// Gamma process density e^-x / x on x > 0.
CustomJumpDensity gamma_process_density();

/// Point on the partition used by `partition_density`: 2^-(2^k).
double partition_point(int k);

// Characteristic functions.

/// Characteristic exponent per unit time of the jump part,
/// int (e^{iux} - 1 - iux 1_{|x|<1}) p(x) dx, in closed form.
Complex stable_jump_exponent(const StableJumpDensity& j, double u);

/// Same exponent by adaptive quadrature for any density.
Complex jump_exponent_quadrature(const JumpPart& jumps, double u, const QuadOptions& opts = {});

/// E exp(iuX_t). Stable jumps use the closed form, custom densities quadrature.
Complex levy_khintchine_cf(const LevyTriplet& triplet, double t, double u,
                           const QuadOptions& opts = {});

/// Same as `levy_khintchine_cf` but forces quadrature for the jump part.
Complex levy_khintchine_cf_quadrature(const LevyTriplet& triplet, double t, double u,
                                      const QuadOptions& opts = {});

enum class LocationConvention {
  /// Location implied by the compensated Levy-Khintchine exponent.
  LevyKhintchine,
  /// delta = (Q - P) Delta / (2 - alpha), as printed alongside the experiments.
  AsPrinted,
};

/// Law of X_Delta for the pure-jump stable triplet (0, 0, j).
StableLaw stable_params_of_triplet(const StableJumpDensity& j, double delta_t,
                                   LocationConvention convention = LocationConvention::LevyKhintchine);

Complex stable_cf(const StableLaw& law, double u);

/// Squared L2 norm of the stable density, by Plancherel.
double true_l2_norm(const StableLaw& law);

// Class membership.

/// int_{-eta}^{eta} x^2 p(x) dx.
double truncated_second_moment(const JumpPart& jumps, double eta, const QuadOptions& opts = {});

/// Default eta grid: 32 log-spaced points in [1e-4, 1].
std::vector<double> default_eta_grid();

/// True iff int_{-eta}^{eta} x^2 p >= M eta^(2-alpha) at every eta of the grid
/// (equality accepted up to the quadrature tolerance).
bool check_assumption_a(const JumpPart& jumps, double M, double alpha,
                        const std::vector<double>& eta_grid, const QuadOptions& opts = {});

/// eta^(gamma-2) int_{-eta}^{eta} x^2 p(x) dx.
double alpha0_ratio(const JumpPart& jumps, double eta, double gamma, const QuadOptions& opts = {});

// Bounds.

/// exp(-(2^alpha M / pi^alpha) |u|^alpha t), valid for |u| >= pi/2.
double picard_cf_bound(double M, double alpha, double t, double u);

/// Uniform bound on the k-th derivative of the density of X_t.
double picard_derivative_bound(int k, double t, double M, double alpha);

/// Squared-bias bound ||f_{Delta,m} - f_Delta||^2 for the class.
double bias_bound(const ModelClass& cls, double sigma2, double m, double delta_t);

}  // namespace levyspec
