#pragma once

// Empirical characteristic function, cut-off and thresholded spectral
// estimators, oracle cut-offs and Fourier inversion.
//
// Frequency-domain data lives on a symmetric uniform grid. Between grid
// nodes a CF is read as its piecewise-linear interpolant; inversion and L2
// norms integrate that interpolant exactly, so the two routes agree by
// Plancherel up to rounding.

#include <Eigen/Core>
#include <complex>
#include <iosfwd>
#include <variant>

#include "levyspec/levy_model.hpp"
#include "levyspec/sampling.hpp"

namespace levyspec {

/// Points k * step for k = -K..K, with u_max = K * step.
class UGrid {
 public:
  /// Throws DomainError unless step > 0 and u_max is a multiple of step.
  static UGrid symmetric(double u_max, double step);
  /// Default resolution: 0.05 up to u_max = 10, 0.1 beyond.
  static UGrid with_default_step(double u_max);

  double u_max() const { return static_cast<double>(half_) * step_; }
  double step() const { return step_; }
  Eigen::Index half_count() const { return half_; }
  Eigen::Index size() const { return 2 * half_ + 1; }
  double point(Eigen::Index i) const { return static_cast<double>(i - half_) * step_; }
  Eigen::ArrayXd points() const;

  /// Largest sub-grid with u_max <= limit (same step).
  UGrid clipped(double limit) const;

  bool operator==(const UGrid& o) const { return half_ == o.half_ && step_ == o.step_; }

 private:
  UGrid(Eigen::Index half, double step) : half_(half), step_(step) {}
  Eigen::Index half_ = 0;
  double step_ = 1.0;
};

/// Characteristic-function values aligned with grid points.
struct ECFGrid {
  UGrid grid = UGrid::symmetric(1.0, 1.0);
  Eigen::ArrayXcd values;
  Eigen::Index n = 0;
};

/// Keep |phi_hat(u)| >= kappa_n / sqrt(n) with kappa_n = 1 + kappa sqrt(log n).
struct ThresholdSpec {
  double kappa = 0.0;
  Eigen::Index n = 1;

  static ThresholdSpec make(double kappa, Eigen::Index n);
  double kappa_n() const;
  double level() const;
};

struct SpectralEstimate {
  Eigen::ArrayXd x;
  Eigen::ArrayXd values;
  /// Cut-off m for the plain estimator, threshold for the adaptive one.
  std::variant<double, ThresholdSpec> selector;
  double imag_residual = 0.0;
};

/// (1/n) sum_j exp(i u x_j) on every grid point, by direct summation.
ECFGrid ecf(const IncrementSample& sample, const UGrid& grid);

/// Real part of (1/2pi) int_{-m}^{m} phi(u) e^{-iux} du.
SpectralEstimate spectral_estimate(const ECFGrid& ecf, double m, const Eigen::ArrayXd& x);

/// Zero every value whose modulus is below spec.level().
ECFGrid threshold_cf(const ECFGrid& ecf, const ThresholdSpec& spec);

/// Thresholded estimator; the grid is intersected with [-n, n].
SpectralEstimate adaptive_estimate(const IncrementSample& sample, double kappa, const UGrid& grid,
                                   const Eigen::ArrayXd& x);

/// Inverse transform of the interpolated CF restricted to [-m, m] (complex result).
Eigen::ArrayXcd invert_cf(const UGrid& grid, const Eigen::ArrayXcd& values, double m, const Eigen::ArrayXd& x);

/// Theorem-2 bias/variance cut-off: sqrt(log n / (Delta sigma2)) with a
/// Gaussian part, (pi/2) (log n / (M Delta))^(1/alpha) for pure jumps.
double oracle_cutoff(const ModelClass& cls, double sigma2, double n, double delta_t);

/// Positive root of sigma2 Delta m^2 + c_alpha Delta m^alpha = log n with
/// c_alpha = 2 M (2/pi)^alpha.
double mixed_cutoff(double sigma2, double M, double alpha, double delta_t, double n);

/// (1/2pi) int |a - b|^2 du over the grid, a and b read as linear interpolants.
double plancherel_l2(const UGrid& grid, const Eigen::ArrayXcd& a, const Eigen::ArrayXcd& b);
double plancherel_l2(const ECFGrid& a, const ECFGrid& b);

/// Same restricted to the nodes with |u| <= m.
double plancherel_l2_window(const UGrid& grid, const Eigen::ArrayXcd& a, const Eigen::ArrayXcd& b, double m);

/// 512 points spanning median +- 8 IQR of the sample.
Eigen::ArrayXd default_x_grid(const IncrementSample& sample, Eigen::Index count = 512);

void write_estimate_csv(std::ostream& os, const SpectralEstimate& est);
void write_ecf_csv(std::ostream& os, const ECFGrid& ecf);

}  // namespace levyspec
