#pragma once

// Monte-Carlo risk of the thresholded estimator against exact reference laws,
// plus empirical checks of the MISE bound and the oracle inequality on the
// Cauchy model.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "levyspec/calibration.hpp"
#include "levyspec/levy_model.hpp"
#include "levyspec/spectral.hpp"

namespace levyspec {

/// 100 for Delta <= 0.1, 10 for Delta >= 1, log-linear in between.
double default_u_max(double delta_t);

struct ExperimentConfig {
  std::string name = "model";
  LevyTriplet model;
  double delta_t = 1.0;
  std::vector<Eigen::Index> n_list;
  int trials = 100;
  std::optional<double> u_max;      ///< default_u_max(delta_t) when unset
  std::optional<double> step;       ///< UGrid default when unset
  std::optional<double> kappa;      ///< unset selects kappa from the data
  KappaGrid kappa_grid;
  std::uint64_t master_seed = 1;
  int threads = 0;                  ///< 0 = hardware concurrency

  void validate() const;
  UGrid grid() const;
};

struct RiskCell {
  Eigen::Index n = 0;
  double mean_risk = 0.0;
  double sd_risk = 0.0;
  double mean_kappa = 0.0;
  double sd_kappa = 0.0;
  int trials = 0;
  int fallbacks = 0;
  std::vector<double> risks;
  std::vector<double> kappas;
};

struct RiskReport {
  std::string name;
  double alpha = 2.0;
  double delta_t = 1.0;
  std::uint64_t master_seed = 0;
  std::vector<RiskCell> cells;
};

/// Exact CF of X_Delta on the grid. Custom jump densities are unsupported.
Eigen::ArrayXcd reference_cf(const LevyTriplet& model, double delta_t, const UGrid& grid);

/// int_lower^inf |phi_Delta(u)|^2 du.
double reference_sq_tail(const LevyTriplet& model, double delta_t, double lower);

/// ||f_Delta||^2.
double reference_l2_norm(const LevyTriplet& model, double delta_t);

/// ||f_tilde - f||^2 / ||f||^2 for a CF estimate on the grid, zero outside it.
double relative_risk_of_cf(const LevyTriplet& model, double delta_t, const UGrid& grid,
                           const Eigen::ArrayXcd& phi_tilde);

/// Seed of the (n, Delta) cell derived from the master seed.
std::uint64_t cell_seed(std::uint64_t master_seed, Eigen::Index n, double delta_t);

RiskReport relative_l2_risk(const ExperimentConfig& config);

std::vector<RiskReport> risk_table(const std::vector<ExperimentConfig>& configs);

void write_risk_csv(std::ostream& os, const std::vector<RiskReport>& reports);

/// Parses the experiment JSON document; cells without a master_seed get
/// `default_seed`. Throws DomainError on schema errors.
std::vector<ExperimentConfig> parse_experiment_configs(const std::string& json_text, std::uint64_t default_seed = 1);

// Bound checks on the Cauchy model.

LevyTriplet cauchy_triplet();

struct BoundRow {
  double m = 0.0;          ///< cut-off (or the best m of the oracle grid)
  double mean_mise = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  double margin = 0.0;     ///< bound + 3 SE - mean; >= 0 means the row holds
  bool holds = false;
};

struct BoundReport {
  bool passed = false;
  std::vector<BoundRow> rows;
};

/// 10 points spread over [u_max / 20, u_max].
std::vector<double> default_m_grid(double delta_t, int count = 10);

/// mean MISE of the cut-off estimator <= e^{-2 Delta m}/(2 pi Delta) + m/(pi n) + 3 SE.
BoundReport theorem1_bound_check(double delta_t, Eigen::Index n, const std::vector<double>& m_grid, int trials,
                                 std::uint64_t seed, int threads = 0);

/// mean MISE of the thresholded estimator <= min_m {9 bias2 + (m/(pi n))(5 + (1+(kappa+2)sqrt(log n))^2)}
/// + 64 n^(1 - kappa^2/4) + 3 SE, on a 20-point m grid.
BoundReport oracle_inequality_check(double delta_t, Eigen::Index n, double kappa, int trials, std::uint64_t seed,
                                    int threads = 0);

void write_bound_report(std::ostream& os, const BoundReport& report);

}  // namespace levyspec
