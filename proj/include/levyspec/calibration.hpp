#pragma once

// Data-driven choice of the threshold constant kappa from the number of
// connected components of the unthresholded frequency set.

#include <iosfwd>
#include <vector>

#include "levyspec/spectral.hpp"

namespace levyspec {

/// Candidate values k * delta_step for k = 0..count.
struct KappaGrid {
  double delta_step = 0.05;
  int count = 100;

  void validate() const;
  double value(int k) const { return k * delta_step; }
};

struct ThresholdMask {
  UGrid grid = UGrid::symmetric(1.0, 1.0);
  std::vector<bool> kept;
};

/// kept[i] iff |phi_hat(u_i)| >= (1 + kappa sqrt(log n)) / sqrt(n).
ThresholdMask unthresholded_mask(const ECFGrid& ecf, double kappa);

/// Number of maximal runs of kept points.
int euler_characteristic(const ThresholdMask& mask);
int euler_characteristic(const std::vector<bool>& kept);

/// chi(A(k delta)) for k = 0..count.
std::vector<int> chi_sequence(const ECFGrid& ecf, const KappaGrid& grid);

/// Smallest k >= 2 with chi[k] == chi[k-1] == chi[k-2]; -1 if none.
int stabilization_index(const std::vector<int>& chi);

/// Smallest stabilised k * delta. Throws NoStabilization with the sequence.
double select_kappa(const ECFGrid& ecf, const KappaGrid& grid);

struct KappaChoice {
  double kappa = 0.0;
  bool fallback = false;
  std::vector<int> chi;
};

/// Kappa used when the chi sequence never stabilises.
inline constexpr double kFallbackKappa = 2.8284271247461903;

/// Same as select_kappa, replacing a failure by kFallbackKappa.
KappaChoice calibrate_kappa(const ECFGrid& ecf, const KappaGrid& grid);

void write_chi_csv(std::ostream& os, const KappaGrid& grid, const std::vector<int>& chi);

}  // namespace levyspec
