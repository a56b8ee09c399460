#include "levyspec/calibration.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "levyspec/errors.hpp"

namespace levyspec {

void KappaGrid::validate() const {
  if (!(delta_step > 0.0) || !std::isfinite(delta_step)) throw DomainError("KappaGrid: delta_step must be > 0");
  if (count < 3) throw DomainError("KappaGrid: count must be >= 3");
}

ThresholdMask unthresholded_mask(const ECFGrid& ecf_grid, double kappa) {
  const double level = ThresholdSpec::make(kappa, ecf_grid.n).level();
  ThresholdMask mask{ecf_grid.grid, std::vector<bool>(static_cast<std::size_t>(ecf_grid.values.size()))};
  for (Eigen::Index i = 0; i < ecf_grid.values.size(); ++i) {
    mask.kept[static_cast<std::size_t>(i)] = std::abs(ecf_grid.values[i]) >= level;
  }
  return mask;
}

int euler_characteristic(const std::vector<bool>& kept) {
  int runs = 0;
  bool prev = false;
  for (bool k : kept) {
    if (k && !prev) ++runs;
    prev = k;
  }
  return runs;
}

int euler_characteristic(const ThresholdMask& mask) { return euler_characteristic(mask.kept); }

std::vector<int> chi_sequence(const ECFGrid& ecf_grid, const KappaGrid& grid) {
  grid.validate();
  // Sorting the moduli once would be faster; the grid is small enough not to bother.
  std::vector<int> chi(static_cast<std::size_t>(grid.count) + 1);
  for (int k = 0; k <= grid.count; ++k) {
    chi[static_cast<std::size_t>(k)] = euler_characteristic(unthresholded_mask(ecf_grid, grid.value(k)));
  }
  return chi;
}

int stabilization_index(const std::vector<int>& chi) {
  for (std::size_t k = 2; k < chi.size(); ++k) {
    if (chi[k] == chi[k - 1] && chi[k - 1] == chi[k - 2]) return static_cast<int>(k);
  }
  return -1;
}

double select_kappa(const ECFGrid& ecf_grid, const KappaGrid& grid) {
  std::vector<int> chi = chi_sequence(ecf_grid, grid);
  const int k = stabilization_index(chi);
  if (k < 0) throw NoStabilization(std::move(chi));
  return grid.value(k);
}

KappaChoice calibrate_kappa(const ECFGrid& ecf_grid, const KappaGrid& grid) {
  KappaChoice out;
  out.chi = chi_sequence(ecf_grid, grid);
  const int k = stabilization_index(out.chi);
  if (k < 0) {
    out.kappa = kFallbackKappa;
    out.fallback = true;
  } else {
    out.kappa = grid.value(k);
  }
  return out;
}

void write_chi_csv(std::ostream& os, const KappaGrid& grid, const std::vector<int>& chi) {
  os << "kappa,chi\n" << std::setprecision(17);
  for (std::size_t k = 0; k < chi.size(); ++k) os << grid.value(static_cast<int>(k)) << ',' << chi[k] << '\n';
}

}  // namespace levyspec
