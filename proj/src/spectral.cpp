#include "levyspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <vector>

#include "levyspec/errors.hpp"

namespace levyspec {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kReanchor = 64;

// Integrals of e^{-i theta s} and s e^{-i theta s} over s in [0, 1].
struct FilonWeights {
  Complex e0;
  Complex i1;
};

FilonWeights filon_weights(double theta) {
  const Complex I(0.0, 1.0);
  if (std::abs(theta) < 0.25) {
    Complex e0 = 0.0, i1 = 0.0, term = 1.0;
    for (int k = 0; k < 24; ++k) {
      e0 += term / static_cast<double>(k + 1);
      i1 += term / static_cast<double>(k + 2);
      term *= -I * theta / static_cast<double>(k + 1);
    }
    return {e0, i1};
  }
  const Complex e = std::exp(-I * theta);
  const Complex e0 = (1.0 - e) / (I * theta);
  const Complex i1 = I * e / theta - (1.0 - e) / (theta * theta);
  return {e0, i1};
}

// h e^{-i ua x} int_0^1 (A (1 - s) + B s) e^{-i h x s} ds
Complex segment_integral(double ua, double h, Complex A, Complex B, double x) {
  const FilonWeights w = filon_weights(h * x);
  return h * std::polar(1.0, -ua * x) * (A * (w.e0 - w.i1) + B * w.i1);
}

double median_of(std::vector<double> v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
  const double a = v[lo];
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(hi), v.end());
  const double b = v[hi];
  return a + (pos - std::floor(pos)) * (b - a);
}

}  // namespace

UGrid UGrid::symmetric(double u_max, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("UGrid: step must be > 0");
  if (!(u_max > 0.0) || !std::isfinite(u_max)) throw DomainError("UGrid: u_max must be > 0");
  const double k = std::round(u_max / step);
  if (k < 1.0 || std::abs(k * step - u_max) > 1e-9 * u_max) {
    throw DomainError("UGrid: u_max must be a positive multiple of step");
  }
  return UGrid(static_cast<Eigen::Index>(k), step);
}

UGrid UGrid::with_default_step(double u_max) { return symmetric(u_max, u_max <= 10.0 ? 0.05 : 0.1); }

Eigen::ArrayXd UGrid::points() const {
  Eigen::ArrayXd p(size());
  for (Eigen::Index i = 0; i < size(); ++i) p[i] = point(i);
  return p;
}

UGrid UGrid::clipped(double limit) const {
  if (limit >= u_max()) return *this;
  const auto k = static_cast<Eigen::Index>(std::floor(limit / step_ * (1.0 + 1e-12)));
  if (k < 1) throw DomainError("UGrid::clipped: limit below one step");
  return UGrid(k, step_);
}

ThresholdSpec ThresholdSpec::make(double kappa, Eigen::Index n) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw DomainError("ThresholdSpec: kappa must be >= 0");
  if (n < 1) throw DomainError("ThresholdSpec: n must be positive");
  return ThresholdSpec{kappa, n};
}

double ThresholdSpec::kappa_n() const { return 1.0 + kappa * std::sqrt(std::log(static_cast<double>(n))); }

double ThresholdSpec::level() const { return kappa_n() / std::sqrt(static_cast<double>(n)); }

ECFGrid ecf(const IncrementSample& sample, const UGrid& grid) {
  const Eigen::Index n = sample.n();
  if (n == 0) throw DomainError("ecf: empty sample");
  const Eigen::Index K = grid.half_count();
  const double h = grid.step();
  Eigen::ArrayXd re = Eigen::ArrayXd::Zero(K + 1);
  Eigen::ArrayXd im = Eigen::ArrayXd::Zero(K + 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double x = sample.values[j];
    if (!std::isfinite(x)) throw DomainError("ecf: non-finite observation");
    const double cr = std::cos(h * x), ci = std::sin(h * x);
    double zr = 1.0, zi = 0.0;
    for (Eigen::Index k = 1; k <= K; ++k) {
      if (k % kReanchor == 0) {
        zr = std::cos(static_cast<double>(k) * h * x);
        zi = std::sin(static_cast<double>(k) * h * x);
      } else {
        const double t = zr * cr - zi * ci;
        zi = zr * ci + zi * cr;
        zr = t;
      }
      re[k] += zr;
      im[k] += zi;
    }
  }
  ECFGrid out;
  out.grid = grid;
  out.n = n;
  out.values.resize(grid.size());
  const double inv_n = 1.0 / static_cast<double>(n);
  out.values[K] = 1.0;
  for (Eigen::Index k = 1; k <= K; ++k) {
    Complex v(re[k] * inv_n, im[k] * inv_n);
    const double mod = std::abs(v);
    if (mod > 1.0) v /= mod;
    out.values[K + k] = v;
    out.values[K - k] = std::conj(v);
  }
  return out;
}

Eigen::ArrayXcd invert_cf(const UGrid& grid, const Eigen::ArrayXcd& values, double m, const Eigen::ArrayXd& x) {
  if (values.size() != grid.size()) throw DomainError("invert_cf: values do not match grid");
  if (!(m >= 0.0)) throw DomainError("invert_cf: cutoff must be >= 0");
  if (m > grid.u_max() * (1.0 + 1e-12)) throw DomainError("invert_cf: cutoff exceeds grid u_max");
  m = std::min(m, grid.u_max());
  const Eigen::Index K = grid.half_count();
  const double h = grid.step();
  // Full segments cover [-L h, L h]; the rest up to m is a partial segment on each side.
  const auto L = std::min(K, static_cast<Eigen::Index>(std::floor(m / h * (1.0 + 1e-12))));
  const double rem = m - static_cast<double>(L) * h;
  const bool partial = rem > 1e-12 * h && L < K;

  auto interp = [&](Eigen::Index k, double frac) {
    // value at u = point(k) + frac * h
    return values[k] + frac * (values[k + 1] - values[k]);
  };

  Eigen::ArrayXcd out(x.size());
  for (Eigen::Index ix = 0; ix < x.size(); ++ix) {
    const double xv = x[ix];
    Complex total = 0.0;
    if (L > 0) {
      const FilonWeights w = filon_weights(h * xv);
      // sum_k v_k e^{-i u_k x} over nodes -L..L, split by weight class
      Complex s_left = 0.0, s_right = 0.0;  // nodes -L..L-1 and -L+1..L
      const double cr = std::cos(h * xv), ci = -std::sin(h * xv);
      Complex z = std::polar(1.0, static_cast<double>(L) * h * xv);  // e^{-i u x} at u = -L h
      Complex sum_all = 0.0;
      for (Eigen::Index k = -L; k <= L; ++k) {
        if ((k + L) % kReanchor == 0) z = std::polar(1.0, -static_cast<double>(k) * h * xv);
        const Complex term = values[K + k] * z;
        sum_all += term;
        z = Complex(z.real() * cr - z.imag() * ci, z.real() * ci + z.imag() * cr);
      }
      const Complex first = values[K - L] * std::polar(1.0, static_cast<double>(L) * h * xv);
      const Complex last = values[K + L] * std::polar(1.0, -static_cast<double>(L) * h * xv);
      s_left = sum_all - last;
      s_right = sum_all - first;
      // segment [u_k, u_k + h]: h e^{-i u_k x}[v_k (E0 - I1) + v_{k+1} e^{-ihx} e^{ihx} I1]
      total += h * ((w.e0 - w.i1) * s_left + w.i1 * std::polar(1.0, h * xv) * s_right);
    }
    if (partial) {
      const double frac = rem / h;
      const double ua = static_cast<double>(L) * h;
      total += segment_integral(ua, rem, values[K + L], interp(K + L, frac), xv);
      total += segment_integral(-m, rem, interp(K - L - 1, 1.0 - frac), values[K - L], xv);
    }
    out[ix] = total / (2.0 * kPi);
  }
  return out;
}

SpectralEstimate spectral_estimate(const ECFGrid& ecf_grid, double m, const Eigen::ArrayXd& x) {
  if (!(m > 0.0)) throw DomainError("spectral_estimate: cutoff m must be > 0");
  if (m > ecf_grid.grid.u_max() * (1.0 + 1e-12)) {
    throw DomainError("spectral_estimate: cutoff m exceeds grid u_max");
  }
  const Eigen::ArrayXcd f = invert_cf(ecf_grid.grid, ecf_grid.values, m, x);
  SpectralEstimate est;
  est.x = x;
  est.values = f.real();
  est.selector = m;
  est.imag_residual = x.size() > 0 ? f.imag().abs().maxCoeff() : 0.0;
  return est;
}

ECFGrid threshold_cf(const ECFGrid& ecf_grid, const ThresholdSpec& spec) {
  if (spec.n != ecf_grid.n) throw DomainError("threshold_cf: threshold n differs from sample size");
  const double level = spec.level();
  ECFGrid out = ecf_grid;
  for (Eigen::Index i = 0; i < out.values.size(); ++i) {
    if (!(std::abs(out.values[i]) >= level)) out.values[i] = 0.0;
  }
  return out;
}

SpectralEstimate adaptive_estimate(const IncrementSample& sample, double kappa, const UGrid& grid,
                                   const Eigen::ArrayXd& x) {
  const UGrid g = grid.clipped(static_cast<double>(sample.n()));
  const ThresholdSpec spec = ThresholdSpec::make(kappa, sample.n());
  const ECFGrid kept = threshold_cf(ecf(sample, g), spec);
  const Eigen::ArrayXcd f = invert_cf(g, kept.values, g.u_max(), x);
  SpectralEstimate est;
  est.x = x;
  est.values = f.real();
  est.selector = spec;
  est.imag_residual = x.size() > 0 ? f.imag().abs().maxCoeff() : 0.0;
  return est;
}

double oracle_cutoff(const ModelClass& cls, double sigma2, double n, double delta_t) {
  cls.validate();
  if (!(n >= 2.0)) throw DomainError("oracle_cutoff: n must be >= 2");
  if (!(delta_t > 0.0)) throw DomainError("oracle_cutoff: delta_t must be > 0");
  if (sigma2 < 0.0) throw DomainError("oracle_cutoff: sigma2 must be >= 0");
  const double ln = std::log(n);
  switch (cls.tag) {
    case ClassTag::GaussianDominant:
      if (sigma2 == 0.0) throw DomainError("oracle_cutoff: Gaussian class requires sigma2 > 0");
      return std::sqrt(ln / (delta_t * sigma2));
    case ClassTag::PureJump:
      return kPi / 2.0 * std::pow(ln / (cls.M * delta_t), 1.0 / cls.alpha);
    case ClassTag::Mixed:
      if (sigma2 == 0.0) throw DomainError("oracle_cutoff: mixed class requires sigma2 > 0");
      return mixed_cutoff(sigma2, cls.M, cls.alpha, delta_t, n);
  }
  return 0.0;
}

double mixed_cutoff(double sigma2, double M, double alpha, double delta_t, double n) {
  if (!(sigma2 >= 0.0) || !(M >= 0.0) || (sigma2 == 0.0 && M == 0.0)) {
    throw DomainError("mixed_cutoff: need sigma2 >= 0, M >= 0, not both zero");
  }
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("mixed_cutoff: alpha must lie in (0, 2)");
  if (!(delta_t > 0.0)) throw DomainError("mixed_cutoff: delta_t must be > 0");
  const double ln = std::log(n);
  if (!(ln > 0.0)) throw DomainError("mixed_cutoff: log n must be > 0");
  const double c = 2.0 * M * std::pow(2.0 / kPi, alpha);
  if (sigma2 == 0.0) return std::pow(ln / (c * delta_t), 1.0 / alpha);
  if (M == 0.0) return std::sqrt(ln / (sigma2 * delta_t));

  auto f = [&](double m) { return sigma2 * delta_t * m * m + c * delta_t * std::pow(m, alpha) - ln; };
  double lo = 0.0;
  // Each branch alone overshoots the joint root, so the smaller one brackets it.
  double hi = std::min(std::sqrt(ln / (sigma2 * delta_t)), std::pow(ln / (c * delta_t), 1.0 / alpha));
  while (f(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  const double root = std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
  return root;
}

double plancherel_l2_window(const UGrid& grid, const Eigen::ArrayXcd& a, const Eigen::ArrayXcd& b, double m) {
  if (a.size() != grid.size() || b.size() != grid.size()) {
    throw DomainError("plancherel_l2: arrays do not match the grid");
  }
  const Eigen::Index K = grid.half_count();
  const auto L = std::min(K, static_cast<Eigen::Index>(std::floor(m / grid.step() * (1.0 + 1e-12))));
  double acc = 0.0;
  for (Eigen::Index k = K - L; k < K + L; ++k) {
    const Complex da = a[k] - b[k];
    const Complex db = a[k + 1] - b[k + 1];
    acc += std::norm(da) + (da * std::conj(db)).real() + std::norm(db);
  }
  return acc * grid.step() / 3.0 / (2.0 * kPi);
}

double plancherel_l2(const UGrid& grid, const Eigen::ArrayXcd& a, const Eigen::ArrayXcd& b) {
  return plancherel_l2_window(grid, a, b, grid.u_max());
}

double plancherel_l2(const ECFGrid& a, const ECFGrid& b) {
  if (!(a.grid == b.grid)) throw DomainError("plancherel_l2: grids differ");
  return plancherel_l2(a.grid, a.values, b.values);
}

Eigen::ArrayXd default_x_grid(const IncrementSample& sample, Eigen::Index count) {
  if (sample.n() == 0) throw DomainError("default_x_grid: empty sample");
  if (count < 2) throw DomainError("default_x_grid: need at least two points");
  std::vector<double> v(sample.values.data(), sample.values.data() + sample.n());
  const double med = median_of(v, 0.5);
  double iqr = median_of(v, 0.75) - median_of(v, 0.25);
  if (!(iqr > 0.0)) iqr = 1.0;
  return Eigen::ArrayXd::LinSpaced(count, med - 8.0 * iqr, med + 8.0 * iqr);
}

void write_estimate_csv(std::ostream& os, const SpectralEstimate& est) {
  os << "x,f_hat\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < est.x.size(); ++i) os << est.x[i] << ',' << est.values[i] << '\n';
}

void write_ecf_csv(std::ostream& os, const ECFGrid& e) {
  os << "u,re,im\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    os << e.grid.point(i) << ',' << e.values[i].real() << ',' << e.values[i].imag() << '\n';
  }
}

}  // namespace levyspec
