#include "levyspec/levy_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "levyspec/errors.hpp"

namespace levyspec {

namespace {

constexpr double kPi = std::numbers::pi;

double sgn(double u) { return u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0); }

// |exponent| coefficient c in -c |u|^alpha (...) per unit time.
double stable_scale_coefficient(const StableJumpDensity& j) {
  if (j.alpha == 1.0) return (j.P + j.Q) * kPi / 2.0;
  return (j.P + j.Q) * std::tgamma(1.0 - j.alpha) * std::cos(kPi * j.alpha / 2.0) / j.alpha;
}

// Drift per unit time produced by the 1_{|x|<1} compensator.
double stable_location_rate(const StableJumpDensity& j) {
  if (j.alpha == 1.0) return (j.P - j.Q) * (1.0 - std::numbers::egamma);
  return (j.Q - j.P) / (1.0 - j.alpha);
}

// cos(z) - 1 without cancellation.
double cos_m1(double z) {
  const double s = std::sin(0.5 * z);
  return -2.0 * s * s;
}

// sin(z) - z without cancellation.
double sin_mz(double z) {
  if (std::abs(z) < 1e-2) {
    const double z2 = z * z;
    return -z * z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0));
  }
  return std::sin(z) - z;
}

void require_converged(const QuadResult<double>& r, const char* what) {
  if (!r.converged || !std::isfinite(r.value)) throw QuadratureError(what, r.abs_error);
}

// Real and imaginary parts of int_0^inf (e^{iux} - 1 - iux 1_{x<1}) p(x) dx.
Complex one_sided_exponent(const CustomJumpDensity& p, bool negative_side, double u,
                           const QuadOptions& opts) {
  auto dens = [&](double x) { return negative_side ? p(-x) : p(x); };
  std::optional<double> real_ratio, imag_ratio;
  if (p.regularly_varying) {
    real_ratio = std::pow(2.0, -(2.0 - p.integrability_hint));
    imag_ratio = std::pow(2.0, -(3.0 - p.integrability_hint));
  }
  auto near_re = integrate_toward_zero([&](double x) { return cos_m1(u * x) * dens(x); }, 1.0,
                                       real_ratio, opts);
  require_converged(near_re, "jump exponent: real part near 0");
  auto near_im = integrate_toward_zero([&](double x) { return sin_mz(u * x) * dens(x); }, 1.0,
                                       imag_ratio, opts);
  require_converged(near_im, "jump exponent: imaginary part near 0");

  // Mass beyond 1, via x = 1/t.
  auto mass = integrate_toward_zero([&](double t) { return dens(1.0 / t) / (t * t); }, 1.0,
                                    std::nullopt, opts);
  require_converged(mass, "jump exponent: mass of |x| >= 1");

  const double half_period = kPi / std::abs(u);
  auto far_cos = integrate_oscillatory_tail([&](double x) { return std::cos(u * x) * dens(x); }, 1.0,
                                            half_period, opts);
  require_converged(far_cos, "jump exponent: oscillatory tail (cos)");
  auto far_sin = integrate_oscillatory_tail([&](double x) { return std::sin(u * x) * dens(x); }, 1.0,
                                            half_period, opts);
  require_converged(far_sin, "jump exponent: oscillatory tail (sin)");

  return {near_re.value + far_cos.value - mass.value, near_im.value + far_sin.value};
}

}  // namespace

void StableJumpDensity::validate() const {
  if (!(P >= 0.0) || !(Q >= 0.0) || !(P + Q > 0.0)) {
    throw DomainError("stable jump density: need P, Q >= 0 and P + Q > 0");
  }
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("stable jump density: alpha must lie in (0, 2)");
}

double StableJumpDensity::operator()(double x) const {
  if (x > 0.0 && P > 0.0) return P * std::pow(x, -1.0 - alpha);
  if (x < 0.0 && Q > 0.0) return Q * std::pow(-x, -1.0 - alpha);
  return 0.0;
}

void LevyTriplet::validate() const {
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw DomainError("triplet: sigma2 must be >= 0");
  if (!std::isfinite(b)) throw DomainError("triplet: drift must be finite");
  if (const auto* s = std::get_if<StableJumpDensity>(&jumps)) s->validate();
  if (const auto* c = std::get_if<CustomJumpDensity>(&jumps)) {
    if (!c->density) throw DomainError("triplet: custom jump density has no evaluator");
  }
  if (!has_jumps() && !(sigma2 > 0.0)) {
    throw DomainError("triplet: without jumps sigma2 must be > 0");
  }
}

std::string LevyTriplet::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "b=" << b << " sigma2=" << sigma2;
  if (const auto* s = std::get_if<StableJumpDensity>(&jumps)) {
    os << " stable(P=" << s->P << ",Q=" << s->Q << ",alpha=" << s->alpha << ")";
  } else if (const auto* c = std::get_if<CustomJumpDensity>(&jumps)) {
    os << " " << c->name;
  }
  return os.str();
}

void StableLaw::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("stable law: alpha must lie in (0, 2]");
  if (!(gamma > 0.0)) throw DomainError("stable law: gamma must be > 0");
  if (!(std::abs(beta) <= 1.0)) throw DomainError("stable law: |beta| must be <= 1");
  if (!std::isfinite(delta)) throw DomainError("stable law: delta must be finite");
}

ModelClass ModelClass::pure_jump(double M, double alpha) {
  ModelClass c{ClassTag::PureJump, M, alpha};
  c.validate();
  return c;
}

ModelClass ModelClass::mixed(double M, double alpha) {
  ModelClass c{ClassTag::Mixed, M, alpha};
  c.validate();
  return c;
}

void ModelClass::validate() const {
  if (tag == ClassTag::GaussianDominant) return;
  if (!(M > 0.0)) throw DomainError("model class: M must be > 0");
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("model class: alpha must lie in (0, 2)");
}

CustomJumpDensity as_custom(const StableJumpDensity& j) {
  j.validate();
  return {[j](double x) { return j(x); }, j.alpha, true, "stable"};
}

CustomJumpDensity oscillating_density(double a, double b) {
  if (!(a >= 0.0 && a < b && b < 2.0)) throw DomainError("oscillating density: need 0 <= a < b < 2");
  auto p = [a, b](double x) {
    if (x == 0.0) return 0.0;
    const double ax = std::abs(x);
    return std::pow(ax, -(a + 1.0)) + std::pow(ax, -(b + 1.0)) * 0.5 * (1.0 + std::sin(1.0 / ax));
  };
  return {p, b, true, "oscillating"};
}

double partition_point(int k) { return std::exp2(-std::exp2(static_cast<double>(k))); }

CustomJumpDensity partition_density() {
  auto p = [](double x) {
    if (!(x > 0.0) || x > 0.5) return 0.0;
    // x lies in (eta_{k+1}, eta_k] with eta_k = 2^-2^k, i.e. 2^k <= log2(1/x) < 2^(k+1).
    const int k = static_cast<int>(std::floor(std::log2(-std::log2(x))));
    return (k % 2 == 0) ? std::pow(x, -1.5) : 1.0 / (x * x);
  };
  return {p, 1.0, false, "partition"};
}

CustomJumpDensity gamma_process_density() {
  auto p = [](double x) { return x > 0.0 ? std::exp(-x) / x : 0.0; };
  return {p, 0.0, true, "gamma"};
}

Complex stable_jump_exponent(const StableJumpDensity& j, double u) {
  if (u == 0.0) return {0.0, 0.0};
  const double c = stable_scale_coefficient(j);
  const double beta = (j.P - j.Q) / (j.P + j.Q);
  const double au = std::abs(u);
  const double loc = stable_location_rate(j);
  if (j.alpha == 1.0) {
    return Complex(-c * au, loc * u - c * au * beta * (2.0 / kPi) * sgn(u) * std::log(au));
  }
  const double mag = c * std::pow(au, j.alpha);
  return Complex(-mag, loc * u + mag * beta * std::tan(kPi * j.alpha / 2.0) * sgn(u));
}

Complex jump_exponent_quadrature(const JumpPart& jumps, double u, const QuadOptions& opts) {
  if (u == 0.0 || std::holds_alternative<std::monostate>(jumps)) return {0.0, 0.0};
  const CustomJumpDensity p = std::holds_alternative<StableJumpDensity>(jumps)
                                  ? as_custom(std::get<StableJumpDensity>(jumps))
                                  : std::get<CustomJumpDensity>(jumps);
  const Complex pos = one_sided_exponent(p, false, u, opts);
  const Complex neg = one_sided_exponent(p, true, u, opts);
  // On x < 0 substitute x = -y: the imaginary part flips sign.
  return {pos.real() + neg.real(), pos.imag() - neg.imag()};
}

namespace {

Complex gaussian_drift_exponent(const LevyTriplet& triplet, double u) {
  return {-0.5 * triplet.sigma2 * u * u, triplet.b * u};
}

void check_cf_args(const LevyTriplet& triplet, double t) {
  triplet.validate();
  if (!(t > 0.0)) throw DomainError("characteristic function: t must be > 0");
}

}  // namespace

Complex levy_khintchine_cf(const LevyTriplet& triplet, double t, double u, const QuadOptions& opts) {
  check_cf_args(triplet, t);
  Complex exponent = gaussian_drift_exponent(triplet, u);
  if (const auto* s = std::get_if<StableJumpDensity>(&triplet.jumps)) {
    exponent += stable_jump_exponent(*s, u);
  } else if (triplet.has_jumps()) {
    exponent += jump_exponent_quadrature(triplet.jumps, u, opts);
  }
  return std::exp(t * exponent);
}

Complex levy_khintchine_cf_quadrature(const LevyTriplet& triplet, double t, double u,
                                      const QuadOptions& opts) {
  check_cf_args(triplet, t);
  return std::exp(t * (gaussian_drift_exponent(triplet, u) + jump_exponent_quadrature(triplet.jumps, u, opts)));
}

StableLaw stable_params_of_triplet(const StableJumpDensity& j, double delta_t, LocationConvention convention) {
  j.validate();
  if (!(delta_t > 0.0)) throw DomainError("stable_params_of_triplet: delta_t must be > 0");
  StableLaw law;
  law.alpha = j.alpha;
  law.gamma = std::pow(delta_t * stable_scale_coefficient(j), 1.0 / j.alpha);
  law.beta = (j.P - j.Q) / (j.P + j.Q);
  law.delta = convention == LocationConvention::LevyKhintchine ? delta_t * stable_location_rate(j)
                                                               : (j.Q - j.P) * delta_t / (2.0 - j.alpha);
  return law;
}

Complex stable_cf(const StableLaw& law, double u) {
  if (u == 0.0) return {1.0, 0.0};
  const double au = std::abs(u);
  if (law.alpha == 1.0) {
    const double mag = law.gamma * au;
    return std::exp(Complex(-mag, law.delta * u - mag * law.beta * (2.0 / kPi) * sgn(u) * std::log(au)));
  }
  const double mag = std::pow(law.gamma * au, law.alpha);
  return std::exp(Complex(-mag, law.delta * u + mag * law.beta * std::tan(kPi * law.alpha / 2.0) * sgn(u)));
}

double true_l2_norm(const StableLaw& law) {
  law.validate();
  const double a = law.alpha;
  return std::tgamma(1.0 / a) / (kPi * a * std::pow(2.0, 1.0 / a) * law.gamma);
}

double truncated_second_moment(const JumpPart& jumps, double eta, const QuadOptions& opts) {
  if (!(eta > 0.0)) throw DomainError("truncated_second_moment: eta must be > 0");
  if (std::holds_alternative<std::monostate>(jumps)) return 0.0;
  const CustomJumpDensity p = std::holds_alternative<StableJumpDensity>(jumps)
                                  ? as_custom(std::get<StableJumpDensity>(jumps))
                                  : std::get<CustomJumpDensity>(jumps);
  std::optional<double> ratio;
  if (p.regularly_varying) ratio = std::pow(2.0, -(2.0 - p.integrability_hint));
  double total = 0.0;
  for (const double side : {1.0, -1.0}) {
    auto r = integrate_toward_zero([&](double x) { return x * x * p(side * x); }, eta, ratio, opts);
    if (!r.converged || !std::isfinite(r.value)) {
      std::ostringstream os;
      os.precision(6);
      os << "second moment on [-eta, eta] failed at eta=" << eta;
      throw QuadratureError(os.str(), r.abs_error);
    }
    total += r.value;
  }
  return total;
}

std::vector<double> default_eta_grid() { return log_spaced(1e-4, 1.0, 32); }

bool check_assumption_a(const JumpPart& jumps, double M, double alpha, const std::vector<double>& eta_grid,
                        const QuadOptions& opts) {
  if (eta_grid.empty()) throw DomainError("check_assumption_a: empty eta grid");
  if (!(M > 0.0)) throw DomainError("check_assumption_a: M must be > 0");
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("check_assumption_a: alpha must lie in (0, 2)");
  for (double eta : eta_grid) {
    if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("check_assumption_a: eta must lie in (0, 1]");
  }
  if (std::holds_alternative<std::monostate>(jumps)) return false;
  const double slack = 1.0 - 10.0 * opts.rel_tol;
  for (double eta : eta_grid) {
    const double lhs = truncated_second_moment(jumps, eta, opts);
    if (lhs < M * std::pow(eta, 2.0 - alpha) * slack) return false;
  }
  return true;
}

double alpha0_ratio(const JumpPart& jumps, double eta, double gamma, const QuadOptions& opts) {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("alpha0_ratio: eta must lie in (0, 1]");
  return std::pow(eta, gamma - 2.0) * truncated_second_moment(jumps, eta, opts);
}

double picard_cf_bound(double M, double alpha, double t, double u) {
  if (std::abs(u) < kPi / 2.0) throw DomainError("picard_cf_bound: requires |u| >= pi/2");
  if (!(M > 0.0) || !(t > 0.0)) throw DomainError("picard_cf_bound: need M > 0 and t > 0");
  return std::exp(-M * std::pow(2.0 * std::abs(u) / kPi, alpha) * t);
}

double picard_derivative_bound(int k, double t, double M, double alpha) {
  if (k < 0) throw DomainError("picard_derivative_bound: k must be >= 0");
  if (!(M > 0.0) || !(t > 0.0) || !(alpha > 0.0 && alpha < 2.0)) {
    throw DomainError("picard_derivative_bound: need M, t > 0 and alpha in (0, 2)");
  }
  const double k1 = k + 1.0;
  const double tm = t * M;
  return std::pow(kPi / 2.0, k1) / (kPi * k1) +
         std::pow(kPi / (2.0 * std::pow(tm, 1.0 / alpha)), k1) * upper_incomplete_gamma(k1 / alpha, tm) / alpha;
}

double bias_bound(const ModelClass& cls, double sigma2, double m, double delta_t) {
  cls.validate();
  if (!(delta_t > 0.0)) throw DomainError("bias_bound: delta_t must be > 0");
  switch (cls.tag) {
    case ClassTag::GaussianDominant: {
      if (!(sigma2 > 0.0)) throw DomainError("bias_bound: Gaussian branch needs sigma2 > 0");
      if (!(m >= 0.0)) throw DomainError("bias_bound: m must be >= 0");
      const double s = std::sqrt(delta_t * sigma2);
      return std::erfc(m * s) * std::sqrt(kPi) / (2.0 * s) / kPi;
    }
    case ClassTag::PureJump: {
      if (m < kPi / 2.0) throw DomainError("bias_bound: jump branch requires m >= pi/2");
      const double md = cls.M * delta_t;
      return upper_incomplete_gamma(1.0 / cls.alpha, std::pow(2.0 * m / kPi, cls.alpha) * md) /
             (2.0 * cls.alpha * std::pow(md, 1.0 / cls.alpha));
    }
    case ClassTag::Mixed: {
      if (m < kPi / 2.0) throw DomainError("bias_bound: mixed branch requires m >= pi/2");
      if (!(sigma2 >= 0.0)) throw DomainError("bias_bound: sigma2 must be >= 0");
      const double c_alpha = 2.0 * cls.M * std::pow(2.0 / kPi, cls.alpha);
      auto r = integrate_to_infinity(
          [&](double u) { return std::exp(-delta_t * sigma2 * u * u - c_alpha * delta_t * std::pow(u, cls.alpha)); },
          m, QuadOptions{1e-12, 0.0, 200000});
      if (!r.converged) throw QuadratureError("bias_bound: mixed tail", r.abs_error);
      return r.value / kPi;
    }
  }
  return 0.0;
}

}  // namespace levyspec
