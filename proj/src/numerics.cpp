#include "levyspec/numerics.hpp"

#include "levyspec/errors.hpp"

namespace levyspec {

namespace {

// Lower series: gamma(a, x) = e^-x x^a sum_n x^n / (a (a+1) ... (a+n)).
double lower_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x));
}

// Continued fraction for Gamma(a, x), modified Lentz.
double upper_continued_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x)) * h;
}

}  // namespace

double upper_incomplete_gamma(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) {
    throw DomainError("upper_incomplete_gamma: need a > 0 and x >= 0");
  }
  if (x == 0.0) return std::tgamma(a);
  if (x < a + 1.0) return std::tgamma(a) - lower_series(a, x);
  return upper_continued_fraction(a, x);
}

double stretched_exp_tail(double c, double p, double lower) {
  // Substitute z = c u^p: int = Gamma(1/p, c lower^p) / (p c^(1/p)).
  const double z0 = lower > 0.0 ? c * std::pow(lower, p) : 0.0;
  return upper_incomplete_gamma(1.0 / p, z0) / (p * std::pow(c, 1.0 / p));
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count == 0) {
    throw DomainError("log_spaced: need 0 < lo <= hi and count > 0");
  }
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double l0 = std::log(lo);
  const double step = (std::log(hi) - l0) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = std::exp(l0 + step * static_cast<double>(i));
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace levyspec
