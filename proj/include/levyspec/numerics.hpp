#pragma once

// Quadrature and special functions used throughout the library.
//
// All integrators are templated on the integrand's return type so that the
// same code handles real and complex integrands.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <type_traits>
#include <vector>

namespace levyspec {

struct QuadOptions {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  std::size_t max_intervals = 200000;
};

template <class T>
struct QuadResult {
  T value{};
  double abs_error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod pair on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Segment {
  double a, b;
  T value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
auto kronrod15(F& f, double a, double b) {
  using T = std::decay_t<decltype(f(a))>;
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const T fc = f(c);
  T kronrod = fc * kKronrodWeights[7];
  T gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kKronrodNodes[j];
    const T sum = f(c - dx) + f(c + dx);
    kronrod += sum * kKronrodWeights[j];
    if (j % 2 == 1) gauss += sum * kGaussWeights[j / 2];
  }
  return Segment<T>{a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (G7/K15) quadrature on a finite interval.
template <class F>
auto integrate(F&& f, double a, double b, const QuadOptions& opts = {}) {
  using T = std::decay_t<decltype(f(a))>;
  using detail::Segment;
  QuadResult<T> out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Segment<T>> heap;
  auto first = detail::kronrod15(f, a, b);
  out.evaluations = 15;
  T total = first.value;
  double err = first.error;
  heap.push(first);
  while (err > std::max(opts.abs_tol, opts.rel_tol * detail::magnitude(total))) {
    if (heap.size() >= opts.max_intervals) break;
    Segment<T> worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted
    heap.pop();
    auto left = detail::kronrod15(f, worst.a, mid);
    auto right = detail::kronrod15(f, mid, worst.b);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  total = T{};
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  out.value = total;
  out.abs_error = err;
  out.converged = err <= std::max(opts.abs_tol, opts.rel_tol * detail::magnitude(total)) ||
                  err <= 64.0 * std::numeric_limits<double>::epsilon() * detail::magnitude(total);
  return out;
}

/// Integral over [a, inf) of a non-oscillating integrand, via x = a + t/(1-t).
template <class F>
auto integrate_to_infinity(F&& f, double a, const QuadOptions& opts = {}) {
  auto mapped = [&](double t) {
    const double s = 1.0 - t;
    return f(a + t / s) * (1.0 / (s * s));
  };
  return integrate(mapped, 0.0, 1.0, opts);
}

/// Integral over (0, b] of an integrand that may be singular at 0.
///
/// The interval is cut into dyadic pieces [b 2^-(k+1), b 2^-k]. Once the
/// remaining mass, extrapolated geometrically from the piece ratio, falls
/// below tolerance the loop stops. When `power_ratio` is given the integrand
/// is assumed to behave like a power law near 0 whose dyadic pieces shrink by
/// that ratio; three consecutive pieces matching it allow an early exit with
/// an analytic tail.
template <class F>
QuadResult<double> integrate_toward_zero(F&& g, double b, std::optional<double> power_ratio,
                                         const QuadOptions& opts = {},
                                         std::size_t max_pieces = 1000) {
  QuadResult<double> out;
  double total = 0.0;
  double err = 0.0;
  double prev_piece = std::numeric_limits<double>::quiet_NaN();
  int matches = 0;
  int zero_run = 0;
  const double match_tol = std::max(10.0 * opts.rel_tol, 1e-12);
  double hi = b;
  for (std::size_t k = 0; k < max_pieces; ++k) {
    const double lo = 0.5 * hi;
    QuadOptions piece_opts = opts;
    piece_opts.abs_tol = std::max(opts.abs_tol, 0.1 * opts.rel_tol * std::abs(total));
    auto piece = integrate(g, lo, hi, piece_opts);
    out.evaluations += piece.evaluations;
    if (!std::isfinite(piece.value)) {
      out.value = piece.value;
      out.abs_error = std::numeric_limits<double>::infinity();
      return out;
    }
    total += piece.value;
    err += piece.abs_error;
    hi = lo;
    const double target = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
    if (piece.value == 0.0) {
      if (++zero_run >= 64) break;
      prev_piece = piece.value;
      continue;
    }
    zero_run = 0;
    const double ratio = piece.value / prev_piece;
    prev_piece = piece.value;
    if (std::isfinite(ratio) && ratio > 0.0 && ratio < 1.0) {
      const double tail = piece.value * ratio / (1.0 - ratio);
      if (std::abs(tail) <= target) {
        total += tail;
        out.value = total;
        out.abs_error = err + std::abs(tail);
        out.converged = true;
        return out;
      }
      if (power_ratio) {
        if (std::abs(ratio - *power_ratio) <= match_tol * *power_ratio) {
          if (++matches >= 3) {
            const double r = *power_ratio;
            const double t = piece.value * r / (1.0 - r);
            total += t;
            out.value = total;
            out.abs_error = err + match_tol * std::abs(t);
            out.converged = true;
            return out;
          }
        } else {
          matches = 0;
        }
      }
    } else if (std::isfinite(ratio) && ratio >= 1.0 && k > 64) {
      // Pieces stopped shrinking far inside the interval: non-integrable.
      out.value = total;
      out.abs_error = std::numeric_limits<double>::infinity();
      return out;
    }
    if (lo < std::numeric_limits<double>::min()) break;
  }
  out.value = total;
  out.abs_error = err;
  out.converged = (zero_run > 0);
  return out;
}

/// Wynn epsilon extrapolation of a sequence of partial sums.
inline double wynn_epsilon(const std::vector<double>& partial_sums) {
  const std::size_t n = partial_sums.size();
  if (n < 3) return partial_sums.empty() ? 0.0 : partial_sums.back();
  std::vector<double> prev(n + 1, 0.0);  // column k-1
  std::vector<double> cur(partial_sums.begin(), partial_sums.end());  // column k
  double best = partial_sums.back();
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<double> next(n - k);
    for (std::size_t j = 0; j + k < n; ++j) {
      const double diff = cur[j + 1] - cur[j];
      if (diff == 0.0) return cur[j + 1];
      next[j] = prev[j + 1] + 1.0 / diff;
    }
    prev = std::move(cur);
    cur = std::move(next);
    if (k % 2 == 0 && std::isfinite(cur.back())) best = cur.back();
  }
  return best;
}

/// Integral over [a, inf) of an oscillating integrand with known half period.
///
/// Sums the integral over consecutive half periods and accelerates the
/// partial sums with the epsilon algorithm.
template <class F>
QuadResult<double> integrate_oscillatory_tail(F&& g, double a, double half_period,
                                              const QuadOptions& opts = {},
                                              std::size_t max_terms = 4000) {
  QuadResult<double> out;
  std::vector<double> sums;
  double running = 0.0;
  double last_extrap = std::numeric_limits<double>::quiet_NaN();
  int stable = 0;
  double scale = 0.0;
  for (std::size_t k = 0; k < max_terms; ++k) {
    const double lo = a + static_cast<double>(k) * half_period;
    QuadOptions piece_opts = opts;
    piece_opts.abs_tol = std::max(opts.abs_tol, 1e-3 * opts.rel_tol * scale);
    auto piece = integrate(g, lo, lo + half_period, piece_opts);
    out.evaluations += piece.evaluations;
    running += piece.value;
    scale = std::max(scale, std::abs(running));
    sums.push_back(running);
    if (sums.size() > 60) sums.erase(sums.begin());
    const double extrap = wynn_epsilon(sums);
    const double target = std::max(opts.abs_tol, opts.rel_tol * std::max(std::abs(extrap), 1e-3 * scale));
    if (std::abs(piece.value) <= 1e-3 * target) {
      out.value = running;
      out.abs_error = std::abs(piece.value);
      out.converged = true;
      return out;
    }
    if (k >= 4 && std::abs(extrap - last_extrap) <= target) {
      if (++stable >= 2) {
        out.value = extrap;
        out.abs_error = std::abs(extrap - last_extrap);
        out.converged = true;
        return out;
      }
    } else {
      stable = 0;
    }
    last_extrap = extrap;
  }
  out.value = last_extrap;
  out.abs_error = std::abs(sums.back() - last_extrap);
  return out;
}

/// Upper incomplete gamma function Gamma(a, x) = int_x^inf z^(a-1) e^(-z) dz
/// (not regularised). Requires a > 0 and x >= 0.
double upper_incomplete_gamma(double a, double x);

/// Integral of exp(-c u^p) over [lower, inf), c > 0, p > 0.
double stretched_exp_tail(double c, double p, double lower);

/// `count` log-spaced points from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

}  // namespace levyspec
