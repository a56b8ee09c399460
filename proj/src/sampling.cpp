#include "levyspec/sampling.hpp"

#include <cmath>
#include <numbers>

#include "levyspec/errors.hpp"

namespace levyspec {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr double kPi = std::numbers::pi;

constexpr std::uint64_t kGaussianStream = 1;
constexpr std::uint64_t kStableStream = 2;

double stable_variate(const StableLaw& law, RandomStream& rng) {
  const double v = kPi * (rng.uniform() - 0.5);
  const double w = rng.exponential();
  const double a = law.alpha;
  const double b = law.beta;
  if (a == 1.0) {
    const double half_pi = kPi / 2.0;
    const double t = half_pi + b * v;
    const double x = (t * std::tan(v) - b * std::log(half_pi * w * std::cos(v) / t)) / half_pi;
    return law.gamma * x + (2.0 / kPi) * b * law.gamma * std::log(law.gamma) + law.delta;
  }
  const double tan_a = std::tan(kPi * a / 2.0);
  const double shift = std::atan(b * tan_a) / a;
  const double scale = std::pow(1.0 + b * b * tan_a * tan_a, 1.0 / (2.0 * a));
  const double x = scale * std::sin(a * (v + shift)) / std::pow(std::cos(v), 1.0 / a) *
                   std::pow(std::cos(v - a * (v + shift)) / w, (1.0 - a) / a);
  return law.gamma * x + law.delta;
}

}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RandomStream::RandomStream(const SeedSpec& seed, std::uint64_t substream) {
  const std::uint64_t trial_key = mix64(seed.master_seed + kGolden) ^ mix64((seed.trial_index + 1) * kGolden);
  state_ = mix64(trial_key + (substream + 1) * 0xD1B54A32D192ED03ULL);
}

std::uint64_t RandomStream::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double RandomStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double theta = 2.0 * kPi * uniform();
  cached_normal_ = r * std::sin(theta);
  has_cached_ = true;
  return r * std::cos(theta);
}

IncrementSample stable_sample(const StableLaw& law, Eigen::Index n, const SeedSpec& seed) {
  law.validate();
  if (!(law.alpha < 2.0)) throw DomainError("stable_sample: alpha must lie in (0, 2)");
  if (n <= 0) throw DomainError("stable_sample: n must be positive");
  RandomStream rng(seed, kStableStream);
  IncrementSample out;
  out.values.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) out.values[i] = stable_variate(law, rng);
  out.seed = seed;
  out.model = "stable";
  return out;
}

IncrementSample sample_increments(const LevyTriplet& triplet, double delta_t, Eigen::Index n,
                                  const SeedSpec& seed) {
  triplet.validate();
  if (!(delta_t > 0.0)) throw DomainError("sample_increments: delta_t must be > 0");
  if (n <= 0) throw DomainError("sample_increments: n must be positive");
  if (std::holds_alternative<CustomJumpDensity>(triplet.jumps)) {
    throw UnsupportedModel("sample_increments: custom jump densities cannot be sampled");
  }
  IncrementSample out;
  out.delta_t = delta_t;
  out.seed = seed;
  out.model = triplet.describe();
  out.values = Eigen::ArrayXd::Constant(n, triplet.b * delta_t);
  if (triplet.sigma2 > 0.0) {
    RandomStream rng(seed, kGaussianStream);
    const double sd = std::sqrt(triplet.sigma2 * delta_t);
    for (Eigen::Index i = 0; i < n; ++i) out.values[i] += sd * rng.normal();
  }
  if (const auto* j = std::get_if<StableJumpDensity>(&triplet.jumps)) {
    const StableLaw law = stable_params_of_triplet(*j, delta_t);
    RandomStream rng(seed, kStableStream);
    for (Eigen::Index i = 0; i < n; ++i) out.values[i] += stable_variate(law, rng);
  }
  return out;
}

}  // namespace levyspec
