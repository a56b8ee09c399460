#pragma once

// Reproducible i.i.d. increment samples for Gaussian, stable and mixed triplets.

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <string>

#include "levyspec/levy_model.hpp"

namespace levyspec {

/// The random stream of a trial is a pure function of both fields.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;
};

struct IncrementSample {
  double delta_t = 1.0;
  Eigen::ArrayXd values;
  std::string model;
  SeedSpec seed;

  Eigen::Index n() const { return values.size(); }
};

/// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t x);

/// Counter-based generator: output k is mix64(key + k * golden), so the
/// stream is fully determined by (seed, substream) and never shares state.
class RandomStream {
 public:
  RandomStream(const SeedSpec& seed, std::uint64_t substream);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  double exponential() { return -std::log(uniform()); }
  double normal();

 private:
  std::uint64_t state_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

/// Chambers-Mallows-Stuck draws with characteristic function stable_cf(law, .).
IncrementSample stable_sample(const StableLaw& law, Eigen::Index n, const SeedSpec& seed);

/// Increments b*Delta + sigma*sqrt(Delta)*Z + S with S stable (independent streams).
/// Throws UnsupportedModel for custom jump densities.
IncrementSample sample_increments(const LevyTriplet& triplet, double delta_t, Eigen::Index n,
                                  const SeedSpec& seed);

}  // namespace levyspec
