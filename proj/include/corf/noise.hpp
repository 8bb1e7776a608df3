#pragma once

#include <cstdint>

#include "corf/bank.hpp"
#include "corf/types.hpp"

namespace corf {

/// Gaussian corruption of a seeded fraction of pixels, on the
/// normalized [0, 1] intensity scale.
struct NoiseSpec {
  double sigma_noise = 0.1;  // noise std, intensity units
  double percent = 1.0;      // fraction of pixels corrupted, [0, 1]
  std::uint64_t seed = 0;

  void validate() const;
};

/// Picks floor(percent * N) distinct pixels without replacement, adds
/// independent zero-mean Gaussian noise to each, clamps to [0, 1].
/// Deterministic per seed.
Image corrupt(const Image& image, const NoiseSpec& spec);

/// Cosine similarity of the flattened tensors; 1 when both are all-zero,
/// 0 when exactly one is.
double feature_stability(const FeatureTensor& clean, const FeatureTensor& noisy);

}  // namespace corf
