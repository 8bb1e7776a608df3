#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace corf {

/// Reproducible generator: mt19937_64 core with fixed, explicitly coded
/// distributions (the std:: distribution adapters are implementation
/// defined and would not replay across toolchains).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; pairs are cached.
  double next_normal();

  /// Uniform integer in [0, n), rejection sampled (n >= 1).
  std::uint64_t next_below(std::uint64_t n);

  /// First k entries of a Fisher-Yates shuffle of {0, ..., n-1}.
  std::vector<int> sample_indices(int n, int k);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[next_below(i)]);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 step, used to derive independent per-cell seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministically combines a base seed with grid indices.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0);

inline constexpr const char* kRngAlgorithm =
    "mt19937_64 + 53-bit uniform + Box-Muller + Fisher-Yates; SplitMix64 seed mixing";

}  // namespace corf
