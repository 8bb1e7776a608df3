#include "corf/rng.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "corf/errors.hpp"

namespace corf {

double Rng::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] so the log is finite.
  const double u1 = 1.0 - next_unit();
  const double u2 = next_unit();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::uint64_t Rng::next_below(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("next_below: n must be >= 1");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = gen_();
  } while (x >= limit);
  return x % n;
}

std::vector<int> Rng::sample_indices(int n, int k) {
  if (n < 0 || k < 0 || k > n)
    throw InvalidArgument("sample_indices: need 0 <= k <= n");
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(next_below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                       std::uint64_t c) {
  std::uint64_t state = seed;
  std::uint64_t out = splitmix64(state);
  state ^= a * 0x9e3779b97f4a7c15ULL + 1;
  out ^= splitmix64(state);
  state ^= b * 0xbf58476d1ce4e5b9ULL + 2;
  out ^= splitmix64(state);
  state ^= c * 0x94d049bb133111ebULL + 3;
  out ^= splitmix64(state);
  return out;
}

}  // namespace corf
