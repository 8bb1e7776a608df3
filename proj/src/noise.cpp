#include "corf/noise.hpp"

#include <algorithm>
#include <cmath>

#include "corf/rng.hpp"

namespace corf {

void NoiseSpec::validate() const {
  if (!(sigma_noise >= 0.0)) throw InvalidArgument("noise sigma must be >= 0");
  if (!(percent >= 0.0 && percent <= 1.0))
    throw InvalidArgument("corruption percent must be in [0, 1]");
}

Image corrupt(const Image& image, const NoiseSpec& spec) {
  spec.validate();
  const long total = image.values.size();
  const int count = static_cast<int>(std::floor(spec.percent * static_cast<double>(total)));
  if (count == 0) return image;

  Rng rng(spec.seed);
  const std::vector<int> picks = rng.sample_indices(static_cast<int>(total), count);

  PlaneD out = image.values;
  const int width = image.width();
  for (int idx : picks) {
    const int y = idx / width, x = idx % width;
    const double noisy = out(y, x) + spec.sigma_noise * rng.next_normal();
    out(y, x) = std::clamp(noisy, 0.0, 1.0);
  }
  return Image(std::move(out));
}

double feature_stability(const FeatureTensor& clean, const FeatureTensor& noisy) {
  if (clean.height != noisy.height || clean.width != noisy.width ||
      clean.channel_count() != noisy.channel_count())
    throw DimensionError("feature tensors must share shape");

  double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
  for (int c = 0; c < clean.channel_count(); ++c) {
    const PlaneF& a = clean.channels[c];
    const PlaneF& b = noisy.channels[c];
    dot += (a.cast<double>() * b.cast<double>()).sum();
    norm_a += a.cast<double>().square().sum();
    norm_b += b.cast<double>().square().sum();
  }
  if (norm_a == 0.0 && norm_b == 0.0) return 1.0;
  if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
  return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

}  // namespace corf
