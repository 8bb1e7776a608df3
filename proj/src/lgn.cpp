#include "corf/lgn.hpp"

#include <cmath>
#include <numbers>

#include "corf/convolve.hpp"

namespace corf {

namespace {

int dog_radius(double sigma, double truncation) {
  return static_cast<int>(std::ceil(truncation * sigma));
}

// Center-on taps of the continuous DoG sampled at integer offsets,
// before the zero-sum correction.
PlaneD dog_taps_raw(double sigma, double truncation) {
  const int r = dog_radius(sigma, truncation);
  const int side = 2 * r + 1;
  const double s_inner = 0.5 * sigma;
  const double a_inner = 1.0 / (2.0 * std::numbers::pi * s_inner * s_inner);
  const double a_outer = 1.0 / (2.0 * std::numbers::pi * sigma * sigma);

  PlaneD taps(side, side);
  for (int y = -r; y <= r; ++y) {
    for (int x = -r; x <= r; ++x) {
      const double rr = static_cast<double>(x) * x + static_cast<double>(y) * y;
      taps(r + y, r + x) = a_inner * std::exp(-rr / (2.0 * s_inner * s_inner)) -
                           a_outer * std::exp(-rr / (2.0 * sigma * sigma));
    }
  }
  return taps;
}

Eigen::VectorXd gauss_taps_1d(double sigma, int r) {
  Eigen::VectorXd taps(2 * r + 1);
  for (int x = -r; x <= r; ++x)
    taps(r + x) = std::exp(-(static_cast<double>(x) * x) / (2.0 * sigma * sigma));
  return taps;
}

}  // namespace

void DogSpec::validate() const {
  if (!(sigma > 0.0)) throw InvalidArgument("DoG sigma must be > 0");
  if (polarity != 1 && polarity != -1)
    throw InvalidArgument("DoG polarity must be +1 or -1");
  if (!(truncation >= 2.0)) throw InvalidArgument("DoG truncation must be >= 2");
}

Kernel dog_kernel(const DogSpec& spec) {
  spec.validate();
  PlaneD taps = dog_taps_raw(spec.sigma, spec.truncation);
  if (spec.polarity < 0) taps = -taps;
  taps -= taps.mean();
  return Kernel(std::move(taps));
}

ResponseMap lgn_response_unrectified(const Image& image, const DogSpec& spec) {
  spec.validate();
  const int r = dog_radius(spec.sigma, spec.truncation);

  // The 2-D taps factor per Gaussian, and the zero-sum correction is a
  // scaled box filter, so the whole kernel runs as three separable passes.
  const double s_inner = 0.5 * spec.sigma;
  const double a_inner = 1.0 / (2.0 * std::numbers::pi * s_inner * s_inner);
  const double a_outer = 1.0 / (2.0 * std::numbers::pi * spec.sigma * spec.sigma);
  const Eigen::VectorXd g_inner = gauss_taps_1d(s_inner, r);
  const Eigen::VectorXd g_outer = gauss_taps_1d(spec.sigma, r);
  const Eigen::VectorXd box = Eigen::VectorXd::Ones(2 * r + 1);
  const double mean_tap = dog_taps_raw(spec.sigma, spec.truncation).mean();

  const PlaneD& in = image.values;
  PlaneD u = a_inner * convolve_cols(convolve_rows(in, g_inner, Border::Reflect),
                                     g_inner, Border::Reflect) -
             a_outer * convolve_cols(convolve_rows(in, g_outer, Border::Reflect),
                                     g_outer, Border::Reflect) -
             mean_tap * convolve_cols(convolve_rows(in, box, Border::Reflect), box,
                                      Border::Reflect);
  if (spec.polarity < 0) u = -u;
  return u;
}

ResponseMap lgn_response(const Image& image, const DogSpec& spec) {
  return lgn_response_unrectified(image, spec).max(0.0);
}

LgnPair lgn_response_pair(const Image& image, double sigma, double truncation) {
  const ResponseMap u =
      lgn_response_unrectified(image, DogSpec{sigma, +1, truncation});
  return LgnPair{u.max(0.0), (-u).max(0.0)};
}

}  // namespace corf
