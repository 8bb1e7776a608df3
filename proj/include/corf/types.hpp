#pragma once

#include <Eigen/Core>

#include "corf/errors.hpp"

namespace corf {

/// Dense row-major 2-D field; (row, col) == (y, x).
template <class Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using PlaneD = Plane<double>;
using PlaneF = Plane<float>;

/// Response maps share dimensions with their source image and hold
/// finite values; rectified producers guarantee them non-negative.
using ResponseMap = PlaneD;

/// Grayscale stimulus, intensities normalized to [0, 1].
struct Image {
  PlaneD values;

  Image() = default;
  explicit Image(PlaneD v) : values(std::move(v)) {
    if (values.rows() < 1 || values.cols() < 1)
      throw InvalidArgument("image must be at least 1x1");
    if (!values.isFinite().all() || (values < 0.0).any() || (values > 1.0).any())
      throw InvalidArgument("image intensities must be finite and in [0,1]");
  }

  int width() const { return static_cast<int>(values.cols()); }
  int height() const { return static_cast<int>(values.rows()); }
};

/// Square odd-sided convolution kernel, taps centered.
struct Kernel {
  PlaneD taps;

  Kernel() = default;
  explicit Kernel(PlaneD t) : taps(std::move(t)) {
    if (taps.rows() != taps.cols() || taps.rows() < 1 || taps.rows() % 2 == 0)
      throw InvalidArgument("kernel must be square with odd side");
    if (!taps.isFinite().all())
      throw InvalidArgument("kernel taps must be finite");
  }

  int side() const { return static_cast<int>(taps.rows()); }
  int radius() const { return side() / 2; }
};

}  // namespace corf
