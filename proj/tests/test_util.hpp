#pragma once

#include <cmath>
#include <numbers>

#include <corf/rng.hpp>
#include <corf/types.hpp>

namespace testutil {

inline corf::PlaneD random_plane(corf::Rng& rng, int rows, int cols, double lo = 0.0,
                                 double hi = 1.0) {
  corf::PlaneD p(rows, cols);
  for (long y = 0; y < rows; ++y)
    for (long x = 0; x < cols; ++x) p(y, x) = lo + (hi - lo) * rng.next_unit();
  return p;
}

inline corf::Image random_image(corf::Rng& rng, int rows, int cols) {
  return corf::Image(random_plane(rng, rows, cols));
}

/// Vertical step edge, dark left / bright right.
inline corf::Image vertical_edge(int side) {
  corf::PlaneD v = corf::PlaneD::Zero(side, side);
  v.rightCols(side / 2).setConstant(1.0);
  return corf::Image(std::move(v));
}

/// Fixed-seed binary noise texture.
inline corf::Image binary_texture(int side, std::uint64_t seed) {
  corf::Rng rng(seed);
  corf::PlaneD v(side, side);
  for (long y = 0; y < side; ++y)
    for (long x = 0; x < side; ++x) v(y, x) = rng.next_unit() < 0.5 ? 0.0 : 1.0;
  return corf::Image(std::move(v));
}

/// Bilinear rotation about the image center, constant fill.
inline corf::Image rotate_image(const corf::Image& image, double angle, double fill = 0.5) {
  const corf::PlaneD& in = image.values;
  const long rows = in.rows(), cols = in.cols();
  const double cy = (rows - 1) / 2.0, cx = (cols - 1) / 2.0;
  const double c = std::cos(angle), s = std::sin(angle);
  corf::PlaneD out(rows, cols);
  for (long y = 0; y < rows; ++y)
    for (long x = 0; x < cols; ++x) {
      // inverse map: source = R(-angle) * (target - center) + center
      const double tx = x - cx, ty = y - cy;
      const double sx = c * tx + s * ty + cx;
      const double sy = -s * tx + c * ty + cy;
      const long x0 = static_cast<long>(std::floor(sx));
      const long y0 = static_cast<long>(std::floor(sy));
      if (x0 < 0 || y0 < 0 || x0 + 1 >= cols || y0 + 1 >= rows) {
        out(y, x) = fill;
        continue;
      }
      const double fx = sx - x0, fy = sy - y0;
      out(y, x) = (1 - fy) * ((1 - fx) * in(y0, x0) + fx * in(y0, x0 + 1)) +
                  fy * ((1 - fx) * in(y0 + 1, x0) + fx * in(y0 + 1, x0 + 1));
    }
  return corf::Image(std::move(out));
}

inline double max_abs_diff(const corf::PlaneD& a, const corf::PlaneD& b) {
  return (a - b).abs().maxCoeff();
}

}  // namespace testutil
