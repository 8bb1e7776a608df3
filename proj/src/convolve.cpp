#include "corf/convolve.hpp"

namespace corf {

long reflect_index(long i, long n) {
  if (n == 1) return 0;  // the mirror period degenerates
  // Repeated folding covers offsets past a single mirror period.
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

namespace {

void check_kernel_fits(Border border, long side, long rows, long cols) {
  if (border == Border::Reflect && side > 2 * std::min(rows, cols) + 1)
    throw DimensionError("kernel side " + std::to_string(side) +
                         " exceeds 2*min(width,height)+1 for " +
                         std::to_string(cols) + "x" + std::to_string(rows) +
                         " input");
}

}  // namespace

ResponseMap convolve(const PlaneD& in, const Kernel& kernel, Border border) {
  const long rows = in.rows(), cols = in.cols();
  const long r = kernel.radius();
  check_kernel_fits(border, kernel.side(), rows, cols);

  ResponseMap out(rows, cols);
  for (long y = 0; y < rows; ++y) {
    for (long x = 0; x < cols; ++x) {
      double acc = 0.0;
      for (long dy = -r; dy <= r; ++dy) {
        const long sy = y + dy;
        if (border == Border::Zero && (sy < 0 || sy >= rows)) continue;
        const long yy = border == Border::Reflect ? reflect_index(sy, rows) : sy;
        for (long dx = -r; dx <= r; ++dx) {
          const long sx = x + dx;
          if (border == Border::Zero && (sx < 0 || sx >= cols)) continue;
          const long xx = border == Border::Reflect ? reflect_index(sx, cols) : sx;
          acc += kernel.taps(r + dy, r + dx) * in(yy, xx);
        }
      }
      out(y, x) = acc;
    }
  }
  return out;
}

ResponseMap convolve(const Image& in, const Kernel& kernel, Border border) {
  return convolve(in.values, kernel, border);
}

PlaneD convolve_rows(const PlaneD& in, const Eigen::VectorXd& taps, Border border) {
  const long rows = in.rows(), cols = in.cols();
  const long side = taps.size();
  if (side < 1 || side % 2 == 0)
    throw InvalidArgument("separable taps must have odd length");
  check_kernel_fits(border, side, cols, cols);
  const long r = side / 2;

  PlaneD out(rows, cols);
  for (long y = 0; y < rows; ++y) {
    for (long x = 0; x < cols; ++x) {
      double acc = 0.0;
      for (long dx = -r; dx <= r; ++dx) {
        const long sx = x + dx;
        if (border == Border::Zero && (sx < 0 || sx >= cols)) continue;
        const long xx = border == Border::Reflect ? reflect_index(sx, cols) : sx;
        acc += taps(r + dx) * in(y, xx);
      }
      out(y, x) = acc;
    }
  }
  return out;
}

PlaneD convolve_cols(const PlaneD& in, const Eigen::VectorXd& taps, Border border) {
  const long rows = in.rows(), cols = in.cols();
  const long side = taps.size();
  if (side < 1 || side % 2 == 0)
    throw InvalidArgument("separable taps must have odd length");
  check_kernel_fits(border, side, rows, rows);
  const long r = side / 2;

  PlaneD out(rows, cols);
  for (long y = 0; y < rows; ++y) {
    for (long x = 0; x < cols; ++x) {
      double acc = 0.0;
      for (long dy = -r; dy <= r; ++dy) {
        const long sy = y + dy;
        if (border == Border::Zero && (sy < 0 || sy >= rows)) continue;
        const long yy = border == Border::Reflect ? reflect_index(sy, rows) : sy;
        acc += taps(r + dy) * in(yy, x);
      }
      out(y, x) = acc;
    }
  }
  return out;
}

}  // namespace corf
