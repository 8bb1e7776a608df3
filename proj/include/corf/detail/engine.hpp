#pragma once

#include <map>
#include <utility>

#include "corf/corf_cell.hpp"
#include "corf/types.hpp"

namespace corf::detail {

/// Rounded pixel shift of a sub-unit at its effective angle.
void subunit_shift(const CorfCell& cell, int i, int& dx, int& dy);

/// Smallest padding that covers every rotation of the cell's sub-units.
int required_pad(const CorfCell& cell);

/// Unit-sum Gaussian blur (std sigma_prime, support 3*sigma_prime),
/// zero border, separable.
PlaneD gaussian_blur_zero(const PlaneD& in, double sigma_prime);

/// exp() that flushes below-normal-range inputs (including -inf from
/// log(0)) to an exact zero; Eigen's vectorized exp clamps them to a
/// denormal instead.
PlaneD exp_flushing(const PlaneD& x);

/// Per-image, per-sigma evaluation state: rectified LGN maps embedded in
/// a zero canvas of the requested padding, and lazily cached logs of
/// their sigma'-blurred versions. Sharing a context across orientations
/// and push/pull sets avoids recomputing blurs (they depend only on
/// polarity and sigma', not on the rotation).
class CellContext {
 public:
  CellContext(const Image& image, double sigma, int pad, double truncation = 3.0);

  const PlaneD& log_blur(int polarity, double sigma_prime) const;

  int pad() const { return pad_; }
  int width() const { return width_; }
  int height() const { return height_; }
  double sigma() const { return sigma_; }

 private:
  int pad_, width_, height_;
  double sigma_;
  PlaneD on_padded_, off_padded_;
  mutable std::map<std::pair<int, long long>, PlaneD> cache_;
};

/// Weighted-geometric-mean cell response evaluated through the context.
/// Bit-identical to cell_response() for matching sigma and covering pad.
ResponseMap eval_cell(const CellContext& ctx, const CorfCell& cell);

}  // namespace corf::detail
