#include "corf/detail/engine.hpp"

#include <bit>
#include <cmath>

#include "corf/convolve.hpp"
#include "corf/lgn.hpp"

namespace corf::detail {

void subunit_shift(const CorfCell& cell, int i, int& dx, int& dy) {
  double x, y;
  cell.position_of(i, x, y);
  dx = static_cast<int>(std::lround(x));
  dy = static_cast<int>(std::lround(y));
}

int required_pad(const CorfCell& cell) {
  double rho_max = 0.0;
  for (const auto& s : cell.subunits) rho_max = std::max(rho_max, s.rho);
  return static_cast<int>(std::ceil(rho_max)) + 1;
}

PlaneD gaussian_blur_zero(const PlaneD& in, double sigma_prime) {
  if (!(sigma_prime > 0.0)) throw InvalidArgument("blur std must be > 0");
  const int r = static_cast<int>(std::ceil(3.0 * sigma_prime));
  Eigen::VectorXd taps(2 * r + 1);
  for (int x = -r; x <= r; ++x)
    taps(r + x) =
        std::exp(-(static_cast<double>(x) * x) / (2.0 * sigma_prime * sigma_prime));
  taps /= taps.sum();
  return convolve_cols(convolve_rows(in, taps, Border::Zero), taps, Border::Zero);
}

PlaneD exp_flushing(const PlaneD& x) {
  return (x < -708.0).select(PlaneD::Zero(x.rows(), x.cols()), x.exp());
}

CellContext::CellContext(const Image& image, double sigma, int pad, double truncation)
    : pad_(pad), width_(image.width()), height_(image.height()), sigma_(sigma) {
  if (pad_ < 0) throw InvalidArgument("pad must be >= 0");
  LgnPair lgn = lgn_response_pair(image, sigma, truncation);
  on_padded_ = PlaneD::Zero(height_ + 2 * pad_, width_ + 2 * pad_);
  off_padded_ = on_padded_;
  on_padded_.block(pad_, pad_, height_, width_) = lgn.on;
  off_padded_.block(pad_, pad_, height_, width_) = lgn.off;
}

const PlaneD& CellContext::log_blur(int polarity, double sigma_prime) const {
  const auto key = std::make_pair(polarity, std::bit_cast<long long>(sigma_prime));
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    const PlaneD& src = polarity > 0 ? on_padded_ : off_padded_;
    it = cache_.emplace(key, gaussian_blur_zero(src, sigma_prime).log()).first;
  }
  return it->second;
}

ResponseMap eval_cell(const CellContext& ctx, const CorfCell& cell) {
  validate_cell(cell);
  const int h = ctx.height(), w = ctx.width(), p = ctx.pad();
  const double weight_sum = cell.weights.sum();

  PlaneD acc = PlaneD::Zero(h, w);
  for (int i = 0; i < cell.size(); ++i) {
    const SubUnit& s = cell.subunits[i];
    if (s.sigma != ctx.sigma())
      throw InvalidArgument("sub-unit sigma does not match evaluation context");
    int dx, dy;
    subunit_shift(cell, i, dx, dy);
    if (std::abs(dx) > p || std::abs(dy) > p)
      throw DimensionError("context padding does not cover sub-unit shift");
    // log(0) = -inf propagates the geometric mean's AND semantics.
    acc += cell.weights(i) * ctx.log_blur(s.delta, s.sigma_prime)
                                 .block(p + dy, p + dx, h, w);
  }
  return exp_flushing(acc / weight_sum);
}

}  // namespace corf::detail
