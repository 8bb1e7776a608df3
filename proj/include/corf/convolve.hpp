#pragma once

#include <Eigen/Core>

#include "corf/types.hpp"

namespace corf {

enum class Border {
  Reflect,  // mirror without repeating the edge pixel
  Zero,     // values outside the plane read as 0
};

/// Mirrors i into [0, n) without repeating the edge sample.
long reflect_index(long i, long n);

/// Correlation-style 2-D convolution; output dimensions equal input
/// dimensions. Requires kernel side <= 2*min(width, height) + 1.
ResponseMap convolve(const PlaneD& in, const Kernel& kernel,
                     Border border = Border::Reflect);
ResponseMap convolve(const Image& in, const Kernel& kernel,
                     Border border = Border::Reflect);

/// 1-D passes with the same orientation convention as convolve();
/// convolving rows then columns with u and v equals the 2-D kernel v*u^T.
PlaneD convolve_rows(const PlaneD& in, const Eigen::VectorXd& taps, Border border);
PlaneD convolve_cols(const PlaneD& in, const Eigen::VectorXd& taps, Border border);

}  // namespace corf
