#pragma once

#include "corf/types.hpp"

namespace corf {

/// Center-surround receptive field: difference of two Gaussians with
/// outer std sigma and inner std sigma/2.
struct DogSpec {
  double sigma = 1.0;      // outer Gaussian std, pixels
  int polarity = +1;       // +1 center-on, -1 center-off
  double truncation = 3.0; // kernel half-width in multiples of sigma

  void validate() const;
};

/// Discrete DoG kernel: side = 2*ceil(truncation*sigma) + 1, taps shifted
/// by a constant so they sum to zero exactly (the continuous DoG
/// integrates to zero; discretization would otherwise leak DC).
Kernel dog_kernel(const DogSpec& spec);

/// Half-wave-rectified model LGN response: max(0, image * DoG).
ResponseMap lgn_response(const Image& image, const DogSpec& spec);

/// Signed response before rectification.
ResponseMap lgn_response_unrectified(const Image& image, const DogSpec& spec);

/// Both polarities from a single filtering pass; off == max(0, -signed).
struct LgnPair {
  ResponseMap on;
  ResponseMap off;
};
LgnPair lgn_response_pair(const Image& image, double sigma, double truncation = 3.0);

}  // namespace corf
