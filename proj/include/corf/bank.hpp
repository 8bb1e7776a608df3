#pragma once

#include <string>
#include <vector>

#include "corf/pushpull.hpp"
#include "corf/types.hpp"

namespace corf {

/// How the pull separation is chosen per scale.
struct BetaPolicy {
  enum class Mode { SigmaProportional, Fixed };
  Mode mode = Mode::SigmaProportional;
  double value = 1.0;  // factor (proportional) or pixels (fixed)

  double beta_for(double sigma) const {
    return mode == Mode::SigmaProportional ? value * sigma : value;
  }
  void validate() const;
};

/// Multi-sigma, multi-orientation push-pull filter bank. One configured
/// push-pull cell per sigma; orientations are applied by rotation.
struct FilterBank {
  std::vector<double> sigmas;
  std::vector<double> orientations;  // radians, strictly increasing in [0, 2*pi)
  double k = 1.8;
  BetaPolicy beta;
  GeometryPolicy geometry;
  std::vector<PushPullCell> cells;  // one per sigma
};

/// 17 scales, 1.0 to 5.0 at 0.25 steps.
std::vector<double> default_sigmas();
/// 12 orientations, 0 to 330 degrees at 30-degree steps.
std::vector<double> default_orientations();

FilterBank build_bank(const std::vector<double>& sigmas,
                      const std::vector<double>& orientations, double k,
                      const BetaPolicy& beta, const GeometryPolicy& geometry = {});
FilterBank build_default_bank();

/// Per-sigma responses stacked channel-major; 32-bit storage.
struct FeatureTensor {
  int height = 0;
  int width = 0;
  std::vector<PlaneF> channels;

  int channel_count() const { return static_cast<int>(channels.size()); }
};

/// One channel per sigma: push-pull response at every orientation
/// (rotating the cell), max-superposed. Deterministic for any thread count.
FeatureTensor apply_bank(const Image& image, const FilterBank& bank, int threads = 1);

/// Channel-major, row-major flattening in double precision.
Eigen::VectorXd flatten(const FeatureTensor& tensor);

// Binary tensor format (little-endian): magic "CORF", u32 version=1,
// u32 height, u32 width, u32 channels, then channels*height*width
// IEEE-754 floats, channel-major with row-major planes.
std::string tensor_to_bytes(const FeatureTensor& tensor);
FeatureTensor tensor_from_bytes(const std::string& bytes);
void export_tensor(const FeatureTensor& tensor, const std::string& path);
FeatureTensor import_tensor(const std::string& path);

std::string bank_to_json(const FilterBank& bank);
FilterBank bank_from_json(const std::string& text);

}  // namespace corf
