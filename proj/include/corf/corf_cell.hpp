#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "corf/types.hpp"

namespace corf {

/// Maps any angle to [0, 2*pi).
double normalize_angle(double a);

/// One pool of same-polarity model LGN cells: polarity, LGN scale,
/// polar position about the cell center, and the pooling blur std.
struct SubUnit {
  int delta = +1;            // +1 center-on, -1 center-off
  double sigma = 1.0;        // LGN scale, pixels
  double rho = 0.0;          // radius, pixels
  double phi = 0.0;          // polar angle, [0, 2*pi)
  double sigma_prime = 0.5;  // pooling blur std, pixels

  void validate() const;
};

/// How sub-units are placed and pooled when configuring a cell.
struct GeometryPolicy {
  std::vector<double> radius_factors{1.25, 2.5};  // circles at rho = f*sigma
  double sigma0_factor = 0.2;                     // sigma' = sigma0_factor*sigma + alpha*rho
  double alpha = 0.05;
  double maxima_threshold = 0.2;  // fraction of the per-circle response max
  double nms_window_deg = 5.0;    // angular non-maximum suppression half-window
  double weight_sigma_factor = 1.0;  // sigma_hat = factor * max rho
  double truncation = 3.0;        // LGN kernel truncation

  void validate() const;
};

/// An orientation-selective model simple cell: sub-units plus their
/// aggregation weights. Rotation is kept as an accumulated offset so
/// repeated rotations compose exactly; observable angles are always the
/// normalized base + offset.
struct CorfCell {
  std::vector<SubUnit> subunits;
  Eigen::VectorXd weights;
  double preferred_orientation = 0.0;  // base, radians
  double source_sigma = 0.0;           // sigma used at configuration
  double rotation = 0.0;               // accumulated rotation offset

  int size() const { return static_cast<int>(subunits.size()); }
  double phi_at(int i) const { return normalize_angle(subunits[i].phi + rotation); }
  double preferred() const { return normalize_angle(preferred_orientation + rotation); }

  /// Sub-unit center relative to the cell center, rotation applied.
  void position_of(int i, double& x, double& y) const;
};

void validate_cell(const CorfCell& cell);

/// Configures a cell of scale sigma on the canonical stimulus (a vertical
/// step edge, dark left / bright right, through the canvas center):
/// samples both rectified LGN responses along each concentric circle at
/// 1-degree steps with bilinear interpolation and turns thresholded
/// angular local maxima into sub-units. Preferred orientation is 0.
CorfCell configure(double sigma, const GeometryPolicy& geometry = {});

/// Adds psi to every sub-unit polar angle and the preferred orientation.
CorfCell rotate_set(const CorfCell& cell, double psi);

/// Same geometry, different response scale: updates every sub-unit's
/// sigma and recomputes sigma' from the policy; positions stay fixed.
CorfCell with_response_sigma(const CorfCell& cell, double sigma,
                             const GeometryPolicy& geometry = {});

/// Pooled sub-unit response: picks the map matching the polarity,
/// shifts it by the rounded (-rho cos phi, -rho sin phi) and blurs with a
/// unit-sum Gaussian of std sigma' truncated at 3*sigma'. The map is
/// treated as zero outside its domain.
ResponseMap subunit_response(const ResponseMap& on_map, const ResponseMap& off_map,
                             const SubUnit& s);

/// Weighted geometric mean of all sub-unit responses; a zero factor
/// forces a zero output (AND semantics).
ResponseMap cell_response(const Image& image, const CorfCell& cell);

/// Pointwise maximum across per-orientation maps.
ResponseMap orientation_superposition(const std::vector<ResponseMap>& maps);

/// (prod_i m_i^{w_i})^{1/sum w} over non-negative maps, computed in log
/// space; an exact zero in any factor yields an exact zero.
ResponseMap weighted_geometric_mean(const std::vector<ResponseMap>& maps,
                                    const Eigen::VectorXd& weights);

// JSON round trip: {source_sigma, preferred_orientation,
// subunits:[{delta,sigma,rho,phi,sigma_prime}], weights:[...]}.
std::string cell_to_json(const CorfCell& cell);
CorfCell cell_from_json(const std::string& text);
void save_cell(const std::string& path, const CorfCell& cell);
CorfCell load_cell(const std::string& path);

}  // namespace corf
