#pragma once

#include "corf/corf_cell.hpp"
#include "corf/types.hpp"

namespace corf {

/// Push set S paired with its opposite-contrast, beta-separated pull set.
struct PushPullCell {
  CorfCell push;
  CorfCell pull;
  double beta = 0.0;  // extra on/off separation, pixels
  double k = 1.8;     // pull inhibition strength

  void validate() const;
};

/// Widens the on/off separation: each sub-unit at (x, y) = (rho cos phi,
/// rho sin phi) moves to x + beta/2 when x > 0, x - beta/2 when x < 0,
/// and stays put when x == 0. Coordinates are taken in the cell's
/// configuration frame (perpendicular to the preferred orientation);
/// sigma' is recomputed from the new radius.
CorfCell shift_set(const CorfCell& cell, double beta,
                   const GeometryPolicy& geometry = {});

/// The pull set: shift_set with every polarity negated; weights kept.
CorfCell pull_set(const CorfCell& cell, double beta,
                  const GeometryPolicy& geometry = {});

PushPullCell make_pushpull(const CorfCell& push, double beta, double k,
                           const GeometryPolicy& geometry = {});

PushPullCell rotate_pushpull(const PushPullCell& cell, double psi);

/// max(0, r_push - k * r_pull); the signed variant skips rectification.
ResponseMap pushpull_response(const Image& image, const PushPullCell& cell);
ResponseMap pushpull_response_signed(const Image& image, const PushPullCell& cell);

std::string pushpull_to_json(const PushPullCell& cell);
PushPullCell pushpull_from_json(const std::string& text);

}  // namespace corf
