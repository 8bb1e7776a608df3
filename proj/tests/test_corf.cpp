#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <corf/corf_cell.hpp>
#include <corf/detail/engine.hpp>
#include <corf/lgn.hpp>
#include <corf/rng.hpp>

#include <cmath>
#include <numbers>

#include "oracle.hpp"
#include "test_util.hpp"

using namespace corf;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("configuration reproduces the eight-sub-unit edge cell") {
  const CorfCell cell = configure(2.0);
  REQUIRE(cell.size() == 8);
  CHECK(cell.preferred() == 0.0);
  CHECK(cell.source_sigma == 2.0);

  int on = 0, off = 0;
  for (const auto& s : cell.subunits) (s.delta > 0 ? on : off)++;
  CHECK(on == 4);
  CHECK(off == 4);

  // each circle contributes two center-on and two center-off sub-units
  for (double rho : {2.0 * 1.25, 2.0 * 2.5}) {
    int circle_on = 0, circle_off = 0;
    for (const auto& s : cell.subunits)
      if (s.rho == rho) (s.delta > 0 ? circle_on : circle_off)++;
    CHECK(circle_on == 2);
    CHECK(circle_off == 2);
  }

  // center-on pool on the bright side (x > 0), center-off on the dark side,
  // mirror-symmetric about the edge
  for (int i = 0; i < cell.size(); ++i) {
    double x, y;
    cell.position_of(i, x, y);
    if (cell.subunits[i].delta > 0)
      CHECK(x > 0.0);
    else
      CHECK(x < 0.0);

    bool has_mirror = false;
    for (int j = 0; j < cell.size(); ++j) {
      double mx, my;
      cell.position_of(j, mx, my);
      if (cell.subunits[j].delta == -cell.subunits[i].delta &&
          std::abs(mx + x) < 1e-6 && std::abs(my - y) < 1e-6)
        has_mirror = true;
    }
    CHECK(has_mirror);
  }

  // weights follow the configured Gaussian decay law
  double rho_max = 0.0;
  for (const auto& s : cell.subunits) rho_max = std::max(rho_max, s.rho);
  for (int i = 0; i < cell.size(); ++i) {
    const double expected =
        std::exp(-cell.subunits[i].rho * cell.subunits[i].rho / (2.0 * rho_max * rho_max));
    CHECK(cell.weights(i) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("degenerate thresholds are rejected") {
  GeometryPolicy g;
  g.maxima_threshold = 1.0;
  CHECK_THROWS_AS(configure(2.0, g), InvalidArgument);
  g.maxima_threshold = 0.0;
  CHECK_THROWS_AS(configure(2.0, g), InvalidArgument);
  CHECK_THROWS_AS(configure(-1.0), InvalidArgument);
}

TEST_CASE("rotation identity, additivity and point reflection") {
  const CorfCell cell = configure(2.0);

  const CorfCell same = rotate_set(cell, 0.0);
  for (int i = 0; i < cell.size(); ++i) CHECK(same.phi_at(i) == cell.phi_at(i));
  CHECK(same.preferred() == cell.preferred());

  const CorfCell two_step = rotate_set(rotate_set(cell, 0.37), 1.21);
  const CorfCell one_step = rotate_set(cell, 0.37 + 1.21);
  for (int i = 0; i < cell.size(); ++i) CHECK(two_step.phi_at(i) == one_step.phi_at(i));
  CHECK(two_step.preferred() == one_step.preferred());

  const CorfCell flipped = rotate_set(cell, kPi);
  for (int i = 0; i < cell.size(); ++i) {
    double x, y, fx, fy;
    cell.position_of(i, x, y);
    flipped.position_of(i, fx, fy);
    CHECK(std::abs(fx + x) < 1e-12);
    CHECK(std::abs(fy + y) < 1e-12);
  }
}

TEST_CASE("sub-unit response: zero map, pure blur and brute force") {
  Rng rng(101);
  const PlaneD zero = PlaneD::Zero(16, 16);
  const PlaneD on = testutil::random_plane(rng, 16, 16);
  const PlaneD off = testutil::random_plane(rng, 16, 16);

  SubUnit s{+1, 2.0, 3.0, kPi / 2.0, 1.0};
  CHECK(subunit_response(zero, zero, s).maxCoeff() == 0.0);

  // rho = 0: no shift, just the unit-sum Gaussian blur
  SubUnit centered{+1, 2.0, 0.0, 0.0, 1.0};
  const ResponseMap blurred = subunit_response(on, off, centered);
  CHECK(testutil::max_abs_diff(blurred, detail::gaussian_blur_zero(on, 1.0)) == 0.0);

  const ResponseMap got = subunit_response(on, off, s);
  CHECK(testutil::max_abs_diff(got, oracle::subunit(on, off, s, s.phi)) < 1e-9);
  CHECK((got >= 0.0).all());

  // center-off sub-units read the off map
  SubUnit s_off{-1, 2.0, 3.0, kPi / 2.0, 1.0};
  CHECK(testutil::max_abs_diff(subunit_response(on, off, s_off),
                               oracle::subunit(on, off, s_off, s_off.phi)) < 1e-9);

  CHECK_THROWS_AS(subunit_response(on, PlaneD::Zero(8, 8), s), DimensionError);
}

TEST_CASE("cell response equals the literal transcription") {
  Rng rng(103);
  const CorfCell cell = configure(2.0);
  for (int trial = 0; trial < 3; ++trial) {
    const Image img = testutil::random_image(rng, 16, 16);
    CHECK(testutil::max_abs_diff(cell_response(img, cell), oracle::cell(img, cell)) <
          1e-9);
  }
  // and for a rotated cell
  const CorfCell rot = rotate_set(cell, kPi / 6.0);
  const Image img = testutil::random_image(rng, 16, 16);
  CHECK(testutil::max_abs_diff(cell_response(img, rot), oracle::cell(img, rot)) < 1e-9);

  // up to 32x32 the literal route stays cheap enough to check directly
  const Image big = testutil::random_image(rng, 32, 32);
  CHECK(testutil::max_abs_diff(cell_response(big, cell), oracle::cell(big, cell)) <
        1e-9);
}

TEST_CASE("constant images yield a silent cell") {
  const CorfCell cell = configure(2.0);
  const Image img{PlaneD::Constant(32, 32, 0.6)};
  CHECK(cell_response(img, cell).maxCoeff() < 1e-12);
}

TEST_CASE("preferred edge drives the cell; the orthogonal cell stays quiet") {
  const CorfCell cell = configure(2.0);
  const Image edge = testutil::vertical_edge(48);
  const ResponseMap preferred = cell_response(edge, cell);

  // maximal response on the edge line
  long best_x = 0, best_y = 0;
  preferred.maxCoeff(&best_y, &best_x);
  CHECK(std::abs(static_cast<double>(best_x) - 23.5) <= 1.0);

  const ResponseMap orthogonal = cell_response(edge, rotate_set(cell, kPi / 2.0));
  CHECK(orthogonal.maxCoeff() <= 0.05 * preferred.maxCoeff());
}

TEST_CASE("orientation tuning falls off and is negligible past 45 degrees") {
  const CorfCell cell = configure(2.0);
  const Image edge = testutil::vertical_edge(48);
  std::vector<double> peaks;
  for (double deg : {0.0, 15.0, 30.0, 45.0, 60.0, 90.0})
    peaks.push_back(cell_response(edge, rotate_set(cell, deg * kPi / 180.0)).maxCoeff());
  for (std::size_t i = 1; i < peaks.size(); ++i) CHECK(peaks[i] <= peaks[0]);
  CHECK(peaks[1] <= peaks[0] + 1e-12);
  CHECK(peaks[2] <= peaks[1] + 1e-12);
  CHECK(peaks[3] <= peaks[2] + 1e-12);
  for (std::size_t i = 3; i < peaks.size(); ++i) CHECK(peaks[i] <= 0.05 * peaks[0]);
}

TEST_CASE("masking one sub-unit's receptive field silences the cell") {
  const CorfCell cell = configure(2.0);
  const Image edge = testutil::vertical_edge(64);
  const ResponseMap clean = cell_response(edge, cell);
  long peak_x = 0, peak_y = 0;
  const double peak = clean.maxCoeff(&peak_y, &peak_x);
  REQUIRE(peak > 0.01);

  // blank the field feeding sub-unit 0 at the peak location: its pooling
  // support plus the LGN support around its offset position
  double sx, sy;
  cell.position_of(0, sx, sy);
  const double cx = peak_x + sx, cy = peak_y + sy;
  const double radius =
      3.0 * cell.subunits[0].sigma_prime + 3.0 * cell.source_sigma + 2.0;
  PlaneD masked = edge.values;
  const double mean = edge.values.mean();
  for (long y = 0; y < masked.rows(); ++y)
    for (long x = 0; x < masked.cols(); ++x)
      if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius)
        masked(y, x) = mean;

  const ResponseMap silenced = cell_response(Image{std::move(masked)}, cell);
  CHECK(silenced(peak_y, peak_x) < 0.01 * peak);
}

TEST_CASE("weighted geometric mean bounds and AND semantics") {
  Rng rng(107);
  std::vector<ResponseMap> maps;
  for (int i = 0; i < 4; ++i) maps.push_back(testutil::random_plane(rng, 8, 8, 0.0, 2.0));
  Eigen::VectorXd w(4);
  w << 0.9, 0.5, 0.3, 1.4;

  const ResponseMap r = weighted_geometric_mean(maps, w);
  for (long y = 0; y < 8; ++y)
    for (long x = 0; x < 8; ++x) {
      double lo = maps[0](y, x), hi = maps[0](y, x);
      for (const auto& m : maps) {
        lo = std::min(lo, m(y, x));
        hi = std::max(hi, m(y, x));
      }
      CHECK(r(y, x) >= lo - 1e-12);
      CHECK(r(y, x) <= hi + 1e-12);
    }

  maps[2](3, 5) = 0.0;
  const ResponseMap with_zero = weighted_geometric_mean(maps, w);
  CHECK(with_zero(3, 5) == 0.0);
}

TEST_CASE("rotation equivariance on a rotated stimulus") {
  const CorfCell cell = configure(2.0);
  const Image edge = testutil::vertical_edge(96);
  const Image turned = testutil::rotate_image(edge, kPi / 6.0);

  // compare peaks over the central region, away from rotation fill
  const auto central_peak = [](const ResponseMap& m) {
    return m.block(32, 32, 32, 32).maxCoeff();
  };
  const double upright = central_peak(cell_response(edge, cell));
  const double rotated = central_peak(cell_response(turned, rotate_set(cell, kPi / 6.0)));
  CHECK(std::abs(rotated - upright) <= 0.10 * upright);
}

TEST_CASE("superposition identity, dominance and argmax equality") {
  Rng rng(109);
  const ResponseMap m = testutil::random_plane(rng, 10, 10);

  CHECK((orientation_superposition({m}) == m).all());
  CHECK((orientation_superposition({m, ResponseMap(2.0 * m)}) == 2.0 * m).all());

  // crossing bars: the superposition dominates every orientation map and
  // matches the best one at its own peak
  PlaneD xstim = PlaneD::Zero(48, 48);
  for (long i = 4; i < 44; ++i) {
    xstim(i, i) = 1.0;
    xstim(i, std::min<long>(47, i + 1)) = 1.0;
    xstim(i, 47 - i) = 1.0;
    xstim(i, std::max<long>(0, 46 - i)) = 1.0;
  }
  const Image ximg{std::move(xstim)};
  const CorfCell cell = configure(1.5);
  std::vector<ResponseMap> maps;
  for (int o = 0; o < 12; ++o)
    maps.push_back(cell_response(ximg, rotate_set(cell, o * kPi / 6.0)));
  const ResponseMap sup = orientation_superposition(maps);
  double best_single = 0.0;
  for (const auto& om : maps) {
    CHECK((sup >= om).all());
    best_single = std::max(best_single, om.maxCoeff());
  }
  CHECK(sup.maxCoeff() == best_single);

  CHECK_THROWS_AS(orientation_superposition({}), InvalidArgument);
  CHECK_THROWS_AS(orientation_superposition({m, ResponseMap(PlaneD::Zero(3, 3))}),
                  DimensionError);
}

TEST_CASE("cells with a single polarity are invalid") {
  CorfCell cell = configure(2.0);
  for (auto& s : cell.subunits) s.delta = +1;
  const Image img = testutil::vertical_edge(24);
  CHECK_THROWS_AS(cell_response(img, cell), InvalidArgument);
}

TEST_CASE("cell json round-trips exactly") {
  const CorfCell cell = rotate_set(configure(2.5), kPi / 6.0);
  const CorfCell back = cell_from_json(cell_to_json(cell));
  REQUIRE(back.size() == cell.size());
  CHECK(back.source_sigma == cell.source_sigma);
  CHECK(back.preferred() == cell.preferred());
  for (int i = 0; i < cell.size(); ++i) {
    CHECK(back.subunits[i].delta == cell.subunits[i].delta);
    CHECK(back.subunits[i].sigma == cell.subunits[i].sigma);
    CHECK(back.subunits[i].rho == cell.subunits[i].rho);
    CHECK(back.phi_at(i) == cell.phi_at(i));
    CHECK(back.subunits[i].sigma_prime == cell.subunits[i].sigma_prime);
    CHECK(back.weights(i) == cell.weights(i));
  }
  CHECK_THROWS_AS(cell_from_json("{\"source_sigma\": 2.0}"), FormatError);
  CHECK_THROWS_AS(cell_from_json("not json"), FormatError);
}

TEST_CASE("response-sigma override keeps geometry and rescales the blur") {
  const CorfCell cell = configure(2.0);
  const CorfCell wider = with_response_sigma(cell, 2.5);
  CHECK(wider.source_sigma == 2.5);
  for (int i = 0; i < cell.size(); ++i) {
    CHECK(wider.subunits[i].rho == cell.subunits[i].rho);
    CHECK(wider.phi_at(i) == cell.phi_at(i));
    CHECK(wider.subunits[i].sigma == 2.5);
    GeometryPolicy g;
    CHECK(wider.subunits[i].sigma_prime ==
          doctest::Approx(g.sigma0_factor * 2.5 + g.alpha * cell.subunits[i].rho)
              .epsilon(1e-12));
  }
}
