#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <corf/corf_cell.hpp>
#include <corf/pushpull.hpp>
#include <corf/rng.hpp>

#include <cmath>
#include <numbers>

#include "oracle.hpp"
#include "test_util.hpp"

using namespace corf;

namespace {
constexpr double kPi = std::numbers::pi;

CorfCell handmade_cell(double rho, double phi) {
  CorfCell cell;
  cell.source_sigma = 2.0;
  GeometryPolicy g;
  const auto sp = [&](double r) { return g.sigma0_factor * 2.0 + g.alpha * r; };
  cell.subunits = {{+1, 2.0, rho, phi, sp(rho)}, {-1, 2.0, rho, normalize_angle(phi + kPi), sp(rho)}};
  cell.weights = Eigen::VectorXd::Ones(2);
  return cell;
}

}  // namespace

TEST_CASE("beta = 0 leaves the set unchanged") {
  const CorfCell cell = configure(2.0);
  const CorfCell same = shift_set(cell, 0.0);
  for (int i = 0; i < cell.size(); ++i) {
    CHECK(same.subunits[i].rho == cell.subunits[i].rho);
    CHECK(same.subunits[i].phi == cell.subunits[i].phi);
    CHECK(same.subunits[i].sigma_prime == cell.subunits[i].sigma_prime);
    CHECK(same.subunits[i].delta == cell.subunits[i].delta);
  }
}

TEST_CASE("shift moves sub-units away from the edge axis") {
  const CorfCell right = handmade_cell(2.0, 0.0);
  const CorfCell shifted = shift_set(right, 1.0);
  CHECK(shifted.subunits[0].rho == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(shifted.subunits[0].phi == doctest::Approx(0.0).epsilon(1e-12));
  // the x < 0 partner lands at (2.5, pi)
  CHECK(shifted.subunits[1].rho == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(shifted.subunits[1].phi == doctest::Approx(kPi).epsilon(1e-12));

  // on-axis sub-units stay put
  CorfCell axial = handmade_cell(2.0, kPi / 2.0);
  axial.subunits[0].phi = kPi / 2.0;
  axial.subunits[0].rho = 2.0;
  CorfCell moved = shift_set(axial, 1.0);
  const double x = 2.0 * std::cos(kPi / 2.0);
  if (x == 0.0) {
    CHECK(moved.subunits[0].rho == axial.subunits[0].rho);
    CHECK(moved.subunits[0].phi == axial.subunits[0].phi);
  }

  // sigma' follows the new radius
  GeometryPolicy g;
  CHECK(shifted.subunits[0].sigma_prime ==
        doctest::Approx(g.sigma0_factor * 2.0 + g.alpha * 2.5).epsilon(1e-12));
}

TEST_CASE("pull set negates every polarity and counts swap") {
  const CorfCell cell = configure(2.0);
  const CorfCell pull = pull_set(cell, 2.0);
  REQUIRE(pull.size() == cell.size());
  int cell_on = 0, pull_on = 0;
  for (int i = 0; i < cell.size(); ++i) {
    CHECK(pull.subunits[i].delta == -cell.subunits[i].delta);
    if (cell.subunits[i].delta > 0) ++cell_on;
    if (pull.subunits[i].delta > 0) ++pull_on;
  }
  CHECK(cell_on == 4);
  CHECK(pull_on == 4);

  const CorfCell back = pull_set(pull_set(cell, 0.0), 0.0);
  for (int i = 0; i < cell.size(); ++i) {
    CHECK(back.subunits[i].delta == cell.subunits[i].delta);
    CHECK(back.subunits[i].rho == cell.subunits[i].rho);
    CHECK(back.subunits[i].phi == cell.subunits[i].phi);
  }
}

TEST_CASE("pull response equals the shifted push on the inverted stimulus") {
  const CorfCell cell = configure(2.0);
  const Image edge = testutil::vertical_edge(32);
  const Image inverted{PlaneD(1.0 - edge.values)};
  const double beta = 2.0;
  const ResponseMap pull = cell_response(edge, pull_set(cell, beta));
  const ResponseMap push_on_inverted = cell_response(inverted, shift_set(cell, beta));
  CHECK(testutil::max_abs_diff(pull, push_on_inverted) < 1e-9);
}

TEST_CASE("k = 0 reduces to the push response") {
  const CorfCell cell = configure(2.0);
  const Image edge = testutil::vertical_edge(32);
  const PushPullCell pp = make_pushpull(cell, 2.0, 0.0);
  CHECK((pushpull_response(edge, pp) == cell_response(edge, pp.push)).all());
}

TEST_CASE("push-pull matches the literal transcription") {
  Rng rng(211);
  const CorfCell cell = configure(2.0);
  const PushPullCell pp = make_pushpull(cell, 2.0, 1.8);
  for (int trial = 0; trial < 2; ++trial) {
    const Image img = testutil::random_image(rng, 16, 16);
    CHECK(testutil::max_abs_diff(pushpull_response(img, pp), oracle::pushpull(img, pp)) <
          1e-9);
  }
}

TEST_CASE("preferred edge keeps its peak under inhibition") {
  const CorfCell cell = configure(2.0);
  const Image edge = testutil::vertical_edge(48);
  const PushPullCell pp = make_pushpull(cell, 2.0, 1.8);
  const double push_peak = cell_response(edge, pp.push).maxCoeff();
  const double pp_peak = pushpull_response(edge, pp).maxCoeff();
  CHECK(pp_peak >= 0.98 * push_peak);
}

TEST_CASE("texture responses are suppressed") {
  const CorfCell cell = configure(2.0);
  const Image texture = testutil::binary_texture(48, 123);
  const PushPullCell pp = make_pushpull(cell, 2.0, 1.8);
  CHECK(pushpull_response(texture, pp).mean() < cell_response(texture, pp.push).mean());
}

TEST_CASE("response is pointwise non-increasing in k") {
  const CorfCell cell = configure(2.0);
  const Image texture = testutil::binary_texture(32, 99);
  ResponseMap prev;
  bool first = true;
  for (double k : {0.0, 0.9, 1.8, 3.6}) {
    const ResponseMap r = pushpull_response(texture, make_pushpull(cell, 2.0, k));
    if (!first) CHECK((r <= prev + 1e-15).all());
    prev = r;
    first = false;
  }
}

TEST_CASE("signed output is exactly push minus k times pull") {
  const CorfCell cell = configure(2.0);
  const Image texture = testutil::binary_texture(32, 7);
  const PushPullCell pp = make_pushpull(cell, 2.0, 1.8);
  const ResponseMap expected =
      cell_response(texture, pp.push) - 1.8 * cell_response(texture, pp.pull);
  CHECK(testutil::max_abs_diff(pushpull_response_signed(texture, pp), expected) < 1e-12);
  CHECK(testutil::max_abs_diff(pushpull_response(texture, pp), expected.max(0.0)) <
        1e-12);
  CHECK((pushpull_response(texture, pp) >= 0.0).all());
}

TEST_CASE("wider separation does not raise the preferred response") {
  const CorfCell cell = configure(2.0);
  const Image edge = testutil::vertical_edge(48);
  const double at_zero = pushpull_response(edge, make_pushpull(cell, 0.0, 1.8)).maxCoeff();
  const double at_two_sigma =
      pushpull_response(edge, make_pushpull(cell, 4.0, 1.8)).maxCoeff();
  CHECK(at_two_sigma <= at_zero + 1e-12);
}

TEST_CASE("invalid push-pull cells are rejected") {
  const CorfCell cell = configure(2.0);
  CHECK_THROWS_AS(make_pushpull(cell, -1.0, 1.8), InvalidArgument);
  CHECK_THROWS_AS(make_pushpull(cell, 2.0, -0.5), InvalidArgument);

  PushPullCell broken = make_pushpull(cell, 2.0, 1.8);
  broken.pull.subunits[0].delta = broken.push.subunits[0].delta;  // no longer negated
  CHECK_THROWS_AS(broken.validate(), InvalidArgument);
}

TEST_CASE("push-pull json round-trips") {
  const PushPullCell pp = make_pushpull(configure(1.5), 1.5, 1.8);
  const PushPullCell back = pushpull_from_json(pushpull_to_json(pp));
  CHECK(back.beta == pp.beta);
  CHECK(back.k == pp.k);
  REQUIRE(back.push.size() == pp.push.size());
  for (int i = 0; i < pp.push.size(); ++i) {
    CHECK(back.push.subunits[i].rho == pp.push.subunits[i].rho);
    CHECK(back.pull.subunits[i].rho == pp.pull.subunits[i].rho);
    CHECK(back.pull.subunits[i].delta == pp.pull.subunits[i].delta);
  }
  CHECK_THROWS_AS(pushpull_from_json("{}"), FormatError);
}
