#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include <corf/corf_cell.hpp>
#include <corf/lgn.hpp>
#include <corf/pushpull.hpp>
#include <corf/rng.hpp>

#include "common.hpp"

namespace corf::cli {

namespace {

constexpr double kPi = std::numbers::pi;

// Compact literal transcription of the response equations, independent of
// the library's padded-canvas evaluation path. Used only by selfcheck.
namespace literal {

PlaneD lgn_map(const Image& img, double sigma, int polarity) {
  const long r = static_cast<long>(std::ceil(3.0 * sigma));
  const double si = 0.5 * sigma;
  PlaneD taps(2 * r + 1, 2 * r + 1);
  for (long y = -r; y <= r; ++y)
    for (long x = -r; x <= r; ++x) {
      const double rr = double(x) * x + double(y) * y;
      taps(r + y, r + x) =
          polarity * (std::exp(-rr / (2 * si * si)) / (2 * kPi * si * si) -
                      std::exp(-rr / (2 * sigma * sigma)) / (2 * kPi * sigma * sigma));
    }
  taps -= taps.mean();

  const long rows = img.height(), cols = img.width();
  PlaneD out(rows, cols);
  for (long y = 0; y < rows; ++y)
    for (long x = 0; x < cols; ++x) {
      double acc = 0.0;
      for (long dy = -r; dy <= r; ++dy)
        for (long dx = -r; dx <= r; ++dx) {
          long sy = y + dy, sx = x + dx;
          while (sy < 0 || sy >= rows) sy = sy < 0 ? -sy : 2 * rows - 2 - sy;
          while (sx < 0 || sx >= cols) sx = sx < 0 ? -sx : 2 * cols - 2 - sx;
          acc += taps(r + dy, r + dx) * img.values(sy, sx);
        }
      out(y, x) = std::max(0.0, acc);
    }
  return out;
}

PlaneD cell_map(const Image& img, const CorfCell& cell) {
  const PlaneD on = lgn_map(img, cell.source_sigma, +1);
  const PlaneD off = lgn_map(img, cell.source_sigma, -1);
  const long rows = img.height(), cols = img.width();

  PlaneD product = PlaneD::Ones(rows, cols);
  for (int i = 0; i < cell.size(); ++i) {
    const SubUnit& s = cell.subunits[i];
    const PlaneD& c = s.delta > 0 ? on : off;
    const double phi = cell.phi_at(i);
    const long da = std::lround(-s.rho * std::cos(phi));
    const long db = std::lround(-s.rho * std::sin(phi));
    const long r = static_cast<long>(std::ceil(3.0 * s.sigma_prime));
    PlaneD g(2 * r + 1, 2 * r + 1);
    for (long b = -r; b <= r; ++b)
      for (long a = -r; a <= r; ++a)
        g(r + b, r + a) = std::exp(-(double(a) * a + double(b) * b) /
                                   (2 * s.sigma_prime * s.sigma_prime));
    g /= g.sum();

    for (long y = 0; y < rows; ++y)
      for (long x = 0; x < cols; ++x) {
        double acc = 0.0;
        for (long b = -r; b <= r; ++b)
          for (long a = -r; a <= r; ++a) {
            const long sy = y - db - b, sx = x - da - a;
            if (sy < 0 || sy >= rows || sx < 0 || sx >= cols) continue;
            acc += c(sy, sx) * g(r + b, r + a);
          }
        product(y, x) *= std::pow(acc, cell.weights(i));
      }
  }
  return product.pow(1.0 / cell.weights.sum());
}

}  // namespace literal

struct CheckList {
  int failures = 0;
  void report(bool ok, const char* name) {
    std::printf("%s: %s\n", ok ? "PASS" : "FAIL", name);
    if (!ok) ++failures;
  }
};

}  // namespace

void register_selfcheck(CLI::App& app) {
  CLI::App* sub = app.add_subcommand("selfcheck", "Run the embedded invariant suite");
  sub->configurable();
  sub->callback([] {
    CheckList checks;

    bool zero_sum = true, negation = true;
    for (double sigma : {1.0, 2.5, 5.0}) {
      const Kernel on = dog_kernel({sigma, +1});
      const Kernel off = dog_kernel({sigma, -1});
      zero_sum = zero_sum && std::abs(on.taps.sum()) < 1e-12;
      negation = negation && (off.taps == -on.taps).all();
    }
    checks.report(zero_sum, "DoG kernel taps sum to zero (sigma 1, 2.5, 5)");
    checks.report(negation, "center-off kernel is the exact negation");

    const Image flat{PlaneD::Constant(24, 24, 0.5)};
    checks.report(lgn_response(flat, {2.0, +1}).maxCoeff() < 1e-12,
                  "constant image yields an all-zero LGN response");

    // fixed pseudo-random 16x16 fixture
    Rng rng(16161616);
    PlaneD fixture(16, 16);
    for (long i = 0; i < fixture.size(); ++i)
      fixture(i / 16, i % 16) = rng.next_unit();
    const Image img{std::move(fixture)};

    const CorfCell cell = configure(2.0);
    const double cell_err =
        (cell_response(img, cell) - literal::cell_map(img, cell)).abs().maxCoeff();
    checks.report(cell_err < 1e-9,
                  "cell response matches the literal equations on the fixture");

    const PushPullCell pp = make_pushpull(cell, 2.0, 1.8);
    const PlaneD literal_pp =
        (literal::cell_map(img, pp.push) - 1.8 * literal::cell_map(img, pp.pull))
            .max(0.0);
    const double pp_err =
        (pushpull_response(img, pp) - literal_pp).abs().maxCoeff();
    checks.report(pp_err < 1e-9,
                  "push-pull response matches the literal equations on the fixture");

    PlaneD ev = PlaneD::Zero(48, 48);
    ev.rightCols(24).setConstant(1.0);
    const Image edge{std::move(ev)};
    std::vector<double> peaks;
    for (double deg : {0.0, 15.0, 30.0, 45.0, 90.0})
      peaks.push_back(
          cell_response(edge, rotate_set(cell, deg * kPi / 180.0)).maxCoeff());
    const bool tuned = peaks[1] <= peaks[0] && peaks[2] <= peaks[1] &&
                       peaks[3] <= peaks[2] && peaks[3] <= 0.05 * peaks[0] &&
                       peaks[4] <= 0.05 * peaks[0];
    checks.report(tuned, "orientation tuning is negligible beyond 45 degrees");

    if (checks.failures > 0)
      throw Error(std::to_string(checks.failures) + " selfcheck(s) failed");
    std::printf("all selfchecks passed\n");
  });
}

}  // namespace corf::cli
