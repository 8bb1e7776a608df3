#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <corf/bank.hpp>
#include <corf/io_util.hpp>
#include <corf/rng.hpp>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "test_util.hpp"

using namespace corf;

namespace {

constexpr double kPi = std::numbers::pi;

FilterBank mini_bank() {
  return build_bank({1.5, 2.0}, default_orientations(), 1.8, BetaPolicy{});
}

PlaneF random_channel(Rng& rng, int rows, int cols) {
  PlaneF ch(rows, cols);
  for (long y = 0; y < rows; ++y)
    for (long x = 0; x < cols; ++x) ch(y, x) = static_cast<float>(rng.next_unit());
  return ch;
}

}  // namespace

TEST_CASE("defaults: 17 scales, 12 orientations, k = 1.8") {
  const auto sigmas = default_sigmas();
  REQUIRE(sigmas.size() == 17);
  CHECK(sigmas.front() == 1.0);
  CHECK(sigmas.back() == 5.0);
  CHECK(sigmas[1] - sigmas[0] == 0.25);

  const auto orientations = default_orientations();
  REQUIRE(orientations.size() == 12);
  CHECK(orientations.front() == 0.0);
  CHECK(orientations.back() == doctest::Approx(330.0 * kPi / 180.0).epsilon(1e-12));

  const FilterBank bank = build_default_bank();
  CHECK(bank.cells.size() == 17);
  CHECK(bank.k == 1.8);
  for (std::size_t i = 0; i < bank.cells.size(); ++i) {
    CHECK(bank.cells[i].push.source_sigma == bank.sigmas[i]);
    CHECK(bank.cells[i].beta == bank.sigmas[i]);  // beta follows sigma by default
  }
}

TEST_CASE("a one-cell bank is valid") {
  const FilterBank bank = build_bank({2.0}, {0.0}, 1.8, BetaPolicy{});
  CHECK(bank.cells.size() == 1);
  const Image edge = testutil::vertical_edge(24);
  const FeatureTensor t = apply_bank(edge, bank);
  CHECK(t.channel_count() == 1);
  CHECK(t.height == 24);
  CHECK(t.width == 24);
}

TEST_CASE("identical parameters build byte-identical banks") {
  const FilterBank a = mini_bank();
  const FilterBank b = mini_bank();
  CHECK(bank_to_json(a) == bank_to_json(b));
}

TEST_CASE("bank json round-trips and reproduces responses") {
  const FilterBank bank = mini_bank();
  const FilterBank back = bank_from_json(bank_to_json(bank));
  const Image img = testutil::binary_texture(20, 5);
  CHECK(tensor_to_bytes(apply_bank(img, bank)) == tensor_to_bytes(apply_bank(img, back)));
  CHECK_THROWS_AS(bank_from_json("{}"), FormatError);
}

TEST_CASE("default bank on a 32x32 image yields a 32x32x17 tensor") {
  const FilterBank bank = build_default_bank();
  Rng rng(500);
  const FeatureTensor t = apply_bank(testutil::random_image(rng, 32, 32), bank);
  CHECK(t.height == 32);
  CHECK(t.width == 32);
  CHECK(t.channel_count() == 17);
  for (const auto& ch : t.channels) CHECK((ch >= 0.0f).all());
}

TEST_CASE("constant images produce an all-zero tensor") {
  const FilterBank bank = mini_bank();
  const Image img{PlaneD::Constant(24, 24, 0.37)};
  const FeatureTensor t = apply_bank(img, bank);
  for (const auto& ch : t.channels) CHECK(ch.abs().maxCoeff() < 1e-12f);
}

TEST_CASE("channels dominate their per-orientation responses") {
  const FilterBank bank = mini_bank();
  const Image img = testutil::binary_texture(24, 17);
  const FeatureTensor t = apply_bank(img, bank);

  for (std::size_t c = 0; c < bank.cells.size(); ++c) {
    const PlaneD channel = t.channels[c].cast<double>();
    PlaneD best = PlaneD::Zero(img.height(), img.width());
    for (double psi : bank.orientations) {
      const ResponseMap r =
          pushpull_response(img, rotate_pushpull(bank.cells[c], psi));
      CHECK((channel + 1e-6 >= r).all());
      best = best.max(r);
    }
    CHECK(testutil::max_abs_diff(channel, best.cast<float>().cast<double>()) == 0.0);
  }
}

TEST_CASE("superposing fewer orientations never increases the channel") {
  const std::vector<double> all = default_orientations();
  const std::vector<double> subset(all.begin(), all.begin() + 5);
  const FilterBank full = build_bank({2.0}, all, 1.8, BetaPolicy{});
  const FilterBank partial = build_bank({2.0}, subset, 1.8, BetaPolicy{});
  const Image img = testutil::binary_texture(24, 29);
  const PlaneF f = apply_bank(img, full).channels[0];
  const PlaneF p = apply_bank(img, partial).channels[0];
  CHECK((p <= f).all());
}

TEST_CASE("thread count does not change the bytes") {
  const FilterBank bank = mini_bank();
  const Image img = testutil::binary_texture(28, 41);
  const std::string one = tensor_to_bytes(apply_bank(img, bank, 1));
  const std::string eight = tensor_to_bytes(apply_bank(img, bank, 8));
  CHECK(one == eight);
}

namespace {

// Anti-aliased edge patch: a contrast step across a line at `angle`
// through (px, py) with feathered ends, on a mid-gray field. Rendering
// the rotated scene directly keeps both test images resampling-free.
Image edge_patch(int side, double angle, double px, double py, double half_len) {
  PlaneD v(side, side);
  const double c = std::cos(angle), s = std::sin(angle);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x) {
      const double dx = x - px, dy = y - py;
      const double across = c * dx + s * dy;
      const double along = -s * dx + c * dy;
      const double step = std::erf(across / 0.8);
      const double mask = std::clamp((half_len - std::abs(along)) / 2.0, 0.0, 1.0);
      v(y, x) = std::clamp(0.5 + 0.5 * step * mask, 0.0, 1.0);
    }
  return Image(std::move(v));
}

}  // namespace

TEST_CASE("rotated inputs give approximately rotated channels") {
  // mid-range scales: the patch covers their receptive fields
  const FilterBank bank =
      build_bank({2.25, 2.75}, default_orientations(), 1.8, BetaPolicy{});
  constexpr double kAngle = kPi / 6.0;
  const double cx = 31.5, cy = 31.5;
  const double ox = -6.75, oy = 2.0;  // patch offset from the rotation center

  const Image upright = edge_patch(64, 0.0, cx + ox, cy + oy, 7.0);
  const double px = std::cos(kAngle) * ox - std::sin(kAngle) * oy + cx;
  const double py = std::sin(kAngle) * ox + std::cos(kAngle) * oy + cy;
  const Image turned = edge_patch(64, kAngle, px, py, 7.0);

  const FeatureTensor t_up = apply_bank(upright, bank);
  const FeatureTensor t_turned = apply_bank(turned, bank);
  for (int c = 0; c < t_up.channel_count(); ++c) {
    long uy, ux, ty, tx;
    const double pu = t_up.channels[c].cast<double>().maxCoeff(&uy, &ux);
    const double pt = t_turned.channels[c].cast<double>().maxCoeff(&ty, &tx);
    CHECK(std::abs(pt - pu) <= 0.10 * pu);

    // the upright peak, rotated about the image center, lands on the
    // turned peak
    const double ex = std::cos(kAngle) * (ux - cx) - std::sin(kAngle) * (uy - cy) + cx;
    const double ey = std::sin(kAngle) * (ux - cx) + std::cos(kAngle) * (uy - cy) + cy;
    CHECK(std::hypot(tx - ex, ty - ey) <= 2.0);
  }
}

TEST_CASE("tensor bytes: header layout and exact round trip") {
  FeatureTensor t;
  t.height = 2;
  t.width = 2;
  PlaneF ch(2, 2);
  ch << 0.0f, 0.5f, 1.0f, 0.25f;
  t.channels.push_back(ch);

  const std::string bytes = tensor_to_bytes(t);
  REQUIRE(bytes.size() == 20 + 16);
  CHECK(bytes.compare(0, 4, "CORF") == 0);
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);   // version, little-endian
  CHECK(static_cast<unsigned char>(bytes[8]) == 2);   // height
  CHECK(static_cast<unsigned char>(bytes[12]) == 2);  // width
  CHECK(static_cast<unsigned char>(bytes[16]) == 1);  // channels

  const FeatureTensor back = tensor_from_bytes(bytes);
  CHECK((back.channels[0] == ch).all());

  // default-shape tensor payload arithmetic
  Rng rng(77);
  FeatureTensor big;
  big.height = 32;
  big.width = 32;
  for (int c = 0; c < 17; ++c) big.channels.push_back(random_channel(rng, 32, 32));
  const std::string big_bytes = tensor_to_bytes(big);
  CHECK(big_bytes.size() == 20 + 32 * 32 * 17 * 4);

  const auto path = std::filesystem::temp_directory_path() / "corf_tensor_test.corf";
  export_tensor(big, path.string());
  const FeatureTensor reloaded = import_tensor(path.string());
  REQUIRE(reloaded.channel_count() == 17);
  for (int c = 0; c < 17; ++c) CHECK((reloaded.channels[c] == big.channels[c]).all());
  CHECK(tensor_to_bytes(reloaded) == big_bytes);
}

TEST_CASE("malformed tensor bytes are rejected") {
  CHECK_THROWS_AS(tensor_from_bytes("FROBXXXXXXXXXXXXXXXXXXXX"), FormatError);
  FeatureTensor t;
  t.height = 1;
  t.width = 1;
  PlaneF ch(1, 1);
  ch << 1.0f;
  t.channels.push_back(ch);
  std::string bytes = tensor_to_bytes(t);
  bytes.pop_back();
  CHECK_THROWS_AS(tensor_from_bytes(bytes), FormatError);
  bytes[4] = 9;
  CHECK_THROWS_AS(tensor_from_bytes(bytes), FormatError);
}

TEST_CASE("invalid bank parameters are rejected with the offending sigma") {
  CHECK_THROWS_AS(build_bank({}, {0.0}, 1.8, BetaPolicy{}), InvalidArgument);
  CHECK_THROWS_AS(build_bank({2.0, 1.0}, {0.0}, 1.8, BetaPolicy{}), InvalidArgument);
  CHECK_THROWS_AS(build_bank({1.0}, {0.0, 7.0}, 1.8, BetaPolicy{}), InvalidArgument);
  CHECK_THROWS_AS(build_bank({1.0}, {0.0}, -1.0, BetaPolicy{}), InvalidArgument);
  BetaPolicy negative{BetaPolicy::Mode::Fixed, -1.0};
  CHECK_THROWS_AS(build_bank({1.0}, {0.0}, 1.8, negative), InvalidArgument);
}

TEST_CASE("hostile tensor headers cannot wrap the size check") {
  std::string bytes = "CORF";
  const auto put = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  put(1);
  put(0xffffffffu);  // height
  put(0xffffffffu);  // width
  put(16);           // channels
  CHECK_THROWS_AS(tensor_from_bytes(bytes), FormatError);

  // a NaN payload value is rejected too
  std::string nan_bytes = "CORF";
  const auto put2 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
      nan_bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  put2(1);
  put2(1);
  put2(1);
  put2(1);
  put2(0x7fc00000u);  // quiet NaN
  CHECK_THROWS_AS(tensor_from_bytes(nan_bytes), FormatError);
}
