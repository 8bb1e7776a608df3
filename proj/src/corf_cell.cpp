#include "corf/corf_cell.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "corf/detail/engine.hpp"
#include "corf/io_util.hpp"
#include "corf/lgn.hpp"

namespace corf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double bilinear(const PlaneD& map, double x, double y) {
  const long x0 = static_cast<long>(std::floor(x));
  const long y0 = static_cast<long>(std::floor(y));
  if (x0 < 0 || y0 < 0 || x0 + 1 >= map.cols() || y0 + 1 >= map.rows())
    throw InvalidArgument("bilinear sample outside the map");
  const double fx = x - static_cast<double>(x0);
  const double fy = y - static_cast<double>(y0);
  return (1.0 - fy) * ((1.0 - fx) * map(y0, x0) + fx * map(y0, x0 + 1)) +
         fy * ((1.0 - fx) * map(y0 + 1, x0) + fx * map(y0 + 1, x0 + 1));
}

struct CircleMaximum {
  int angle_index;
  double value;
};

// Thresholded angular local maxima with greedy non-maximum suppression.
std::vector<CircleMaximum> circle_maxima(const std::vector<double>& v,
                                         double threshold_fraction, int nms_window) {
  const int n = static_cast<int>(v.size());
  const double global_max = *std::max_element(v.begin(), v.end());
  if (!(global_max > 0.0)) return {};
  const double floor_value = threshold_fraction * global_max;

  std::vector<CircleMaximum> candidates;
  for (int j = 0; j < n; ++j) {
    const double prev = v[(j + n - 1) % n];
    const double next = v[(j + 1) % n];
    if (v[j] >= prev && v[j] >= next && v[j] >= floor_value && v[j] > 0.0)
      candidates.push_back({j, v[j]});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const CircleMaximum& a, const CircleMaximum& b) {
                     if (a.value != b.value) return a.value > b.value;
                     return a.angle_index < b.angle_index;
                   });

  std::vector<CircleMaximum> kept;
  for (const auto& c : candidates) {
    bool suppressed = false;
    for (const auto& k : kept) {
      int d = std::abs(c.angle_index - k.angle_index);
      d = std::min(d, n - d);
      if (d <= nms_window) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(), [](const CircleMaximum& a, const CircleMaximum& b) {
    return a.angle_index < b.angle_index;
  });
  return kept;
}

}  // namespace

double normalize_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

void SubUnit::validate() const {
  if (delta != 1 && delta != -1) throw InvalidArgument("sub-unit delta must be +-1");
  if (!(sigma > 0.0)) throw InvalidArgument("sub-unit sigma must be > 0");
  if (!(rho >= 0.0)) throw InvalidArgument("sub-unit rho must be >= 0");
  if (!(sigma_prime > 0.0)) throw InvalidArgument("sub-unit sigma' must be > 0");
  if (!std::isfinite(phi)) throw InvalidArgument("sub-unit phi must be finite");
}

void GeometryPolicy::validate() const {
  if (radius_factors.empty()) throw InvalidArgument("radii policy must not be empty");
  double prev = 0.0;
  for (double f : radius_factors) {
    if (!(f > 0.0) || f <= prev)
      throw InvalidArgument("radius factors must be positive and strictly increasing");
    prev = f;
  }
  if (!(sigma0_factor > 0.0)) throw InvalidArgument("sigma0 factor must be > 0");
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be >= 0");
  if (!(maxima_threshold > 0.0 && maxima_threshold < 1.0))
    throw InvalidArgument("maxima threshold must be in (0,1)");
  if (!(nms_window_deg >= 0.0)) throw InvalidArgument("nms window must be >= 0");
  if (!(weight_sigma_factor > 0.0))
    throw InvalidArgument("weight sigma factor must be > 0");
  if (!(truncation >= 2.0)) throw InvalidArgument("truncation must be >= 2");
}

void CorfCell::position_of(int i, double& x, double& y) const {
  const double phi = phi_at(i);
  x = subunits[i].rho * std::cos(phi);
  y = subunits[i].rho * std::sin(phi);
}

void validate_cell(const CorfCell& cell) {
  if (cell.subunits.size() < 2)
    throw InvalidArgument("cell needs at least two sub-units");
  if (static_cast<Eigen::Index>(cell.subunits.size()) != cell.weights.size())
    throw InvalidArgument("one weight per sub-unit required");
  if (!(cell.weights.array() > 0.0).all())
    throw InvalidArgument("cell weights must be positive");
  if (!(cell.source_sigma > 0.0)) throw InvalidArgument("source sigma must be > 0");
  bool has_on = false, has_off = false;
  for (const auto& s : cell.subunits) {
    s.validate();
    if (s.sigma != cell.source_sigma)
      throw InvalidArgument("sub-unit sigma must equal the cell's source sigma");
    (s.delta > 0 ? has_on : has_off) = true;
  }
  if (!has_on || !has_off)
    throw InvalidArgument("cell must contain both polarities");
}

CorfCell configure(double sigma, const GeometryPolicy& geometry) {
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be > 0");
  geometry.validate();

  const double rho_max = geometry.radius_factors.back() * sigma;
  const int half =
      static_cast<int>(std::ceil(rho_max + geometry.truncation * sigma)) + 2;
  const int side = 2 * half + 1;

  // Vertical step edge: dark left, bright right, axis between columns.
  PlaneD stim = PlaneD::Zero(side, side);
  const int first_bright = half + 1;
  stim.rightCols(side - first_bright).setConstant(1.0);
  const double cx = static_cast<double>(first_bright) - 0.5;
  const double cy = static_cast<double>(half);

  const Image stimulus(std::move(stim));
  const LgnPair lgn = lgn_response_pair(stimulus, sigma, geometry.truncation);

  constexpr int kSamples = 360;
  const double step = kTwoPi / kSamples;
  const int nms_window =
      static_cast<int>(std::lround(geometry.nms_window_deg));

  CorfCell cell;
  cell.source_sigma = sigma;
  cell.preferred_orientation = 0.0;

  for (double factor : geometry.radius_factors) {
    const double rho = factor * sigma;
    const double sigma_prime = geometry.sigma0_factor * sigma + geometry.alpha * rho;
    for (int delta : {+1, -1}) {
      const PlaneD& map = delta > 0 ? lgn.on : lgn.off;
      std::vector<double> samples(kSamples);
      for (int j = 0; j < kSamples; ++j) {
        const double angle = j * step;
        samples[j] = bilinear(map, cx + rho * std::cos(angle),
                              cy + rho * std::sin(angle));
      }
      for (const auto& m :
           circle_maxima(samples, geometry.maxima_threshold, nms_window)) {
        SubUnit s;
        s.delta = delta;
        s.sigma = sigma;
        s.rho = rho;
        s.phi = normalize_angle(m.angle_index * step);
        s.sigma_prime = sigma_prime;
        cell.subunits.push_back(s);
      }
    }
  }

  if (cell.subunits.size() < 2)
    throw ConfigError("configuration found no usable maxima at sigma " +
                      std::to_string(sigma));

  // Gaussian weights decaying with distance from the cell center.
  double max_rho = 0.0;
  for (const auto& s : cell.subunits) max_rho = std::max(max_rho, s.rho);
  const double sigma_hat = geometry.weight_sigma_factor * max_rho;
  cell.weights.resize(static_cast<Eigen::Index>(cell.subunits.size()));
  for (int i = 0; i < cell.size(); ++i) {
    const double rho = cell.subunits[i].rho;
    cell.weights(i) =
        sigma_hat > 0.0 ? std::exp(-rho * rho / (2.0 * sigma_hat * sigma_hat)) : 1.0;
  }

  validate_cell(cell);  // both polarities must have survived
  return cell;
}

CorfCell rotate_set(const CorfCell& cell, double psi) {
  CorfCell rotated = cell;
  rotated.rotation = cell.rotation + psi;
  return rotated;
}

CorfCell with_response_sigma(const CorfCell& cell, double sigma,
                             const GeometryPolicy& geometry) {
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be > 0");
  geometry.validate();
  CorfCell out = cell;
  out.source_sigma = sigma;
  for (auto& s : out.subunits) {
    s.sigma = sigma;
    s.sigma_prime = geometry.sigma0_factor * sigma + geometry.alpha * s.rho;
  }
  return out;
}

ResponseMap subunit_response(const ResponseMap& on_map, const ResponseMap& off_map,
                             const SubUnit& s) {
  if (on_map.rows() != off_map.rows() || on_map.cols() != off_map.cols())
    throw DimensionError("on/off maps must share dimensions");
  s.validate();

  const PlaneD& src = s.delta > 0 ? on_map : off_map;
  const int h = static_cast<int>(src.rows()), w = static_cast<int>(src.cols());
  const int dx = static_cast<int>(std::lround(s.rho * std::cos(s.phi)));
  const int dy = static_cast<int>(std::lround(s.rho * std::sin(s.phi)));
  const int pad = std::max(std::abs(dx), std::abs(dy));

  PlaneD padded = PlaneD::Zero(h + 2 * pad, w + 2 * pad);
  padded.block(pad, pad, h, w) = src;
  const PlaneD blurred = detail::gaussian_blur_zero(padded, s.sigma_prime);
  return blurred.block(pad + dy, pad + dx, h, w);
}

ResponseMap cell_response(const Image& image, const CorfCell& cell) {
  validate_cell(cell);
  detail::CellContext ctx(image, cell.source_sigma, detail::required_pad(cell));
  return detail::eval_cell(ctx, cell);
}

ResponseMap weighted_geometric_mean(const std::vector<ResponseMap>& maps,
                                    const Eigen::VectorXd& weights) {
  if (maps.empty() || static_cast<Eigen::Index>(maps.size()) != weights.size())
    throw InvalidArgument("one positive weight per map required");
  if (!(weights.array() > 0.0).all())
    throw InvalidArgument("weights must be positive");
  PlaneD acc = PlaneD::Zero(maps.front().rows(), maps.front().cols());
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (maps[i].rows() != acc.rows() || maps[i].cols() != acc.cols())
      throw DimensionError("maps must share dimensions");
    if ((maps[i] < 0.0).any())
      throw InvalidArgument("geometric mean factors must be >= 0");
    acc += weights(static_cast<Eigen::Index>(i)) * maps[i].log();
  }
  return detail::exp_flushing(acc / weights.sum());
}

ResponseMap orientation_superposition(const std::vector<ResponseMap>& maps) {
  if (maps.empty()) throw InvalidArgument("superposition needs at least one map");
  ResponseMap out = maps.front();
  for (std::size_t i = 1; i < maps.size(); ++i) {
    if (maps[i].rows() != out.rows() || maps[i].cols() != out.cols())
      throw DimensionError("superposition maps must share dimensions");
    out = out.max(maps[i]);
  }
  return out;
}

std::string cell_to_json(const CorfCell& cell) {
  nlohmann::json j;
  j["source_sigma"] = cell.source_sigma;
  j["preferred_orientation"] = cell.preferred();
  j["subunits"] = nlohmann::json::array();
  for (int i = 0; i < cell.size(); ++i) {
    const SubUnit& s = cell.subunits[i];
    j["subunits"].push_back({{"delta", s.delta},
                             {"sigma", s.sigma},
                             {"rho", s.rho},
                             {"phi", cell.phi_at(i)},
                             {"sigma_prime", s.sigma_prime}});
  }
  j["weights"] = std::vector<double>(cell.weights.data(),
                                     cell.weights.data() + cell.weights.size());
  return j.dump(2) + "\n";
}

CorfCell cell_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad cell JSON: ") + e.what());
  }
  try {
    CorfCell cell;
    cell.source_sigma = j.at("source_sigma").get<double>();
    cell.preferred_orientation = j.at("preferred_orientation").get<double>();
    for (const auto& js : j.at("subunits")) {
      SubUnit s;
      s.delta = js.at("delta").get<int>();
      s.sigma = js.at("sigma").get<double>();
      s.rho = js.at("rho").get<double>();
      s.phi = normalize_angle(js.at("phi").get<double>());
      s.sigma_prime = js.at("sigma_prime").get<double>();
      cell.subunits.push_back(s);
    }
    const auto w = j.at("weights").get<std::vector<double>>();
    cell.weights = Eigen::Map<const Eigen::VectorXd>(w.data(),
                                                     static_cast<Eigen::Index>(w.size()));
    validate_cell(cell);
    return cell;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad cell JSON: ") + e.what());
  }
}

void save_cell(const std::string& path, const CorfCell& cell) {
  write_file_atomic(path, cell_to_json(cell));
}

CorfCell load_cell(const std::string& path) { return cell_from_json(read_file(path)); }

}  // namespace corf
