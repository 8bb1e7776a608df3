#include "corf/pushpull.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "corf/detail/engine.hpp"

namespace corf {

void PushPullCell::validate() const {
  validate_cell(push);
  validate_cell(pull);
  if (push.source_sigma != pull.source_sigma)
    throw InvalidArgument("push and pull sets must share sigma");
  if (push.size() != pull.size())
    throw InvalidArgument("pull set must mirror the push set's sub-unit count");
  for (int i = 0; i < push.size(); ++i)
    if (pull.subunits[i].delta != -push.subunits[i].delta)
      throw InvalidArgument("pull polarities must negate the push polarities");
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be >= 0");
  if (!(k >= 0.0)) throw InvalidArgument("k must be >= 0");
}

CorfCell shift_set(const CorfCell& cell, double beta, const GeometryPolicy& geometry) {
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be >= 0");
  geometry.validate();

  CorfCell out = cell;
  for (auto& s : out.subunits) {
    // Configuration-frame coordinates (base phi, rotation excluded).
    const double phi = normalize_angle(s.phi);
    const double x = s.rho * std::cos(phi);
    const double y = s.rho * std::sin(phi);
    const double gamma = x > 0.0 ? beta / 2.0 : (x < 0.0 ? -beta / 2.0 : 0.0);
    if (gamma != 0.0) {
      s.rho = std::hypot(x + gamma, y);
      s.phi = normalize_angle(std::atan2(y, x + gamma));
    }
    s.sigma_prime = geometry.sigma0_factor * s.sigma + geometry.alpha * s.rho;
  }
  return out;
}

CorfCell pull_set(const CorfCell& cell, double beta, const GeometryPolicy& geometry) {
  CorfCell out = shift_set(cell, beta, geometry);
  for (auto& s : out.subunits) s.delta = -s.delta;
  return out;
}

PushPullCell make_pushpull(const CorfCell& push, double beta, double k,
                           const GeometryPolicy& geometry) {
  PushPullCell cell;
  cell.push = push;
  cell.pull = pull_set(push, beta, geometry);
  cell.beta = beta;
  cell.k = k;
  cell.validate();
  return cell;
}

PushPullCell rotate_pushpull(const PushPullCell& cell, double psi) {
  PushPullCell out = cell;
  out.push = rotate_set(cell.push, psi);
  out.pull = rotate_set(cell.pull, psi);
  return out;
}

namespace {

ResponseMap pushpull_eval(const Image& image, const PushPullCell& cell, bool rectify) {
  cell.validate();
  const int pad =
      std::max(detail::required_pad(cell.push), detail::required_pad(cell.pull));
  detail::CellContext ctx(image, cell.push.source_sigma, pad);
  const ResponseMap push = detail::eval_cell(ctx, cell.push);
  const ResponseMap pull = detail::eval_cell(ctx, cell.pull);
  ResponseMap out = push - cell.k * pull;
  if (rectify) out = out.max(0.0);
  return out;
}

}  // namespace

ResponseMap pushpull_response(const Image& image, const PushPullCell& cell) {
  return pushpull_eval(image, cell, true);
}

ResponseMap pushpull_response_signed(const Image& image, const PushPullCell& cell) {
  return pushpull_eval(image, cell, false);
}

std::string pushpull_to_json(const PushPullCell& cell) {
  nlohmann::json j;
  j["beta"] = cell.beta;
  j["k"] = cell.k;
  j["push"] = nlohmann::json::parse(cell_to_json(cell.push));
  j["pull"] = nlohmann::json::parse(cell_to_json(cell.pull));
  return j.dump(2) + "\n";
}

PushPullCell pushpull_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad push-pull JSON: ") + e.what());
  }
  PushPullCell cell;
  try {
    cell.beta = j.at("beta").get<double>();
    cell.k = j.at("k").get<double>();
    cell.push = cell_from_json(j.at("push").dump());
    cell.pull = cell_from_json(j.at("pull").dump());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad push-pull JSON: ") + e.what());
  }
  cell.validate();
  return cell;
}

}  // namespace corf
