#include "common.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include <corf/errors.hpp>
#include <corf/image_io.hpp>
#include <corf/io_util.hpp>
#include <corf/parallel.hpp>
#include <corf/rng.hpp>
#include <corf/version.hpp>

namespace corf::cli {

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("CORF_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return resolve_thread_count(0);
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size())
      throw InvalidArgument("cannot parse number '" + item + "'");
    values.push_back(v);
  }
  if (values.empty()) throw InvalidArgument("empty list: '" + text + "'");
  return values;
}

std::vector<double> parse_range_spec(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) return parse_double_list(text);
  const auto colon = text.find(':', dots);
  if (colon == std::string::npos)
    throw InvalidArgument("range needs a step: '" + text + "' (use a..b:step)");
  const double from = std::stod(text.substr(0, dots));
  const double to = std::stod(text.substr(dots + 2, colon - dots - 2));
  const double step = std::stod(text.substr(colon + 1));
  if (!(step > 0.0) || to < from)
    throw InvalidArgument("bad range '" + text + "'");
  std::vector<double> values;
  for (double v = from; v <= to + 1e-9; v += step) values.push_back(v);
  return values;
}

BetaPolicy parse_beta(const std::string& text) {
  if (text == "auto" || text == "sigma") return BetaPolicy{};
  return BetaPolicy{BetaPolicy::Mode::Fixed, std::stod(text)};
}

void ManifestInputs::add(const std::string& path) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(read_file(path))));
  hashes_[path] = buf;
}

void write_manifest(const std::string& path, const CLI::App& subcommand,
                    const ManifestInputs& inputs) {
  nlohmann::json j;
  j["tool"] = "corf";
  j["version"] = kVersion;
  j["subcommand"] = subcommand.get_name();
  j["rng_algorithm"] = kRngAlgorithm;
  j["config_ini"] = "[" + subcommand.get_name() + "]\n" +
                    const_cast<CLI::App&>(subcommand).config_to_str(true, false);
  j["inputs"] = inputs.hashes();
  write_text_atomic(path, j.dump(2) + "\n");
}

void write_text_atomic(const std::string& path, const std::string& text) {
  write_file_atomic(path, text);
}

double save_rescaled(const std::string& path, const PlaneD& map) {
  const double peak = map.maxCoeff();
  PlaneD scaled = peak > 0.0 ? PlaneD(map / peak) : PlaneD::Zero(map.rows(), map.cols());
  save_grayscale(path, scaled);
  return peak;
}

void BankOptions::attach(CLI::App& app) {
  app.add_option("--sigma-start", sigma_start, "First scale of the bank")
      ->capture_default_str();
  app.add_option("--sigma-end", sigma_end, "Last scale of the bank")
      ->capture_default_str();
  app.add_option("--sigma-step", sigma_step, "Scale increment")->capture_default_str();
  app.add_option("--orientations", orientations, "Orientation count over [0, 2*pi)")
      ->capture_default_str();
  app.add_option("--k", k, "Pull inhibition strength")->capture_default_str();
  app.add_option("--beta", beta, "Pull separation: 'auto' (= sigma) or pixels")
      ->capture_default_str();
}

FilterBank BankOptions::build() const {
  if (!(sigma_step > 0.0) || sigma_end < sigma_start)
    throw InvalidArgument("bad sigma range");
  if (orientations < 1) throw InvalidArgument("need at least one orientation");
  std::vector<double> sigmas;
  for (double s = sigma_start; s <= sigma_end + 1e-9; s += sigma_step)
    sigmas.push_back(s);
  std::vector<double> psis;
  for (int i = 0; i < orientations; ++i)
    psis.push_back(i * (2.0 * std::numbers::pi / orientations));
  return build_bank(sigmas, psis, k, parse_beta(beta));
}

}  // namespace corf::cli
