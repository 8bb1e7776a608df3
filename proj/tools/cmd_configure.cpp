#include <cstdio>
#include <memory>

#include <corf/corf_cell.hpp>

#include "common.hpp"

namespace corf::cli {

namespace {

struct ConfigureOptions {
  double sigma = 2.0;
  std::string out;
  double threshold = 0.2;
  std::string circles = "1.25,2.5";
  double sigma0_factor = 0.2;
  double alpha = 0.05;
  double weight_sigma_factor = 1.0;
  double nms_window_deg = 5.0;
};

}  // namespace

void register_configure(CLI::App& app) {
  auto opts = std::make_shared<ConfigureOptions>();
  CLI::App* sub =
      app.add_subcommand("configure", "Configure a CORF cell on the canonical edge");
  sub->add_option("--sigma", opts->sigma, "LGN scale in pixels")
      ->required()
      ->check(CLI::PositiveNumber);
  sub->add_option("--out", opts->out, "Output cell JSON path")->required();
  sub->add_option("--threshold", opts->threshold,
                  "Keep circle maxima above this fraction of the circle max")
      ->capture_default_str();
  sub->add_option("--circles", opts->circles, "Circle radii as multiples of sigma")
      ->capture_default_str();
  sub->add_option("--sigma0-factor", opts->sigma0_factor,
                  "Pooling blur: sigma' = factor*sigma + alpha*rho")
      ->capture_default_str();
  sub->add_option("--alpha", opts->alpha, "Pooling blur growth per radius pixel")
      ->capture_default_str();
  sub->add_option("--weight-sigma-factor", opts->weight_sigma_factor,
                  "Weight decay scale as a fraction of the largest radius")
      ->capture_default_str();
  sub->add_option("--nms-window", opts->nms_window_deg,
                  "Angular non-maximum suppression half-window, degrees")
      ->capture_default_str();

  sub->configurable();
  sub->callback([opts, sub] {
    GeometryPolicy geometry;
    geometry.radius_factors = parse_double_list(opts->circles);
    geometry.maxima_threshold = opts->threshold;
    geometry.sigma0_factor = opts->sigma0_factor;
    geometry.alpha = opts->alpha;
    geometry.weight_sigma_factor = opts->weight_sigma_factor;
    geometry.nms_window_deg = opts->nms_window_deg;

    const CorfCell cell = configure(opts->sigma, geometry);
    save_cell(opts->out, cell);
    write_manifest(opts->out + ".manifest.json", *sub, ManifestInputs{});

    int on = 0;
    for (const auto& s : cell.subunits)
      if (s.delta > 0) ++on;
    std::printf("configured %d sub-units (%d on, %d off) at sigma %g -> %s\n",
                cell.size(), on, cell.size() - on, opts->sigma, opts->out.c_str());
  });
}

}  // namespace corf::cli
