#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <numbers>
#include <vector>

#include <corf/corf_cell.hpp>
#include <corf/image_io.hpp>
#include <corf/lgn.hpp>
#include <corf/pushpull.hpp>

#include "common.hpp"

namespace corf::cli {

namespace {

struct RespondOptions {
  std::string image;
  std::string out_dir = ".";
  std::string stage = "lgn";
  bool pushpull = false;
  double sigma = 2.0;
  int delta = +1;
  std::string cell_path;
  int orientations = 12;
  double k = 1.8;
  std::string beta = "auto";
  bool signed_map = false;
};

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void emit(const std::string& path, const PlaneD& map) {
  const double peak = save_rescaled(path, map);
  std::printf("wrote %s (rescale_max=%.9g)\n", path.c_str(), peak);
}

}  // namespace

void register_respond(CLI::App& app) {
  auto opts = std::make_shared<RespondOptions>();
  CLI::App* sub = app.add_subcommand("respond", "Render LGN / CORF / push-pull maps");
  sub->add_option("--image", opts->image, "Input PNG or PGM")->required();
  sub->add_option("--out-dir", opts->out_dir, "Directory for output maps")
      ->capture_default_str();
  sub->add_option("--stage", opts->stage, "lgn, cell or pushpull")
      ->check(CLI::IsMember({"lgn", "cell", "pushpull"}))
      ->capture_default_str();
  sub->add_flag("--pushpull", opts->pushpull, "Shorthand for --stage pushpull");
  sub->add_option("--sigma", opts->sigma, "Scale when configuring on the fly")
      ->capture_default_str();
  sub->add_option("--delta", opts->delta, "LGN polarity, +1 or -1")
      ->check(CLI::IsMember({-1, 1}))
      ->capture_default_str();
  sub->add_option("--cell", opts->cell_path, "Cell JSON (otherwise configured here)");
  sub->add_option("--orientations", opts->orientations, "Rotations for the cell stage")
      ->capture_default_str();
  sub->add_option("--k", opts->k, "Pull inhibition strength")->capture_default_str();
  sub->add_option("--beta", opts->beta, "Pull separation: 'auto' (= sigma) or pixels")
      ->capture_default_str();
  sub->add_flag("--signed", opts->signed_map, "Also write the unrectified push-pull map");

  sub->configurable();
  sub->callback([opts, sub] {
    if (opts->pushpull) opts->stage = "pushpull";
    std::filesystem::create_directories(opts->out_dir);

    const Image image = load_grayscale(opts->image);
    ManifestInputs inputs;
    inputs.add(opts->image);

    const auto load_or_configure = [&]() -> CorfCell {
      if (!opts->cell_path.empty()) {
        inputs.add(opts->cell_path);
        return load_cell(opts->cell_path);
      }
      return configure(opts->sigma);
    };

    if (opts->stage == "lgn") {
      const ResponseMap map = lgn_response(image, {opts->sigma, opts->delta});
      emit(join(opts->out_dir, opts->delta > 0 ? "lgn_on.png" : "lgn_off.png"), map);
    } else if (opts->stage == "cell") {
      const CorfCell cell = load_or_configure();
      if (opts->orientations < 1) throw InvalidArgument("need at least one orientation");
      std::vector<ResponseMap> maps;
      for (int i = 0; i < opts->orientations; ++i) {
        const double psi = i * (2.0 * std::numbers::pi / opts->orientations);
        maps.push_back(cell_response(image, rotate_set(cell, psi)));
        char name[64];
        std::snprintf(name, sizeof name, "cell_psi_%03d.png",
                      static_cast<int>(std::lround(psi * 180.0 / std::numbers::pi)));
        emit(join(opts->out_dir, name), maps.back());
      }
      emit(join(opts->out_dir, "cell_superposed.png"), orientation_superposition(maps));
    } else {
      const CorfCell cell = load_or_configure();
      const double beta = parse_beta(opts->beta).beta_for(cell.source_sigma);
      const PushPullCell pp = make_pushpull(cell, beta, opts->k);
      emit(join(opts->out_dir, "push.png"), cell_response(image, pp.push));
      emit(join(opts->out_dir, "pull.png"), cell_response(image, pp.pull));
      emit(join(opts->out_dir, "pushpull.png"), pushpull_response(image, pp));
      if (opts->signed_map) {
        const ResponseMap raw = pushpull_response_signed(image, pp);
        // symmetric visualization: 0.5 is zero response
        const double scale = std::max(1e-300, raw.abs().maxCoeff());
        save_grayscale(join(opts->out_dir, "pushpull_signed.png"),
                       PlaneD(0.5 + 0.5 * raw / scale));
        std::printf("wrote %s (rescale_absmax=%.9g)\n",
                    join(opts->out_dir, "pushpull_signed.png").c_str(), scale);
      }
    }
    write_manifest(join(opts->out_dir, "run_manifest.json"), *sub, inputs);
  });
}

}  // namespace corf::cli
