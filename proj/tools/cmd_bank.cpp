#include <cstdio>
#include <memory>

#include <corf/bank.hpp>
#include <corf/image_io.hpp>

#include "common.hpp"

namespace corf::cli {

namespace {

struct BankCmdOptions {
  std::string image;
  std::string out;
  BankOptions bank;
  int threads = 0;
};

}  // namespace

void register_bank(CLI::App& app) {
  auto opts = std::make_shared<BankCmdOptions>();
  CLI::App* sub =
      app.add_subcommand("bank", "Extract the multi-scale push-pull feature tensor");
  sub->add_option("--image", opts->image, "Input PNG or PGM")->required();
  sub->add_option("--out", opts->out, "Output .corf tensor path")->required();
  opts->bank.attach(*sub);
  sub->add_option("--threads", opts->threads, "Worker cap (0 = auto, CORF_THREADS)")
      ->capture_default_str();

  sub->configurable();
  sub->callback([opts, sub] {
    const Image image = load_grayscale(opts->image);
    const FilterBank bank = opts->bank.build();
    const FeatureTensor tensor =
        apply_bank(image, bank, resolve_threads(opts->threads));
    export_tensor(tensor, opts->out);

    ManifestInputs inputs;
    inputs.add(opts->image);
    write_manifest(opts->out + ".manifest.json", *sub, inputs);
    std::printf("wrote %s (%dx%dx%d float32)\n", opts->out.c_str(), tensor.height,
                tensor.width, tensor.channel_count());
  });
}

}  // namespace corf::cli
