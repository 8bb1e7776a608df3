#include <cstdio>
#include <memory>

#include <corf/probe.hpp>

#include "common.hpp"

namespace corf::cli {

namespace {

struct ProbeCmdOptions {
  std::string dataset = "synthetic";
  std::string features = "corf";
  std::uint64_t seed = 7;
  std::string out;
  int per_class = 300;
  int size = 32;
  int max_epochs = 200;
  int patience = 50;
  int batch_size = 128;
  double learning_rate = 0.2;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  bool no_cosine = false;
  BankOptions bank;
  int threads = 0;
};

}  // namespace

void register_probe(CLI::App& app) {
  auto opts = std::make_shared<ProbeCmdOptions>();
  CLI::App* sub = app.add_subcommand(
      "probe", "Train a linear softmax probe on bank features or raw pixels");
  sub->add_option("--dataset", opts->dataset, "Dataset name")
      ->check(CLI::IsMember({"synthetic"}))
      ->capture_default_str();
  sub->add_option("--features", opts->features, "Feature source")
      ->check(CLI::IsMember({"corf", "raw"}))
      ->capture_default_str();
  sub->add_option("--seed", opts->seed, "Dataset and training seed")
      ->capture_default_str();
  sub->add_option("--out", opts->out, "Report JSON path")->required();
  sub->add_option("--per-class", opts->per_class, "Images per class")
      ->capture_default_str();
  sub->add_option("--size", opts->size, "Image side length")->capture_default_str();
  sub->add_option("--max-epochs", opts->max_epochs, "Epoch budget")
      ->capture_default_str();
  sub->add_option("--patience", opts->patience, "Early-stopping patience, epochs")
      ->capture_default_str();
  sub->add_option("--batch", opts->batch_size, "Mini-batch size")->capture_default_str();
  sub->add_option("--lr", opts->learning_rate, "Initial learning rate")
      ->capture_default_str();
  sub->add_option("--momentum", opts->momentum, "SGD momentum")->capture_default_str();
  sub->add_option("--weight-decay", opts->weight_decay, "L2 penalty")
      ->capture_default_str();
  sub->add_flag("--no-cosine", opts->no_cosine, "Disable cosine annealing");
  opts->bank.attach(*sub);
  sub->add_option("--threads", opts->threads, "Worker cap (0 = auto, CORF_THREADS)")
      ->capture_default_str();

  sub->configurable();
  sub->callback([opts, sub] {
    const Dataset data =
        make_oriented_texture_dataset(opts->seed, opts->per_class, opts->size);

    Eigen::MatrixXd features;
    if (opts->features == "corf") {
      const FilterBank bank = opts->bank.build();
      features = bank_features(data.images, bank, resolve_threads(opts->threads));
    } else {
      features = raw_features(data.images);
    }

    ProbeConfig cfg;
    cfg.learning_rate = opts->learning_rate;
    cfg.momentum = opts->momentum;
    cfg.weight_decay = opts->weight_decay;
    cfg.batch_size = opts->batch_size;
    cfg.max_epochs = opts->max_epochs;
    cfg.early_stop_patience = opts->patience;
    cfg.cosine_annealing = !opts->no_cosine;
    cfg.seed = opts->seed;

    const TrainOutcome out = train_probe(features, data.labels, data.classes, cfg);

    Eigen::MatrixXd x_val(out.val_indices.size(), features.cols());
    std::vector<int> y_val;
    for (std::size_t i = 0; i < out.val_indices.size(); ++i) {
      x_val.row(static_cast<long>(i)) = features.row(out.val_indices[i]);
      y_val.push_back(data.labels[static_cast<std::size_t>(out.val_indices[i])]);
    }
    const Metrics m = evaluate(out.model, x_val, y_val, data.classes);

    nlohmann::json report;
    report["config"] = {{"dataset", opts->dataset},
                        {"features", opts->features},
                        {"seed", opts->seed},
                        {"per_class", opts->per_class},
                        {"size", opts->size},
                        {"learning_rate", cfg.learning_rate},
                        {"momentum", cfg.momentum},
                        {"weight_decay", cfg.weight_decay},
                        {"batch_size", cfg.batch_size},
                        {"max_epochs", cfg.max_epochs},
                        {"early_stop_patience", cfg.early_stop_patience},
                        {"cosine_annealing", cfg.cosine_annealing}};
    report["initial_loss"] = out.initial_loss;
    report["best_epoch"] = out.best_epoch;
    report["best_val_loss"] = out.best_val_loss;
    report["epoch_log"] = nlohmann::json::array();
    for (const auto& e : out.log)
      report["epoch_log"].push_back({{"epoch", e.epoch},
                                     {"lr", e.learning_rate},
                                     {"train_loss", e.train_loss},
                                     {"val_loss", e.val_loss},
                                     {"val_accuracy", e.val_accuracy}});
    std::vector<std::vector<std::int64_t>> confusion;
    for (long r = 0; r < m.confusion.rows(); ++r) {
      confusion.emplace_back();
      for (long c = 0; c < m.confusion.cols(); ++c)
        confusion.back().push_back(m.confusion(r, c));
    }
    report["metrics"] = {{"accuracy", m.accuracy},
                         {"macro_precision", m.macro_precision},
                         {"macro_recall", m.macro_recall},
                         {"macro_f1", m.macro_f1},
                         {"confusion", confusion}};
    write_text_atomic(opts->out, report.dump(2) + "\n");
    write_manifest(opts->out + ".manifest.json", *sub, ManifestInputs{});
    std::printf("%s features: val accuracy %.4f, macro-F1 %.4f -> %s\n",
                opts->features.c_str(), m.accuracy, m.macro_f1, opts->out.c_str());
  });
}

}  // namespace corf::cli
