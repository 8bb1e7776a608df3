#include <algorithm>
#include <cstdio>
#include <memory>
#include <sstream>

#include <corf/io_util.hpp>
#include <corf/probe.hpp>

#include "common.hpp"

namespace corf::cli {

namespace {

struct MetricsOptions {
  std::string pred_path;
  std::string true_path;
  int classes = 0;  // 0 = infer
  std::string out;
};

std::vector<int> read_labels(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<int> labels;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto begin = line.find_first_not_of(" \t\r,");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r,");
    const std::string token = line.substr(begin, end - begin + 1);
    try {
      std::size_t used = 0;
      const int v = std::stoi(token, &used);
      if (used != token.size() || v < 0) throw std::invalid_argument(token);
      labels.push_back(v);
    } catch (const std::exception&) {
      throw FormatError(path + ": bad label line '" + line + "'");
    }
  }
  if (labels.empty()) throw FormatError(path + ": no labels");
  return labels;
}

}  // namespace

void register_metrics(CLI::App& app) {
  auto opts = std::make_shared<MetricsOptions>();
  CLI::App* sub =
      app.add_subcommand("metrics", "Accuracy / macro precision, recall and F1");
  sub->add_option("--pred", opts->pred_path, "Predicted labels, one per line")
      ->required();
  sub->add_option("--true", opts->true_path, "True labels, one per line")->required();
  sub->add_option("--classes", opts->classes, "Class count (default: inferred)")
      ->capture_default_str();
  sub->add_option("--out", opts->out, "Write the JSON here instead of stdout");

  sub->configurable();
  sub->callback([opts, sub] {
    const std::vector<int> pred = read_labels(opts->pred_path);
    const std::vector<int> truth = read_labels(opts->true_path);
    if (pred.size() != truth.size())
      throw InvalidArgument("label files disagree in length: " +
                            std::to_string(pred.size()) + " vs " +
                            std::to_string(truth.size()));

    int classes = opts->classes;
    if (classes == 0) {
      classes = 1 + std::max(*std::max_element(pred.begin(), pred.end()),
                             *std::max_element(truth.begin(), truth.end()));
      classes = std::max(classes, 2);
    }
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> confusion =
        Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(classes,
                                                                          classes);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (pred[i] >= classes || truth[i] >= classes)
        throw InvalidArgument("label exceeds --classes");
      confusion(truth[i], pred[i]) += 1;
    }
    const Metrics m = metrics_from_confusion(confusion);

    nlohmann::json j;
    j["count"] = pred.size();
    j["classes"] = classes;
    j["accuracy"] = m.accuracy;
    j["macro_precision"] = m.macro_precision;
    j["macro_recall"] = m.macro_recall;
    j["macro_f1"] = m.macro_f1;
    std::vector<std::vector<std::int64_t>> rows;
    for (int r = 0; r < classes; ++r) {
      rows.emplace_back();
      for (int c = 0; c < classes; ++c) rows.back().push_back(confusion(r, c));
    }
    j["confusion"] = rows;

    const std::string text = j.dump(2) + "\n";
    if (opts->out.empty()) {
      std::fputs(text.c_str(), stdout);
    } else {
      write_text_atomic(opts->out, text);
      ManifestInputs inputs;
      inputs.add(opts->pred_path);
      inputs.add(opts->true_path);
      write_manifest(opts->out + ".manifest.json", *sub, inputs);
    }
  });
}

}  // namespace corf::cli
