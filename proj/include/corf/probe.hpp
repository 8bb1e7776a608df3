#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "corf/bank.hpp"
#include "corf/types.hpp"

namespace corf {

struct ProbeConfig {
  double learning_rate = 0.2;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  int batch_size = 128;
  int max_epochs = 200;
  int early_stop_patience = 50;
  bool cosine_annealing = true;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Linear softmax head: one weight row and bias per class.
struct ProbeModel {
  Eigen::MatrixXd weights;  // classes x feature_dim
  Eigen::VectorXd bias;     // classes
};

struct Metrics {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> confusion;  // true x pred
};

struct EpochStat {
  int epoch = 0;
  double learning_rate = 0.0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainOutcome {
  ProbeModel model;  // parameters with the best validation loss
  std::vector<EpochStat> log;
  double initial_loss = 0.0;  // full-train cross-entropy at zero init
  int best_epoch = -1;
  double best_val_loss = 0.0;
  std::vector<int> train_indices;
  std::vector<int> val_indices;
};

/// Cosine-annealed learning rate: lr * (1 + cos(pi*t/T)) / 2.
double cosine_lr(double lr0, int epoch, int total_epochs);

/// Mean cross-entropy and its gradients for a batch (no weight decay).
double softmax_loss_grad(const ProbeModel& model, const Eigen::MatrixXd& x,
                         const std::vector<int>& labels, Eigen::MatrixXd& grad_w,
                         Eigen::VectorXd& grad_b);

/// SGD with momentum, weight decay and cosine annealing over an internal
/// 80:20 train/validation split; restores the best-validation parameters.
/// Deterministic per config.seed.
TrainOutcome train_probe(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                         int classes, const ProbeConfig& config,
                         const ProbeModel* warm_start = nullptr);
TrainOutcome train_probe(const std::vector<FeatureTensor>& features,
                         const std::vector<int>& labels, int classes,
                         const ProbeConfig& config);

/// Argmax prediction (ties to the lowest class index).
std::vector<int> predict(const ProbeModel& model, const Eigen::MatrixXd& features);

Metrics evaluate(const ProbeModel& model, const Eigen::MatrixXd& features,
                 const std::vector<int>& labels, int classes);

/// Accuracy = trace/total; macro averages over classes; a class with no
/// predicted (or no actual) positives scores 0 for the undefined ratio.
Metrics metrics_from_confusion(
    const Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>& confusion);

// ---- Synthetic oriented-texture dataset ----

struct Dataset {
  std::vector<Image> images;
  std::vector<int> labels;
  int classes = 0;
};

/// Three classes of full-field oriented gratings (0, 60 and 120 degrees)
/// with randomized contrast, contrast polarity, slight wavelength/phase
/// jitter and pixel noise. Polarity inversion makes the class means
/// uninformative for a raw-pixel linear probe; the orientation-superposed
/// bank features stay stable.
Dataset make_oriented_texture_dataset(std::uint64_t seed, int per_class = 300,
                                      int size = 32);

/// Rows are flattened images (raw-pixel features).
Eigen::MatrixXd raw_features(const std::vector<Image>& images);

/// Rows are flattened bank feature tensors.
Eigen::MatrixXd bank_features(const std::vector<Image>& images, const FilterBank& bank,
                              int threads = 1);

}  // namespace corf
