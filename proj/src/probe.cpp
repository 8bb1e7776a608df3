#include "corf/probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "corf/parallel.hpp"
#include "corf/rng.hpp"

namespace corf {

void ProbeConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning rate must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0))
    throw InvalidArgument("momentum must be in [0, 1)");
  if (!(weight_decay >= 0.0)) throw InvalidArgument("weight decay must be >= 0");
  if (batch_size < 1) throw InvalidArgument("batch size must be >= 1");
  if (max_epochs < 1) throw InvalidArgument("max epochs must be >= 1");
  if (early_stop_patience < 1 || early_stop_patience > max_epochs)
    throw InvalidArgument("patience must be in [1, max_epochs]");
}

double cosine_lr(double lr0, int epoch, int total_epochs) {
  return lr0 * (1.0 + std::cos(std::numbers::pi * epoch / total_epochs)) / 2.0;
}

namespace {

// Row-wise softmax probabilities with the max-logit shift.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p = logits;
  for (long i = 0; i < p.rows(); ++i) {
    Eigen::RowVectorXd row = p.row(i);
    row.array() -= row.maxCoeff();
    row = row.array().exp();
    p.row(i) = row / row.sum();
  }
  return p;
}

Eigen::MatrixXd logits_for(const ProbeModel& model, const Eigen::MatrixXd& x) {
  return (x * model.weights.transpose()).rowwise() + model.bias.transpose();
}

double mean_cross_entropy(const ProbeModel& model, const Eigen::MatrixXd& x,
                          const std::vector<int>& labels) {
  const Eigen::MatrixXd p = softmax_rows(logits_for(model, x));
  double loss = 0.0;
  for (long i = 0; i < x.rows(); ++i)
    loss -= std::log(std::max(p(i, labels[static_cast<std::size_t>(i)]), 1e-300));
  return loss / static_cast<double>(x.rows());
}

}  // namespace

double softmax_loss_grad(const ProbeModel& model, const Eigen::MatrixXd& x,
                         const std::vector<int>& labels, Eigen::MatrixXd& grad_w,
                         Eigen::VectorXd& grad_b) {
  const long n = x.rows();
  Eigen::MatrixXd p = softmax_rows(logits_for(model, x));

  double loss = 0.0;
  for (long i = 0; i < n; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    loss -= std::log(std::max(p(i, y), 1e-300));
    p(i, y) -= 1.0;
  }
  p /= static_cast<double>(n);
  grad_w = p.transpose() * x;  // classes x dim
  grad_b = p.colwise().sum().transpose();
  return loss / static_cast<double>(n);
}

TrainOutcome train_probe(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                         int classes, const ProbeConfig& config,
                         const ProbeModel* warm_start) {
  config.validate();
  const long n = features.rows();
  if (n < 2 || labels.size() != static_cast<std::size_t>(n))
    throw InvalidArgument("need >= 2 samples with one label each");
  if (classes < 2) throw InvalidArgument("need >= 2 classes");
  for (int y : labels)
    if (y < 0 || y >= classes) throw InvalidArgument("label out of range");
  if (*std::max_element(labels.begin(), labels.end()) ==
      *std::min_element(labels.begin(), labels.end()))
    throw InvalidArgument("training data holds a single class");

  Rng rng(config.seed);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  const long n_val = std::max<long>(1, n / 5);  // 80:20 split
  TrainOutcome outcome;
  outcome.val_indices.assign(order.end() - n_val, order.end());
  outcome.train_indices.assign(order.begin(), order.end() - n_val);

  const long dim = features.cols();
  auto gather = [&](const std::vector<int>& idx, Eigen::MatrixXd& x,
                    std::vector<int>& y) {
    x.resize(static_cast<long>(idx.size()), dim);
    y.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      x.row(static_cast<long>(i)) = features.row(idx[i]);
      y[i] = labels[static_cast<std::size_t>(idx[i])];
    }
  };
  Eigen::MatrixXd x_train, x_val;
  std::vector<int> y_train, y_val;
  gather(outcome.train_indices, x_train, y_train);
  gather(outcome.val_indices, x_val, y_val);

  ProbeModel model{Eigen::MatrixXd::Zero(classes, dim), Eigen::VectorXd::Zero(classes)};
  if (warm_start) {
    if (warm_start->weights.rows() != classes || warm_start->weights.cols() != dim ||
        warm_start->bias.size() != classes)
      throw DimensionError("warm start shape mismatch");
    model = *warm_start;
  }
  outcome.initial_loss = mean_cross_entropy(model, x_train, y_train);

  Eigen::MatrixXd vel_w = Eigen::MatrixXd::Zero(classes, dim);
  Eigen::VectorXd vel_b = Eigen::VectorXd::Zero(classes);
  ProbeModel best = model;
  double best_val = std::numeric_limits<double>::infinity();
  int best_epoch = -1, since_best = 0;

  std::vector<int> batch_order(y_train.size());
  std::iota(batch_order.begin(), batch_order.end(), 0);
  const long n_train = static_cast<long>(y_train.size());

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    const double lr = config.cosine_annealing
                          ? cosine_lr(config.learning_rate, epoch, config.max_epochs)
                          : config.learning_rate;
    rng.shuffle(batch_order);

    double train_loss = 0.0;
    int batches = 0;
    for (long start = 0; start < n_train; start += config.batch_size) {
      const long len = std::min<long>(config.batch_size, n_train - start);
      Eigen::MatrixXd xb(len, dim);
      std::vector<int> yb(static_cast<std::size_t>(len));
      for (long i = 0; i < len; ++i) {
        xb.row(i) = x_train.row(batch_order[static_cast<std::size_t>(start + i)]);
        yb[static_cast<std::size_t>(i)] =
            y_train[static_cast<std::size_t>(batch_order[static_cast<std::size_t>(start + i)])];
      }
      Eigen::MatrixXd grad_w;
      Eigen::VectorXd grad_b;
      train_loss += softmax_loss_grad(model, xb, yb, grad_w, grad_b);
      ++batches;

      grad_w += config.weight_decay * model.weights;
      grad_b += config.weight_decay * model.bias;
      vel_w = config.momentum * vel_w + grad_w;
      vel_b = config.momentum * vel_b + grad_b;
      model.weights -= lr * vel_w;
      model.bias -= lr * vel_b;
    }
    train_loss /= std::max(1, batches);

    const double val_loss = mean_cross_entropy(model, x_val, y_val);
    const std::vector<int> val_pred = predict(model, x_val);
    long correct = 0;
    for (std::size_t i = 0; i < y_val.size(); ++i)
      if (val_pred[i] == y_val[i]) ++correct;
    const double val_acc = static_cast<double>(correct) / static_cast<double>(y_val.size());

    if (!std::isfinite(train_loss) || !std::isfinite(val_loss))
      throw DivergenceError("probe training diverged at epoch " + std::to_string(epoch));

    outcome.log.push_back({epoch, lr, train_loss, val_loss, val_acc});

    if (val_loss < best_val) {
      best_val = val_loss;
      best = model;
      best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= config.early_stop_patience) {
      break;
    }
  }

  outcome.model = std::move(best);
  outcome.best_epoch = best_epoch;
  outcome.best_val_loss = best_val;
  return outcome;
}

TrainOutcome train_probe(const std::vector<FeatureTensor>& features,
                         const std::vector<int>& labels, int classes,
                         const ProbeConfig& config) {
  if (features.empty()) throw InvalidArgument("no feature tensors given");
  const long dim = flatten(features.front()).size();
  Eigen::MatrixXd x(static_cast<long>(features.size()), dim);
  for (std::size_t i = 0; i < features.size(); ++i) {
    const Eigen::VectorXd row = flatten(features[i]);
    if (row.size() != dim) throw DimensionError("feature tensors must share shape");
    x.row(static_cast<long>(i)) = row;
  }
  return train_probe(x, labels, classes, config);
}

std::vector<int> predict(const ProbeModel& model, const Eigen::MatrixXd& features) {
  const Eigen::MatrixXd logits = logits_for(model, features);
  std::vector<int> pred(static_cast<std::size_t>(features.rows()));
  for (long i = 0; i < logits.rows(); ++i) {
    int arg = 0;
    for (long c = 1; c < logits.cols(); ++c)
      if (logits(i, c) > logits(i, arg)) arg = static_cast<int>(c);
    pred[static_cast<std::size_t>(i)] = arg;
  }
  return pred;
}

Metrics evaluate(const ProbeModel& model, const Eigen::MatrixXd& features,
                 const std::vector<int>& labels, int classes) {
  if (features.rows() == 0) throw InvalidArgument("cannot evaluate an empty dataset");
  if (labels.size() != static_cast<std::size_t>(features.rows()))
    throw InvalidArgument("one label per row required");
  const std::vector<int> pred = predict(model, features);

  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> confusion =
      Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(classes, classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= classes)
      throw InvalidArgument("label out of range");
    confusion(labels[i], pred[i]) += 1;
  }
  return metrics_from_confusion(confusion);
}

Metrics metrics_from_confusion(
    const Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>& confusion) {
  if (confusion.rows() != confusion.cols() || confusion.rows() < 1)
    throw InvalidArgument("confusion matrix must be square");
  const long classes = confusion.rows();
  const double total = static_cast<double>(confusion.sum());
  if (total <= 0.0) throw InvalidArgument("confusion matrix is empty");

  Metrics m;
  m.confusion = confusion;
  m.accuracy = static_cast<double>(confusion.trace()) / total;
  for (long c = 0; c < classes; ++c) {
    const double tp = static_cast<double>(confusion(c, c));
    const double predicted = static_cast<double>(confusion.col(c).sum());
    const double actual = static_cast<double>(confusion.row(c).sum());
    const double precision = predicted > 0.0 ? tp / predicted : 0.0;
    const double recall = actual > 0.0 ? tp / actual : 0.0;
    const double f1 =
        precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    m.macro_precision += precision;
    m.macro_recall += recall;
    m.macro_f1 += f1;
  }
  m.macro_precision /= static_cast<double>(classes);
  m.macro_recall /= static_cast<double>(classes);
  m.macro_f1 /= static_cast<double>(classes);
  return m;
}

Dataset make_oriented_texture_dataset(std::uint64_t seed, int per_class, int size) {
  if (per_class < 1 || size < 4) throw InvalidArgument("bad dataset parameters");
  const double angles[3] = {0.0, std::numbers::pi / 3.0, 2.0 * std::numbers::pi / 3.0};

  Dataset data;
  data.classes = 3;
  Rng rng(seed);
  for (int cls = 0; cls < 3; ++cls) {
    // Stripes run along the class angle; the wave advances across them.
    const double nx = std::sin(angles[cls]);
    const double ny = -std::cos(angles[cls]);
    for (int i = 0; i < per_class; ++i) {
      const double amplitude = 0.25 + 0.25 * rng.next_unit();
      const double sign = rng.next_unit() < 0.5 ? -1.0 : 1.0;
      const double wavelength = 7.5 + rng.next_unit();
      const double phase = 0.4 * (rng.next_unit() - 0.5);
      const double omega = 2.0 * std::numbers::pi / wavelength;

      PlaneD img(size, size);
      for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
          const double t = nx * (x - size / 2.0) + ny * (y - size / 2.0);
          const double grating = std::sin(omega * t + phase);
          const double noise = 0.06 * rng.next_normal();
          img(y, x) = std::clamp(0.5 + sign * amplitude * grating + noise, 0.0, 1.0);
        }
      data.images.emplace_back(std::move(img));
      data.labels.push_back(cls);
    }
  }
  return data;
}

Eigen::MatrixXd raw_features(const std::vector<Image>& images) {
  if (images.empty()) throw InvalidArgument("no images given");
  const long dim = images.front().values.size();
  Eigen::MatrixXd x(static_cast<long>(images.size()), dim);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const PlaneD& v = images[i].values;
    if (v.size() != dim) throw DimensionError("images must share dimensions");
    for (long j = 0; j < dim; ++j)
      x(static_cast<long>(i), j) = v(j / v.cols(), j % v.cols());
  }
  return x;
}

Eigen::MatrixXd bank_features(const std::vector<Image>& images, const FilterBank& bank,
                              int threads) {
  if (images.empty()) throw InvalidArgument("no images given");
  std::vector<Eigen::VectorXd> rows(images.size());
  parallel_for(static_cast<int>(images.size()), threads, [&](int i) {
    rows[static_cast<std::size_t>(i)] =
        flatten(apply_bank(images[static_cast<std::size_t>(i)], bank, 1));
  });
  Eigen::MatrixXd x(static_cast<long>(images.size()), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != x.cols()) throw DimensionError("feature dims disagree");
    x.row(static_cast<long>(i)) = rows[i];
  }
  return x;
}

}  // namespace corf
