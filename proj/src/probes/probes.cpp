#include "iclscope/probes/probes.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "iclscope/error.hpp"
#include "iclscope/rng.hpp"

namespace iclscope::probes {

namespace {

constexpr int kMaxBacktracks = 40;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, "probe config: " + what);
}

}  // namespace

void ProbeConfig::check() const {
  require(l2_lambda >= 0.0 && std::isfinite(l2_lambda), "l2_lambda must be >= 0");
  require(learning_rate > 0.0 && std::isfinite(learning_rate), "learning_rate must be > 0");
  require(max_iters >= 0, "max_iters must be >= 0");
  require(grad_tol >= 0.0, "grad_tol must be >= 0");
  require(test_fraction > 0.0 && test_fraction < 1.0, "test_fraction must lie in (0,1)");
  require(repetitions >= 1, "repetitions must be >= 1");
}

EncodedLabels encode_labels(const std::vector<std::string>& labels) {
  EncodedLabels out;
  out.classes = labels;
  std::sort(out.classes.begin(), out.classes.end());
  out.classes.erase(std::unique(out.classes.begin(), out.classes.end()), out.classes.end());
  out.ids.reserve(labels.size());
  for (const auto& label : labels) {
    const auto it = std::lower_bound(out.classes.begin(), out.classes.end(), label);
    out.ids.push_back(static_cast<int>(it - out.classes.begin()));
  }
  return out;
}

LossGradient loss_and_gradient(const Eigen::MatrixXd& Z, const std::vector<int>& y, int n_classes,
                               const Eigen::MatrixXd& W, const Eigen::VectorXd& b, double lambda) {
  const Eigen::Index m = Z.rows();
  if (W.rows() != n_classes || b.size() != n_classes || W.cols() != Z.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "probe parameters do not match the data");
  }
  // logits: m x k
  Eigen::MatrixXd P = (Z * W.transpose()).rowwise() + b.transpose();
  double nll = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double top = P.row(i).maxCoeff();
    P.row(i).array() -= top;
    const double log_norm = std::log(P.row(i).array().exp().sum());
    nll -= P(i, y[static_cast<std::size_t>(i)]) - log_norm;
    P.row(i) = (P.row(i).array() - log_norm).exp().matrix();
  }
  for (Eigen::Index i = 0; i < m; ++i) P(i, y[static_cast<std::size_t>(i)]) -= 1.0;

  LossGradient out;
  const double inv_m = 1.0 / static_cast<double>(m);
  out.loss = nll * inv_m + 0.5 * lambda * W.squaredNorm();
  out.grad_w = inv_m * (P.transpose() * Z) + lambda * W;
  out.grad_b = inv_m * P.colwise().sum().transpose();
  return out;
}

std::vector<int> ProbeModel::predict_ids(const Eigen::MatrixXd& X) const {
  if (X.cols() != feature_mean.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "feature count differs from the trained probe");
  }
  const Eigen::MatrixXd Z = (X.rowwise() - feature_mean.transpose()).array().rowwise() /
                            feature_scale.transpose().array();
  const Eigen::MatrixXd logits = (Z * weights.transpose()).rowwise() + bias.transpose();
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index best = 0;
    logits.row(i).maxCoeff(&best);  // first maximum wins ties
    out.push_back(static_cast<int>(best));
  }
  return out;
}

std::vector<std::string> ProbeModel::predict(const Eigen::MatrixXd& X) const {
  std::vector<std::string> out;
  for (int id : predict_ids(X)) out.push_back(classes[static_cast<std::size_t>(id)]);
  return out;
}

ProbeModel train_logreg(const Eigen::MatrixXd& X, const std::vector<std::string>& y,
                        const ProbeConfig& config) {
  config.check();
  if (static_cast<std::size_t>(X.rows()) != y.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "X has " + std::to_string(X.rows()) + " rows but " +
                                                   std::to_string(y.size()) + " labels");
  }
  if (X.cols() == 0) throw Error(ErrorCode::kDimensionMismatch, "X has no feature columns");
  const EncodedLabels enc = encode_labels(y);
  if (enc.classes.size() < 2) throw Error(ErrorCode::kSingleClass, "probe needs at least two classes");

  ProbeModel model;
  model.classes = enc.classes;
  const double m = static_cast<double>(X.rows());
  model.feature_mean = X.colwise().mean().transpose();
  const Eigen::MatrixXd centered = X.rowwise() - model.feature_mean.transpose();
  model.feature_scale = (centered.colwise().squaredNorm().array() / m).sqrt().max(kFeatureStdFloor).matrix().transpose();
  const Eigen::MatrixXd Z = centered.array().rowwise() / model.feature_scale.transpose().array();

  const int k = static_cast<int>(enc.classes.size());
  model.weights = Eigen::MatrixXd::Zero(k, X.cols());
  model.bias = Eigen::VectorXd::Zero(k);

  LossGradient cur = loss_and_gradient(Z, enc.ids, k, model.weights, model.bias, config.l2_lambda);
  model.loss_history.push_back(cur.loss);
  for (int iter = 0; iter < config.max_iters; ++iter) {
    const double gnorm = std::max(cur.grad_w.cwiseAbs().maxCoeff(), cur.grad_b.cwiseAbs().maxCoeff());
    if (gnorm < config.grad_tol) break;
    double step = config.learning_rate;
    bool accepted = false;
    for (int bt = 0; bt < kMaxBacktracks; ++bt, step *= 0.5) {
      Eigen::MatrixXd W = model.weights - step * cur.grad_w;
      Eigen::VectorXd b = model.bias - step * cur.grad_b;
      LossGradient next = loss_and_gradient(Z, enc.ids, k, W, b, config.l2_lambda);
      if (next.loss <= cur.loss) {
        model.weights = std::move(W);
        model.bias = std::move(b);
        cur = std::move(next);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    model.iterations = iter + 1;
    model.loss_history.push_back(cur.loss);
  }
  model.final_loss = cur.loss;
  return model;
}

double accuracy(const std::vector<std::string>& predicted, const std::vector<std::string>& truth) {
  if (predicted.size() != truth.size() || truth.empty()) {
    throw Error(ErrorCode::kDimensionMismatch, "accuracy needs equal-length nonempty label lists");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double majority_baseline(const std::vector<std::string>& y) {
  if (y.empty()) throw Error(ErrorCode::kInvalidArgument, "majority baseline of an empty label list");
  std::map<std::string, std::size_t> counts;
  std::size_t best = 0;
  for (const auto& label : y) best = std::max(best, ++counts[label]);
  return static_cast<double>(best) / static_cast<double>(y.size());
}

Split stratified_split(const std::vector<std::string>& y, double test_fraction, std::uint64_t seed,
                       std::uint64_t repetition) {
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < y.size(); ++i) members[y[i]].push_back(i);
  Rng rng(seed, repetition);
  Split split;
  for (auto& [label, idx] : members) {
    if (idx.size() < 2) {
      throw Error(ErrorCode::kClassTooSmall,
                  "class '" + label + "' has " + std::to_string(idx.size()) + " member(s), need 2");
    }
    rng.shuffle(std::span<std::size_t>(idx));
    const double want = std::round(test_fraction * static_cast<double>(idx.size()));
    const auto n_test = std::min(idx.size() - 1, std::max<std::size_t>(1, static_cast<std::size_t>(want)));
    split.test.insert(split.test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
    split.train.insert(split.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

namespace {

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

std::vector<std::string> take(const std::vector<std::string>& y, const std::vector<std::size_t>& rows) {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(y[r]);
  return out;
}

}  // namespace

ProbeReport monte_carlo_cv(const Eigen::MatrixXd& X, const std::vector<std::string>& y,
                           const ProbeConfig& config) {
  config.check();
  if (static_cast<std::size_t>(X.rows()) != y.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "X rows and label count differ");
  }
  ProbeReport report;
  report.majority_baseline = majority_baseline(y);
  report.n_classes = encode_labels(y).classes.size();
  if (report.n_classes < 2) throw Error(ErrorCode::kSingleClass, "probe needs at least two classes");

  for (int r = 0; r < config.repetitions; ++r) {
    const Split split = stratified_split(y, config.test_fraction, config.seed, static_cast<std::uint64_t>(r));
    const ProbeModel model = train_logreg(take_rows(X, split.train), take(y, split.train), config);
    report.accuracies.push_back(accuracy(model.predict(take_rows(X, split.test)), take(y, split.test)));
    report.n_train = split.train.size();
    report.n_test = split.test.size();
  }
  double sum = 0.0;
  for (double a : report.accuracies) sum += a;
  report.mean = sum / static_cast<double>(report.accuracies.size());
  if (report.accuracies.size() > 1) {
    double ss = 0.0;
    for (double a : report.accuracies) ss += (a - report.mean) * (a - report.mean);
    report.std = std::sqrt(ss / static_cast<double>(report.accuracies.size() - 1));
  }
  return report;
}

nlohmann::json ProbeReport::to_json() const {
  return {{"accuracies", accuracies},   {"mean", mean},       {"std", std},
          {"majority_baseline", majority_baseline}, {"n_classes", n_classes},
          {"n_train", n_train},         {"n_test", n_test}};
}

}  // namespace iclscope::probes
