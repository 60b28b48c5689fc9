#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace iclscope::probes {

struct ProbeConfig {
  double l2_lambda = 1e-2;
  double learning_rate = 0.1;
  int max_iters = 500;
  double grad_tol = 1e-6;
  double test_fraction = 0.2;
  int repetitions = 10;
  std::uint64_t seed = 0;

  // Throws InvalidArgument on out-of-range fields.
  void check() const;
};

inline constexpr double kFeatureStdFloor = 1e-8;

// Class labels mapped to dense ids 0..k-1 in sorted label order.
struct EncodedLabels {
  std::vector<std::string> classes;
  std::vector<int> ids;
};

EncodedLabels encode_labels(const std::vector<std::string>& labels);

// Softmax regression in standardized feature space.
struct ProbeModel {
  std::vector<std::string> classes;
  Eigen::VectorXd feature_mean;
  Eigen::VectorXd feature_scale;
  Eigen::MatrixXd weights;  // k x d
  Eigen::VectorXd bias;     // k
  int iterations = 0;
  double final_loss = 0.0;
  std::vector<double> loss_history;  // one entry per accepted step, plus the initial loss

  std::vector<int> predict_ids(const Eigen::MatrixXd& X) const;
  std::vector<std::string> predict(const Eigen::MatrixXd& X) const;
};

// Mean cross-entropy plus (lambda/2)*||W||^2 at parameters (W, b), with gradients.
struct LossGradient {
  double loss = 0.0;
  Eigen::MatrixXd grad_w;
  Eigen::VectorXd grad_b;
};

LossGradient loss_and_gradient(const Eigen::MatrixXd& Z, const std::vector<int>& y, int n_classes,
                               const Eigen::MatrixXd& W, const Eigen::VectorXd& b, double lambda);

ProbeModel train_logreg(const Eigen::MatrixXd& X, const std::vector<std::string>& y,
                        const ProbeConfig& config);

double accuracy(const std::vector<std::string>& predicted, const std::vector<std::string>& truth);

double majority_baseline(const std::vector<std::string>& y);

struct ProbeReport {
  std::vector<double> accuracies;
  double mean = 0.0;
  double std = 0.0;  // sample std over repetitions
  double majority_baseline = 0.0;
  std::size_t n_classes = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;

  nlohmann::json to_json() const;
};

// Stratified split: per class max(1, round(fraction * n_c)) test items.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

Split stratified_split(const std::vector<std::string>& y, double test_fraction, std::uint64_t seed,
                       std::uint64_t repetition);

ProbeReport monte_carlo_cv(const Eigen::MatrixXd& X, const std::vector<std::string>& y,
                           const ProbeConfig& config);

}  // namespace iclscope::probes
