#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace peakshaver {

struct TrainOptions;
struct TrainResult;

/// Fully connected network: ReLU hidden layers, identity output, inverted
/// dropout after each hidden activation (training only).
class Mlp {
 public:
  /// widths = {input, hidden..., output}; dropout holds one probability per hidden layer.
  /// Weights get a He-uniform initialization from `seed`, biases start at zero.
  Mlp(std::vector<int> widths, std::vector<double> dropout, std::uint64_t seed);

  static Mlp pv_model(std::uint64_t seed);                // 48 -> 96 (p=0.25) -> 24
  static Mlp demand_day_ahead_model(std::uint64_t seed);  // 60 -> 96 -> 60 -> 24
  static Mlp demand_multi_day_model(std::uint64_t seed);  // 48 -> 96 (0.45) -> 72 (0.40) -> 24

  const std::vector<int>& widths() const { return widths_; }
  const std::vector<double>& dropout() const { return dropout_; }
  int layers() const { return static_cast<int>(weights_.size()); }
  int input_width() const { return widths_.front(); }
  int output_width() const { return widths_.back(); }

  Eigen::MatrixXd& weight(int layer) { return weights_.at(static_cast<std::size_t>(layer)); }
  const Eigen::MatrixXd& weight(int layer) const { return weights_.at(static_cast<std::size_t>(layer)); }
  Eigen::VectorXd& bias(int layer) { return biases_.at(static_cast<std::size_t>(layer)); }
  const Eigen::VectorXd& bias(int layer) const { return biases_.at(static_cast<std::size_t>(layer)); }

  std::vector<double> predict(std::span<const double> input) const;
  /// One sample per row.
  Eigen::MatrixXd predict_batch(const Eigen::MatrixXd& inputs) const;
  /// Mean over samples and outputs of the squared error, dropout disabled.
  double mse(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets) const;

  // Flat parameter view: per layer, weights column-major then biases.
  std::size_t parameter_count() const;
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> params);
  /// Exact gradient of mse() with respect to parameters().
  std::vector<double> mse_gradient(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets) const;

  friend bool operator==(const Mlp& a, const Mlp& b);

 private:
  friend struct MlpTrainer;
  friend TrainResult train_mlp(Mlp model, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                               const TrainOptions& options);

  void check_batch(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd* targets) const;

  std::vector<int> widths_;
  std::vector<double> dropout_;
  std::vector<Eigen::MatrixXd> weights_;  // out x in
  std::vector<Eigen::VectorXd> biases_;
};

struct TrainOptions {
  int epochs = 500;
  double learning_rate = 0.01;
  int batch_size = 32;
  std::uint64_t seed = 0;
};

struct TrainResult {
  Mlp model;
  std::vector<double> loss_trace;  // full-data MSE after each epoch
};

/// Minibatch ADAM (0.9, 0.999, 1e-8) on mean squared error. Samples are rows.
/// Dropout masks are drawn once per epoch; minibatch order is reshuffled per epoch.
TrainResult train_mlp(Mlp model, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                      const TrainOptions& options);

}  // namespace peakshaver
