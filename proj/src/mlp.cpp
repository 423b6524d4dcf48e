#include "peakshaver/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "peakshaver/errors.hpp"

namespace peakshaver {

namespace {

Eigen::MatrixXd relu(const Eigen::MatrixXd& z) { return z.cwiseMax(0.0); }

}  // namespace

Mlp::Mlp(std::vector<int> widths, std::vector<double> dropout, std::uint64_t seed)
    : widths_(std::move(widths)), dropout_(std::move(dropout)) {
  if (widths_.size() < 2) throw DomainError("Mlp needs at least an input and an output layer");
  for (int w : widths_) {
    if (w < 1) throw DomainError("Mlp layer widths must be positive");
  }
  if (dropout_.empty()) dropout_.assign(widths_.size() - 2, 0.0);
  if (dropout_.size() != widths_.size() - 2) {
    throw DomainError("Mlp expects one dropout probability per hidden layer");
  }
  for (double p : dropout_) {
    if (!(p >= 0.0 && p < 1.0)) throw DomainError("dropout probability must lie in [0, 1)");
  }
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    const int in = widths_[l];
    const int out = widths_[l + 1];
    const double limit = std::sqrt(6.0 / in);
    std::uniform_real_distribution<double> dist(-limit, limit);
    Eigen::MatrixXd w(out, in);
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = dist(rng);
    }
    weights_.push_back(std::move(w));
    biases_.push_back(Eigen::VectorXd::Zero(out));
  }
}

Mlp Mlp::pv_model(std::uint64_t seed) { return Mlp({48, 96, 24}, {0.25}, seed); }
Mlp Mlp::demand_day_ahead_model(std::uint64_t seed) { return Mlp({60, 96, 60, 24}, {0.0, 0.0}, seed); }
Mlp Mlp::demand_multi_day_model(std::uint64_t seed) { return Mlp({48, 96, 72, 24}, {0.45, 0.40}, seed); }

bool operator==(const Mlp& a, const Mlp& b) {
  if (a.widths_ != b.widths_ || a.dropout_ != b.dropout_) return false;
  for (std::size_t l = 0; l < a.weights_.size(); ++l) {
    if (a.weights_[l] != b.weights_[l] || a.biases_[l] != b.biases_[l]) return false;
  }
  return true;
}

void Mlp::check_batch(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd* targets) const {
  if (inputs.cols() != input_width()) {
    throw DomainError("Mlp: input width " + std::to_string(inputs.cols()) + " does not match " +
                      std::to_string(input_width()));
  }
  if (targets != nullptr) {
    if (targets->cols() != output_width()) throw DomainError("Mlp: target width mismatch");
    if (targets->rows() != inputs.rows()) throw DomainError("Mlp: input and target sample counts differ");
  }
}

std::vector<double> Mlp::predict(std::span<const double> input) const {
  Eigen::MatrixXd x(1, static_cast<Eigen::Index>(input.size()));
  for (std::size_t i = 0; i < input.size(); ++i) x(0, static_cast<Eigen::Index>(i)) = input[i];
  const Eigen::MatrixXd y = predict_batch(x);
  return std::vector<double>(y.data(), y.data() + y.size());
}

Eigen::MatrixXd Mlp::predict_batch(const Eigen::MatrixXd& inputs) const {
  check_batch(inputs, nullptr);
  Eigen::MatrixXd a = inputs.transpose();
  for (int l = 0; l < layers(); ++l) {
    Eigen::MatrixXd z = weights_[l] * a;
    z.colwise() += biases_[l];
    a = l + 1 < layers() ? relu(z) : std::move(z);
  }
  return a.transpose();
}

double Mlp::mse(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets) const {
  check_batch(inputs, &targets);
  return (predict_batch(inputs) - targets).squaredNorm() / static_cast<double>(targets.size());
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (int l = 0; l < layers(); ++l) n += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
  return n;
}

std::vector<double> Mlp::parameters() const {
  std::vector<double> p;
  p.reserve(parameter_count());
  for (int l = 0; l < layers(); ++l) {
    p.insert(p.end(), weights_[l].data(), weights_[l].data() + weights_[l].size());
    p.insert(p.end(), biases_[l].data(), biases_[l].data() + biases_[l].size());
  }
  return p;
}

void Mlp::set_parameters(std::span<const double> params) {
  if (params.size() != parameter_count()) throw DomainError("Mlp::set_parameters: size mismatch");
  std::size_t k = 0;
  for (int l = 0; l < layers(); ++l) {
    std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(k), weights_[l].size(), weights_[l].data());
    k += static_cast<std::size_t>(weights_[l].size());
    std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(k), biases_[l].size(), biases_[l].data());
    k += static_cast<std::size_t>(biases_[l].size());
  }
}

// Forward/backward pass shared by training and the exposed gradient.
struct MlpTrainer {
  // masks[l] scales hidden layer l's activation (already divided by keep probability); empty = no dropout.
  static void gradient(const Mlp& m, const Eigen::MatrixXd& xt, const Eigen::MatrixXd& yt,
                       const std::vector<Eigen::VectorXd>& masks, double normalizer,
                       std::vector<Eigen::MatrixXd>& gw, std::vector<Eigen::VectorXd>& gb) {
    const int n_layers = m.layers();
    std::vector<Eigen::MatrixXd> acts(static_cast<std::size_t>(n_layers) + 1);
    std::vector<Eigen::MatrixXd> pre(static_cast<std::size_t>(n_layers));
    acts[0] = xt;
    for (int l = 0; l < n_layers; ++l) {
      Eigen::MatrixXd z = m.weights_[l] * acts[l];
      z.colwise() += m.biases_[l];
      pre[l] = z;
      if (l + 1 < n_layers) {
        Eigen::MatrixXd a = relu(z);
        if (!masks.empty()) a = masks[l].asDiagonal() * a;
        acts[l + 1] = std::move(a);
      } else {
        acts[l + 1] = std::move(z);
      }
    }
    Eigen::MatrixXd delta = (2.0 / normalizer) * (acts[n_layers] - yt);
    gw.resize(static_cast<std::size_t>(n_layers));
    gb.resize(static_cast<std::size_t>(n_layers));
    for (int l = n_layers - 1; l >= 0; --l) {
      gw[l] = delta * acts[l].transpose();
      gb[l] = delta.rowwise().sum();
      if (l == 0) break;
      Eigen::MatrixXd back = m.weights_[l].transpose() * delta;
      if (!masks.empty()) back = masks[l - 1].asDiagonal() * back;
      delta = back.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
};

std::vector<double> Mlp::mse_gradient(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets) const {
  check_batch(inputs, &targets);
  std::vector<Eigen::MatrixXd> gw;
  std::vector<Eigen::VectorXd> gb;
  MlpTrainer::gradient(*this, inputs.transpose(), targets.transpose(), {}, static_cast<double>(targets.size()), gw,
                       gb);
  std::vector<double> g;
  g.reserve(parameter_count());
  for (int l = 0; l < layers(); ++l) {
    g.insert(g.end(), gw[l].data(), gw[l].data() + gw[l].size());
    g.insert(g.end(), gb[l].data(), gb[l].data() + gb[l].size());
  }
  return g;
}

TrainResult train_mlp(Mlp model, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                      const TrainOptions& options) {
  model.check_batch(inputs, &targets);
  if (options.epochs < 0 || options.batch_size < 1 || !(options.learning_rate > 0.0)) {
    throw DomainError("train_mlp: invalid options");
  }
  TrainResult result{model, {}};
  if (options.epochs == 0 || inputs.rows() == 0) return result;

  Mlp& m = result.model;
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  const int n_layers = m.layers();
  std::vector<Eigen::MatrixXd> mw, vw;
  std::vector<Eigen::VectorXd> mb, vb;
  for (int l = 0; l < n_layers; ++l) {
    mw.push_back(Eigen::MatrixXd::Zero(m.weights_[l].rows(), m.weights_[l].cols()));
    vw.push_back(mw.back());
    mb.push_back(Eigen::VectorXd::Zero(m.biases_[l].size()));
    vb.push_back(mb.back());
  }

  const Eigen::MatrixXd xt = inputs.transpose();
  const Eigen::MatrixXd yt = targets.transpose();
  const auto n = static_cast<int>(inputs.rows());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(options.seed);
  const bool any_dropout = std::any_of(m.dropout_.begin(), m.dropout_.end(), [](double p) { return p > 0.0; });
  long step = 0;
  std::vector<Eigen::MatrixXd> gw;
  std::vector<Eigen::VectorXd> gb;
  std::vector<Eigen::VectorXd> masks;

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    masks.clear();
    if (any_dropout) {
      for (int l = 0; l + 1 < n_layers; ++l) {
        const double p = m.dropout_[l];
        Eigen::VectorXd mask(m.widths_[l + 1]);
        std::bernoulli_distribution keep(1.0 - p);
        for (Eigen::Index i = 0; i < mask.size(); ++i) mask[i] = keep(rng) ? 1.0 / (1.0 - p) : 0.0;
        masks.push_back(std::move(mask));
      }
    }
    std::shuffle(order.begin(), order.end(), rng);
    for (int start = 0; start < n; start += options.batch_size) {
      const int count = std::min(options.batch_size, n - start);
      Eigen::MatrixXd bx(xt.rows(), count), by(yt.rows(), count);
      for (int i = 0; i < count; ++i) {
        bx.col(i) = xt.col(order[static_cast<std::size_t>(start + i)]);
        by.col(i) = yt.col(order[static_cast<std::size_t>(start + i)]);
      }
      MlpTrainer::gradient(m, bx, by, masks, static_cast<double>(by.size()), gw, gb);
      ++step;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      const double lr = options.learning_rate;
      for (int l = 0; l < n_layers; ++l) {
        mw[l] = kBeta1 * mw[l] + (1.0 - kBeta1) * gw[l];
        vw[l] = kBeta2 * vw[l] + (1.0 - kBeta2) * gw[l].cwiseAbs2();
        m.weights_[l].array() -= lr * (mw[l].array() / c1) / ((vw[l].array() / c2).sqrt() + kEps);
        mb[l] = kBeta1 * mb[l] + (1.0 - kBeta1) * gb[l];
        vb[l] = kBeta2 * vb[l] + (1.0 - kBeta2) * gb[l].cwiseAbs2();
        m.biases_[l].array() -= lr * (mb[l].array() / c1) / ((vb[l].array() / c2).sqrt() + kEps);
      }
    }
    result.loss_trace.push_back(m.mse(inputs, targets));
  }
  return result;
}

}  // namespace peakshaver
