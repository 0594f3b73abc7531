#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "geco/dataset.hpp"
#include "geco/graph.hpp"

namespace geco::gnn {

inline constexpr std::size_t kNumConvLayers = 3;

using RowVector = Eigen::RowVectorXd;
/// Per-class probabilities; nonnegative and summing to 1.
using Probabilities = Eigen::RowVectorXd;

/// Weight (fan_in x fan_out) and bias (1 x fan_out) of one layer.
struct LayerParams {
  Matrix weight;
  Matrix bias;
};

/// Full parameter set of the classifier. Also used to hold gradients and the
/// Adam moment estimates, which share its shapes.
struct GcnParams {
  std::array<LayerParams, kNumConvLayers> conv;
  LayerParams head;

  /// Visits every parameter tensor in a fixed order: conv weights/biases, then head.
  template <typename F>
  void for_each(F&& f) {
    for (auto& layer : conv) {
      f(layer.weight);
      f(layer.bias);
    }
    f(head.weight);
    f(head.bias);
  }
  template <typename F>
  void for_each(F&& f) const {
    for (const auto& layer : conv) {
      f(layer.weight);
      f(layer.bias);
    }
    f(head.weight);
    f(head.bias);
  }

  GcnParams zeros_like() const;
  std::size_t num_scalars() const;
  bool all_finite() const;
};

/// Three GCN layers, mean readout, linear softmax head.
class GcnModel {
 public:
  /// Glorot-uniform weights and zero biases drawn from `seed`.
  static GcnModel initialize(std::size_t input_dim, std::size_t hidden_dim,
                             std::size_t num_classes, std::uint64_t seed);

  /// Checks that the layer shapes chain; throws std::invalid_argument otherwise.
  explicit GcnModel(GcnParams params);

  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(params_.conv[0].weight.rows()); }
  std::size_t hidden_dim() const noexcept { return static_cast<std::size_t>(params_.conv[0].weight.cols()); }
  std::size_t num_classes() const noexcept { return static_cast<std::size_t>(params_.head.weight.cols()); }

  const GcnParams& params() const noexcept { return params_; }

  bool operator==(const GcnModel& other) const;

 private:
  GcnParams params_;
};

/// D^{-1/2} (A + I) D^{-1/2}, with D the degree matrix of A + I.
Matrix normalize_adjacency(const Graph& g);

/// Intermediate values of one forward pass, kept for backpropagation.
struct ForwardTrace {
  Matrix adjacency;                                  // normalized adjacency
  std::array<Matrix, kNumConvLayers + 1> hidden;     // H0 = X, ..., H3
  std::array<Matrix, kNumConvLayers> propagated;     // A_hat * H_k
  std::array<Matrix, kNumConvLayers> preactivation;  // A_hat * H_k * W_k + b_k
  RowVector readout;
  RowVector logits;
  Probabilities probs;
};

/// Forward pass. A graph with no nodes reads out the zero vector, so its
/// output is softmax(head bias). Throws std::invalid_argument on a feature
/// dimension mismatch.
ForwardTrace forward(const GcnModel& model, const Graph& g);

/// Same as forward() with a precomputed normalized adjacency.
ForwardTrace forward(const GcnModel& model, const Graph& g, const Matrix& adjacency);

struct Prediction {
  ClassId label = 0;
  Probabilities probs;
};

/// Argmax of the forward probabilities; ties go to the lower class index.
Prediction predict(const GcnModel& model, const Graph& g);

ClassId argmax(const Probabilities& probs);

struct LossAndGrad {
  double loss = 0.0;
  GcnParams grad;
};

/// Mean cross-entropy over `batch` and its gradient. Every graph must carry a label.
LossAndGrad loss_and_grad(const GcnModel& model, std::span<const Graph> batch);

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t batch_size = 64;
  std::size_t epochs = 100;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Raised when the loss or a parameter becomes NaN/Inf during training.
class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainResult {
  GcnModel model;
  /// Mean training loss of each epoch.
  std::vector<double> loss_history;
};

/// Mini-batch Adam with bias correction; the sample order is reshuffled every
/// epoch from cfg.seed, so the result is a pure function of its inputs.
TrainResult train(GcnModel model, const Dataset& data, const TrainConfig& cfg);

/// Fraction of labeled graphs predicted correctly (0 for an empty range).
double accuracy(const GcnModel& model, std::span<const Graph> graphs);

// Checkpoint: {"format":"geco-gcn","input_dim","hidden_dim","num_classes",
// "layers":[{"rows","cols","weight":[row-major...],"bias":[...]} x 4]}.
std::string model_to_json(const GcnModel& model);
GcnModel model_from_json(std::string_view text);
void save_model(const GcnModel& model, const std::filesystem::path& path);
GcnModel load_model(const std::filesystem::path& path);

}  // namespace geco::gnn
