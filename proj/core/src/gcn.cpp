#include "geco/gcn.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "geco/rng.hpp"
#include "json.hpp"

namespace geco::gnn {

namespace {

Matrix glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Matrix w(static_cast<Eigen::Index>(fan_in), static_cast<Eigen::Index>(fan_out));
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = (2.0 * rng.uniform() - 1.0) * limit;
  }
  return w;
}

Probabilities softmax(const RowVector& logits) {
  const double top = logits.maxCoeff();
  Probabilities p = (logits.array() - top).exp().matrix();
  return p / p.sum();
}

double log_sum_exp(const RowVector& logits) {
  const double top = logits.maxCoeff();
  return top + std::log((logits.array() - top).exp().sum());
}

void check_layer(const LayerParams& layer, Eigen::Index fan_in, const char* what) {
  if (layer.weight.rows() != fan_in || layer.bias.rows() != 1 ||
      layer.bias.cols() != layer.weight.cols() || layer.weight.cols() == 0) {
    throw std::invalid_argument(std::string("GcnModel: inconsistent shape in ") + what);
  }
}

// Accumulates the gradient of one graph's loss, scaled by `weight`, into `grad`.
double accumulate_graph(const GcnModel& model, const Graph& g, const Matrix& adjacency,
                        double weight, GcnParams& grad) {
  if (!g.label()) throw std::invalid_argument("loss_and_grad: unlabeled graph");
  const ClassId y = *g.label();
  if (y >= model.num_classes()) throw std::invalid_argument("loss_and_grad: label out of range");

  const ForwardTrace t = forward(model, g, adjacency);
  const auto yi = static_cast<Eigen::Index>(y);
  const double loss = log_sum_exp(t.logits) - t.logits(yi);

  const GcnParams& p = model.params();
  RowVector dlogits = t.probs;
  dlogits(yi) -= 1.0;
  dlogits *= weight;
  grad.head.weight.noalias() += t.readout.transpose() * dlogits;
  grad.head.bias += dlogits;

  const Eigen::Index n = t.hidden[0].rows();
  if (n == 0) return loss;
  const RowVector dreadout = dlogits * p.head.weight.transpose();
  Matrix dh = dreadout.replicate(n, 1) / static_cast<double>(n);

  for (std::size_t k = kNumConvLayers; k-- > 0;) {
    const Matrix dz = dh.cwiseProduct((t.preactivation[k].array() > 0.0).cast<double>().matrix());
    grad.conv[k].weight.noalias() += t.propagated[k].transpose() * dz;
    grad.conv[k].bias += dz.colwise().sum();
    if (k > 0) {
      // The normalized adjacency is symmetric, so it is its own transpose.
      dh.noalias() = t.adjacency * (dz * p.conv[k].weight.transpose());
    }
  }
  return loss;
}

struct AdamState {
  GcnParams m;
  GcnParams v;
  std::size_t step = 0;
};

void adam_update(GcnParams& params, const GcnParams& grad, AdamState& state,
                 const TrainConfig& cfg) {
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));

  std::vector<Matrix*> p_list;
  std::vector<const Matrix*> g_list;
  std::vector<Matrix*> m_list;
  std::vector<Matrix*> v_list;
  params.for_each([&](Matrix& x) { p_list.push_back(&x); });
  grad.for_each([&](const Matrix& x) { g_list.push_back(&x); });
  state.m.for_each([&](Matrix& x) { m_list.push_back(&x); });
  state.v.for_each([&](Matrix& x) { v_list.push_back(&x); });

  for (std::size_t i = 0; i < p_list.size(); ++i) {
    Matrix& m = *m_list[i];
    Matrix& v = *v_list[i];
    const Matrix& g = *g_list[i];
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    const auto m_hat = m.array() / bc1;
    const auto v_hat = v.array() / bc2;
    p_list[i]->array() -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.adam_eps);
  }
}

nlohmann::json matrix_to_json(const Matrix& m) {
  auto out = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  }
  return out;
}

Matrix matrix_from_json(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols) {
  if (j.size() != static_cast<std::size_t>(rows * cols)) {
    throw std::invalid_argument("model JSON: parameter array has wrong length");
  }
  Matrix m(rows, cols);
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[i++].get<double>();
  }
  return m;
}

}  // namespace

GcnParams GcnParams::zeros_like() const {
  GcnParams out = *this;
  out.for_each([](Matrix& m) { m.setZero(); });
  return out;
}

std::size_t GcnParams::num_scalars() const {
  std::size_t n = 0;
  for_each([&](const Matrix& m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

bool GcnParams::all_finite() const {
  bool ok = true;
  for_each([&](const Matrix& m) { ok = ok && m.allFinite(); });
  return ok;
}

GcnModel GcnModel::initialize(std::size_t input_dim, std::size_t hidden_dim,
                              std::size_t num_classes, std::uint64_t seed) {
  if (input_dim == 0 || hidden_dim == 0 || num_classes == 0) {
    throw std::invalid_argument("GcnModel: dimensions must be positive");
  }
  Rng rng(seed);
  GcnParams p;
  std::size_t fan_in = input_dim;
  for (auto& layer : p.conv) {
    layer.weight = glorot(fan_in, hidden_dim, rng);
    layer.bias = Matrix::Zero(1, static_cast<Eigen::Index>(hidden_dim));
    fan_in = hidden_dim;
  }
  p.head.weight = glorot(hidden_dim, num_classes, rng);
  p.head.bias = Matrix::Zero(1, static_cast<Eigen::Index>(num_classes));
  return GcnModel(std::move(p));
}

GcnModel::GcnModel(GcnParams params) : params_(std::move(params)) {
  Eigen::Index fan_in = params_.conv[0].weight.rows();
  if (fan_in == 0) throw std::invalid_argument("GcnModel: zero input dimension");
  for (const auto& layer : params_.conv) {
    check_layer(layer, fan_in, "conv layer");
    fan_in = layer.weight.cols();
  }
  check_layer(params_.head, fan_in, "head");
}

bool GcnModel::operator==(const GcnModel& other) const {
  std::vector<const Matrix*> a;
  std::vector<const Matrix*> b;
  params_.for_each([&](const Matrix& m) { a.push_back(&m); });
  other.params_.for_each([&](const Matrix& m) { b.push_back(&m); });
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i]->rows() != b[i]->rows() || a[i]->cols() != b[i]->cols() || *a[i] != *b[i]) {
      return false;
    }
  }
  return true;
}

Matrix normalize_adjacency(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Matrix a = Matrix::Identity(n, n);
  for (const Edge& e : g.edges()) {
    a(e.u, e.v) = 1.0;
    a(e.v, e.u) = 1.0;
  }
  Eigen::VectorXd inv_sqrt(n);
  for (Eigen::Index v = 0; v < n; ++v) {
    inv_sqrt(v) = 1.0 / std::sqrt(static_cast<double>(g.degree(static_cast<NodeId>(v)) + 1));
  }
  return inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
}

ForwardTrace forward(const GcnModel& model, const Graph& g) {
  return forward(model, g, normalize_adjacency(g));
}

ForwardTrace forward(const GcnModel& model, const Graph& g, const Matrix& adjacency) {
  if (g.feature_dim() != model.input_dim()) {
    throw std::invalid_argument("forward: graph feature_dim " + std::to_string(g.feature_dim()) +
                                " != model input_dim " + std::to_string(model.input_dim()));
  }
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  if (adjacency.rows() != n || adjacency.cols() != n) {
    throw std::invalid_argument("forward: adjacency shape mismatch");
  }
  const GcnParams& p = model.params();
  ForwardTrace t;
  t.adjacency = adjacency;
  t.hidden[0] = g.features();
  for (std::size_t k = 0; k < kNumConvLayers; ++k) {
    t.propagated[k].noalias() = adjacency * t.hidden[k];
    t.preactivation[k].noalias() = t.propagated[k] * p.conv[k].weight;
    t.preactivation[k].rowwise() += p.conv[k].bias.row(0);
    t.hidden[k + 1] = t.preactivation[k].cwiseMax(0.0);
  }
  if (n == 0) {
    t.readout = RowVector::Zero(static_cast<Eigen::Index>(model.hidden_dim()));
  } else {
    t.readout = t.hidden[kNumConvLayers].colwise().mean();
  }
  t.logits = t.readout * p.head.weight + p.head.bias.row(0);
  t.probs = softmax(t.logits);
  return t;
}

ClassId argmax(const Probabilities& probs) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < probs.size(); ++i) {
    if (probs(i) > probs(best)) best = i;
  }
  return static_cast<ClassId>(best);
}

Prediction predict(const GcnModel& model, const Graph& g) {
  ForwardTrace t = forward(model, g);
  return {argmax(t.probs), std::move(t.probs)};
}

LossAndGrad loss_and_grad(const GcnModel& model, std::span<const Graph> batch) {
  if (batch.empty()) throw std::invalid_argument("loss_and_grad: empty batch");
  LossAndGrad out{0.0, model.params().zeros_like()};
  const double weight = 1.0 / static_cast<double>(batch.size());
  for (const Graph& g : batch) {
    out.loss += weight * accumulate_graph(model, g, normalize_adjacency(g), weight, out.grad);
  }
  return out;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("TrainConfig: learning_rate must be finite and >= 0");
  }
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("TrainConfig: Adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw std::invalid_argument("TrainConfig: adam_eps must be > 0");
}

TrainResult train(GcnModel model, const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.graphs.empty()) throw std::invalid_argument("train: empty dataset");
  for (const Graph& g : data.graphs) {
    if (!g.label()) throw std::invalid_argument("train: unlabeled graph");
    if (g.feature_dim() != model.input_dim()) throw std::invalid_argument("train: feature_dim mismatch");
  }

  std::vector<Matrix> adjacency;
  adjacency.reserve(data.graphs.size());
  for (const Graph& g : data.graphs) adjacency.push_back(normalize_adjacency(g));

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(data.graphs.size());
  std::iota(order.begin(), order.end(), 0);

  GcnParams params = model.params();
  AdamState adam{params.zeros_like(), params.zeros_like(), 0};
  std::vector<double> history;
  history.reserve(cfg.epochs);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const double weight = 1.0 / static_cast<double>(end - start);
      GcnModel current(params);
      GcnParams grad = params.zeros_like();
      double batch_loss = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        const std::size_t idx = order[i];
        batch_loss += weight * accumulate_graph(current, data.graphs[idx], adjacency[idx], weight, grad);
      }
      if (!std::isfinite(batch_loss)) {
        throw TrainingDiverged("train: non-finite loss at epoch " + std::to_string(epoch) +
                               ", batch starting at " + std::to_string(start));
      }
      epoch_loss += batch_loss * static_cast<double>(end - start);
      adam_update(params, grad, adam, cfg);
      if (!params.all_finite()) {
        throw TrainingDiverged("train: non-finite parameter after epoch " + std::to_string(epoch));
      }
    }
    history.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  return {GcnModel(std::move(params)), std::move(history)};
}

double accuracy(const GcnModel& model, std::span<const Graph> graphs) {
  std::size_t labeled = 0;
  std::size_t correct = 0;
  for (const Graph& g : graphs) {
    if (!g.label()) continue;
    ++labeled;
    if (predict(model, g).label == *g.label()) ++correct;
  }
  return labeled == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(labeled);
}

std::string model_to_json(const GcnModel& model) {
  nlohmann::json doc;
  doc["format"] = "geco-gcn";
  doc["input_dim"] = model.input_dim();
  doc["hidden_dim"] = model.hidden_dim();
  doc["num_classes"] = model.num_classes();
  auto layers = nlohmann::json::array();
  auto add = [&](const LayerParams& layer) {
    layers.push_back({{"rows", layer.weight.rows()},
                      {"cols", layer.weight.cols()},
                      {"weight", matrix_to_json(layer.weight)},
                      {"bias", matrix_to_json(layer.bias)}});
  };
  for (const auto& layer : model.params().conv) add(layer);
  add(model.params().head);
  doc["layers"] = std::move(layers);
  return doc.dump();
}

GcnModel model_from_json(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.value("format", std::string()) != "geco-gcn") {
      throw std::invalid_argument("model JSON: missing or unknown format tag");
    }
    const auto& layers = doc.at("layers");
    if (layers.size() != kNumConvLayers + 1) throw std::invalid_argument("model JSON: expected 4 layers");
    auto read = [](const nlohmann::json& jl) {
      const auto rows = jl.at("rows").get<Eigen::Index>();
      const auto cols = jl.at("cols").get<Eigen::Index>();
      return LayerParams{matrix_from_json(jl.at("weight"), rows, cols),
                         matrix_from_json(jl.at("bias"), 1, cols)};
    };
    GcnParams p;
    for (std::size_t k = 0; k < kNumConvLayers; ++k) p.conv[k] = read(layers[k]);
    p.head = read(layers[kNumConvLayers]);
    return GcnModel(std::move(p));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("model JSON: ") + e.what());
  }
}

void save_model(const GcnModel& model, const std::filesystem::path& path) {
  write_text_file(path, model_to_json(model));
}

GcnModel load_model(const std::filesystem::path& path) {
  return model_from_json(read_text_file(path));
}

}  // namespace geco::gnn
