#include "geco/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace geco::metrics {

namespace {

void check_aligned(std::size_t graphs, std::size_t labels, std::size_t masks, const char* what) {
  if (graphs != labels || graphs != masks) {
    throw std::invalid_argument(std::string(what) + ": graphs, labels and masks differ in length");
  }
}

enum class Perturbation { RemoveMask, KeepMask };

double fidelity(const gnn::GcnModel& model, std::span<const Graph> graphs,
                std::span<const ClassId> labels, std::span<const NodeMask> masks,
                Perturbation kind) {
  std::vector<ClassId> original;
  std::vector<ClassId> perturbed;
  original.reserve(graphs.size());
  perturbed.reserve(graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    if (masks[i].size() != graphs[i].num_nodes()) {
      throw std::invalid_argument("fidelity: mask length does not match graph " + std::to_string(i));
    }
    original.push_back(gnn::predict(model, graphs[i]).label);
    const Subgraph sub = kind == Perturbation::RemoveMask ? remove_nodes(graphs[i], masks[i])
                                                         : induced_subgraph(graphs[i], masks[i]);
    perturbed.push_back(gnn::predict(model, sub.graph).label);
  }
  return fidelity_from_predictions(labels, original, perturbed);
}

}  // namespace

void CharactWeights::validate() const {
  if (!(w_plus >= 0.0 && w_plus <= 1.0) || !(w_minus >= 0.0 && w_minus <= 1.0) ||
      std::abs(w_plus + w_minus - 1.0) > 1e-12) {
    throw std::invalid_argument("CharactWeights: weights must lie in [0, 1] and sum to 1");
  }
}

int indicator(ClassId y, ClassId yhat) noexcept { return y == yhat ? 1 : 0; }

double fidelity_from_predictions(std::span<const ClassId> labels, std::span<const ClassId> original,
                                 std::span<const ClassId> perturbed) {
  check_aligned(labels.size(), original.size(), perturbed.size(), "fidelity");
  if (labels.empty()) throw std::invalid_argument("fidelity: empty test set");
  std::vector<double> terms(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    terms[i] = std::abs(indicator(original[i], labels[i]) - indicator(perturbed[i], labels[i]));
  }
  return pairwise_sum(terms) / static_cast<double>(terms.size());
}

double fidelity_plus(const gnn::GcnModel& model, std::span<const Graph> graphs,
                     std::span<const ClassId> labels, std::span<const NodeMask> masks) {
  check_aligned(graphs.size(), labels.size(), masks.size(), "fidelity_plus");
  return fidelity(model, graphs, labels, masks, Perturbation::RemoveMask);
}

double fidelity_minus(const gnn::GcnModel& model, std::span<const Graph> graphs,
                      std::span<const ClassId> labels, std::span<const NodeMask> masks) {
  check_aligned(graphs.size(), labels.size(), masks.size(), "fidelity_minus");
  return fidelity(model, graphs, labels, masks, Perturbation::KeepMask);
}

double characterization(double fid_plus, double fid_minus, CharactWeights w) {
  w.validate();
  if (!(fid_plus >= 0.0 && fid_plus <= 1.0) || !(fid_minus >= 0.0 && fid_minus <= 1.0)) {
    throw std::invalid_argument("characterization: fidelities must lie in [0, 1]");
  }
  const double sufficiency = 1.0 - fid_minus;
  // A zero term with positive weight drives the harmonic mean to 0.
  if ((fid_plus == 0.0 && w.w_plus > 0.0) || (sufficiency == 0.0 && w.w_minus > 0.0)) return 0.0;
  double denom = 0.0;
  if (w.w_plus > 0.0) denom += w.w_plus / fid_plus;
  if (w.w_minus > 0.0) denom += w.w_minus / sufficiency;
  return (w.w_plus + w.w_minus) / denom;
}

double jaccard(const NodeMask& truth, const NodeMask& predicted) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("jaccard: mask length mismatch");
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth.test(i);
    const bool p = predicted.test(i);
    tp += (t && p) ? 1 : 0;
    fp += (!t && p) ? 1 : 0;
    fn += (t && !p) ? 1 : 0;
  }
  return static_cast<double>(tp) / (static_cast<double>(tp + fp + fn) + kJaccardEpsilon);
}

double gea(std::span<const NodeMask> ground_truths, const NodeMask& predicted) {
  if (ground_truths.empty()) return jaccard(NodeMask(predicted.size()), predicted);
  double best = 0.0;
  for (const NodeMask& truth : ground_truths) best = std::max(best, jaccard(truth, predicted));
  return best;
}

FidelityReport evaluate(const gnn::GcnModel& model, std::span<const Graph> graphs,
                        std::span<const ClassId> labels, std::span<const NodeMask> explanations,
                        std::span<const std::vector<NodeMask>> ground_truths, CharactWeights w) {
  check_aligned(graphs.size(), labels.size(), explanations.size(), "evaluate");
  if (ground_truths.size() != graphs.size()) {
    throw std::invalid_argument("evaluate: ground truth count does not match graph count");
  }
  FidelityReport r;
  r.n = graphs.size();
  r.fid_plus = fidelity_plus(model, graphs, labels, explanations);
  r.fid_minus = fidelity_minus(model, graphs, labels, explanations);
  r.charact = characterization(r.fid_plus, r.fid_minus, w);
  std::vector<double> accuracies(graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    accuracies[i] = gea(ground_truths[i], explanations[i]);
  }
  r.gea = pairwise_sum(accuracies) / static_cast<double>(accuracies.size());
  return r;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  out.mean = pairwise_sum(values) / static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return out;
}

}  // namespace geco::metrics
