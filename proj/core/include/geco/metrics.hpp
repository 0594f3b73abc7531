#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "geco/gcn.hpp"
#include "geco/graph.hpp"

namespace geco::metrics {

/// Weights of the characterization score; both in [0, 1], summing to 1.
struct CharactWeights {
  double w_plus = 0.5;
  double w_minus = 0.5;

  void validate() const;
};

struct FidelityReport {
  double fid_plus = 0.0;
  double fid_minus = 0.0;
  double charact = 0.0;
  double gea = 0.0;
  std::size_t n = 0;
};

/// 1 when the two classes agree, else 0.
int indicator(ClassId y, ClassId yhat) noexcept;

/// (1/N) sum_i |g(original_i, y_i) - g(perturbed_i, y_i)| from precomputed predictions.
double fidelity_from_predictions(std::span<const ClassId> labels, std::span<const ClassId> original,
                                 std::span<const ClassId> perturbed);

/// Necessity: prediction change when the masked nodes are removed.
double fidelity_plus(const gnn::GcnModel& model, std::span<const Graph> graphs,
                     std::span<const ClassId> labels, std::span<const NodeMask> masks);

/// Sufficiency: prediction change when only the masked nodes are kept.
double fidelity_minus(const gnn::GcnModel& model, std::span<const Graph> graphs,
                      std::span<const ClassId> labels, std::span<const NodeMask> masks);

/// Weighted harmonic mean of fid_plus and 1 - fid_minus; 0 in the limit where
/// either term is 0.
double characterization(double fid_plus, double fid_minus, CharactWeights w = {});

inline constexpr double kJaccardEpsilon = 1e-9;

/// TP / (TP + FP + FN + eps), treating `truth` as the ground truth.
double jaccard(const NodeMask& truth, const NodeMask& predicted);

/// Best Jaccard over all acceptable ground truths. An empty set counts as the
/// single empty mask, so any nonempty prediction scores 0.
double gea(std::span<const NodeMask> ground_truths, const NodeMask& predicted);

/// All four scores over one test set. `labels` are the true classes.
FidelityReport evaluate(const gnn::GcnModel& model, std::span<const Graph> graphs,
                        std::span<const ClassId> labels, std::span<const NodeMask> explanations,
                        std::span<const std::vector<NodeMask>> ground_truths,
                        CharactWeights w = {});

/// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for fewer than two values
};

MeanStd mean_std(std::span<const double> values);

}  // namespace geco::metrics
