#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geco/community.hpp"
#include "geco/gcn.hpp"
#include "geco/graph.hpp"
#include "geco/rng.hpp"

namespace geco::explain {

enum class ThresholdMode { Mean, Median };

std::string_view to_string(ThresholdMode mode);
ThresholdMode threshold_mode_from_string(std::string_view name);

struct Explanation {
  ClassId predicted_class = 0;
  community::Partition partition;
  /// Probability of predicted_class on each community subgraph, by community id.
  std::vector<double> community_probs;
  double tau = 0.0;
  std::vector<community::CommunityId> selected_communities;
  NodeMask mask;
  /// Set when no community beat tau and the argmax community was taken instead.
  bool fallback_used = false;

  bool operator==(const Explanation&) const = default;
};

struct ExplainOptions {
  ThresholdMode mode = ThresholdMode::Mean;
  /// Re-encode one-hot degree features from the community subgraph instead of
  /// keeping the original node rows.
  bool recompute_degree_features = false;
  /// Used only with recompute_degree_features; feature_dim - 1 when zero.
  std::size_t max_degree = 0;
  /// Defaults to greedy modularity when null.
  const community::CommunityDetector* detector = nullptr;
};

/// Mean or median (average of the two middle values for even counts).
double threshold(std::span<const double> values, ThresholdMode mode);

/// Probability of `target` on the subgraph induced by `community_mask`.
double community_probability(const gnn::GcnModel& model, const Graph& g,
                             const NodeMask& community_mask, ClassId target);

/// Community-based explanation:
///   1. classify the whole graph,
///   2. detect communities,
///   3. classify each community subgraph alone and keep the probability of the
///      predicted class,
///   4. set tau to the mean (or median) of those probabilities,
///   5. keep every community scoring strictly above tau; if none does, keep the
///      highest-scoring community (lowest id on ties).
/// Throws std::invalid_argument for an empty graph.
Explanation geco_explain(const gnn::GcnModel& model, const Graph& g, const ExplainOptions& options = {});

inline Explanation geco_explain(const gnn::GcnModel& model, const Graph& g, ThresholdMode mode) {
  ExplainOptions options;
  options.mode = mode;
  return geco_explain(model, g, options);
}

/// Baseline: every node selected independently with probability 0.5.
NodeMask random_explain(const Graph& g, Rng& rng);

/// Graphviz rendering; nodes in `mask` are filled red.
void write_dot(std::ostream& out, const Graph& g, const NodeMask& mask,
               std::string_view graph_name = "G");
std::string to_dot(const Graph& g, const NodeMask& mask, std::string_view graph_name = "G");

}  // namespace geco::explain
