#include "geco/explain.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "geco/synthgen.hpp"

namespace geco::explain {

std::string_view to_string(ThresholdMode mode) {
  return mode == ThresholdMode::Mean ? "mean" : "median";
}

ThresholdMode threshold_mode_from_string(std::string_view name) {
  if (name == "mean") return ThresholdMode::Mean;
  if (name == "median") return ThresholdMode::Median;
  throw std::invalid_argument("unknown threshold mode '" + std::string(name) + "'");
}

double threshold(std::span<const double> values, ThresholdMode mode) {
  if (values.empty()) throw std::invalid_argument("threshold: no values");
  if (mode == ThresholdMode::Mean) {
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  return sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
}

double community_probability(const gnn::GcnModel& model, const Graph& g,
                             const NodeMask& community_mask, ClassId target) {
  if (community_mask.none()) throw std::invalid_argument("community_probability: empty community");
  if (target >= model.num_classes()) throw std::invalid_argument("community_probability: class out of range");
  const Graph sub = induced_subgraph(g, community_mask).graph;
  return gnn::forward(model, sub).probs(static_cast<Eigen::Index>(target));
}

Explanation geco_explain(const gnn::GcnModel& model, const Graph& g, const ExplainOptions& options) {
  if (g.num_nodes() == 0) throw std::invalid_argument("geco_explain: empty graph");

  Explanation ex;
  ex.predicted_class = gnn::predict(model, g).label;

  static const community::GreedyModularityDetector kDefaultDetector;
  const community::CommunityDetector& detector =
      options.detector != nullptr ? *options.detector : kDefaultDetector;
  ex.partition = detector.detect(g);

  const auto target = static_cast<Eigen::Index>(ex.predicted_class);
  for (auto& [sub, mask] : community::community_subgraphs(g, ex.partition)) {
    if (options.recompute_degree_features) {
      const std::size_t max_degree =
          options.max_degree != 0 ? options.max_degree : std::max<std::size_t>(g.feature_dim(), 2) - 1;
      sub = sub.with_features(synth::encode_degree_features(sub, max_degree));
    }
    ex.community_probs.push_back(gnn::forward(model, sub).probs(target));
  }

  ex.tau = threshold(ex.community_probs, options.mode);
  for (std::size_t c = 0; c < ex.community_probs.size(); ++c) {
    if (ex.community_probs[c] > ex.tau) ex.selected_communities.push_back(c);
  }
  if (ex.selected_communities.empty()) {
    const auto best = std::max_element(ex.community_probs.begin(), ex.community_probs.end());
    ex.selected_communities.push_back(static_cast<std::size_t>(best - ex.community_probs.begin()));
    ex.fallback_used = true;
  }

  ex.mask = NodeMask(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const auto c = ex.partition.community_of(v);
    if (std::binary_search(ex.selected_communities.begin(), ex.selected_communities.end(), c)) {
      ex.mask.set(v);
    }
  }
  return ex;
}

NodeMask random_explain(const Graph& g, Rng& rng) {
  NodeMask mask(g.num_nodes());
  for (std::size_t v = 0; v < g.num_nodes(); ++v) mask.set(v, rng.bernoulli(0.5));
  return mask;
}

void write_dot(std::ostream& out, const Graph& g, const NodeMask& mask, std::string_view graph_name) {
  if (mask.size() != g.num_nodes()) throw std::invalid_argument("write_dot: mask length mismatch");
  out << "graph \"" << graph_name << "\" {\n";
  out << "  node [shape=circle, style=filled, fillcolor=white];\n";
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    out << "  " << v;
    if (mask.test(v)) out << " [fillcolor=red]";
    out << ";\n";
  }
  for (const Edge& e : g.edges()) out << "  " << e.u << " -- " << e.v << ";\n";
  out << "}\n";
}

std::string to_dot(const Graph& g, const NodeMask& mask, std::string_view graph_name) {
  std::ostringstream out;
  write_dot(out, g, mask, graph_name);
  return out.str();
}

}  // namespace geco::explain
