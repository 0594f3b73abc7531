#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "geco/graph.hpp"

namespace geco::community {

using CommunityId = std::size_t;

/// Assignment of every node to one community; ids are dense and every
/// community is nonempty.
class Partition {
 public:
  Partition() = default;

  /// Accepts arbitrary labels and renumbers them densely in order of first
  /// appearance (so community 0 contains node 0).
  static Partition from_labels(const std::vector<std::size_t>& labels);

  std::size_t num_nodes() const noexcept { return community_of_.size(); }
  std::size_t num_communities() const noexcept { return num_communities_; }
  CommunityId community_of(NodeId v) const { return community_of_.at(v); }
  const std::vector<CommunityId>& labels() const noexcept { return community_of_; }

  /// Members of each community, ascending.
  std::vector<std::vector<NodeId>> members() const;

  bool operator==(const Partition&) const = default;

 private:
  std::vector<CommunityId> community_of_;
  std::size_t num_communities_ = 0;
};

/// Newman modularity Q = sum_c [ L_c / m - (d_c / 2m)^2 ]; 0 for edgeless graphs.
double modularity(const Graph& g, const Partition& p);

/// One agglomeration step of the greedy algorithm.
struct MergeStep {
  CommunityId absorbed = 0;   // community that disappears
  CommunityId survivor = 0;   // community that keeps its id (the smaller one)
  double delta_q = 0.0;
  double modularity_after = 0.0;
};

struct GreedyResult {
  Partition partition;
  double modularity = 0.0;
  std::vector<MergeStep> merges;
  /// Community labels (pre-renumbering, by surviving smallest node id) after each merge.
  std::vector<std::vector<std::size_t>> labels_after_merge;
};

/// Clauset-Newman-Moore agglomeration with full bookkeeping of every merge.
/// Set `record_labels` to keep the intermediate partitions.
GreedyResult greedy_modularity(const Graph& g, bool record_labels = false);

/// Starts from singletons and repeatedly merges the adjacent pair with the
/// largest modularity gain (ties to the lexicographically smallest id pair),
/// stopping once no merge gains. Isolated nodes stay singletons.
Partition greedy_modularity_communities(const Graph& g);

inline constexpr std::size_t kBruteForceMaxNodes = 10;

/// Exact optimum by enumerating every set partition. Throws
/// std::invalid_argument above kBruteForceMaxNodes nodes.
std::pair<Partition, double> brute_force_best_partition(const Graph& g);

/// One induced subgraph per community, with that community's mask over `g`.
std::vector<std::pair<Graph, NodeMask>> community_subgraphs(const Graph& g, const Partition& p);

/// Pluggable community detection.
class CommunityDetector {
 public:
  virtual ~CommunityDetector() = default;
  virtual Partition detect(const Graph& g) const = 0;
};

class GreedyModularityDetector final : public CommunityDetector {
 public:
  Partition detect(const Graph& g) const override { return greedy_modularity_communities(g); }
};

}  // namespace geco::community
