#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace geco {

using NodeId = std::uint32_t;
using ClassId = std::size_t;
using Matrix = Eigen::MatrixXd;

/// Undirected edge, always stored with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  auto operator<=>(const Edge&) const = default;
};

/// Boolean selection over the nodes of one graph.
class NodeMask {
 public:
  NodeMask() = default;
  explicit NodeMask(std::size_t size, bool value = false) : bits_(size, value ? 1 : 0) {}

  static NodeMask from_indices(std::size_t size, const std::vector<NodeId>& nodes);

  std::size_t size() const noexcept { return bits_.size(); }
  bool test(std::size_t i) const { return bits_.at(i) != 0; }
  void set(std::size_t i, bool value = true) { bits_.at(i) = value ? 1 : 0; }

  std::size_t count() const noexcept;
  bool none() const noexcept { return count() == 0; }

  NodeMask complement() const;
  std::vector<NodeId> indices() const;

  NodeMask& operator|=(const NodeMask& other);
  bool operator==(const NodeMask&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Undirected, unweighted graph with dense per-node features and an optional class label.
///
/// Edges are normalized to u < v and kept sorted. Self-loops, duplicate edges
/// and out-of-range endpoints are rejected with std::invalid_argument. A graph
/// with zero nodes is valid and keeps its feature dimension.
class Graph {
 public:
  Graph() = default;
  Graph(std::size_t num_nodes, std::vector<Edge> edges, Matrix features = {},
        std::optional<ClassId> label = std::nullopt);

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  std::size_t feature_dim() const noexcept { return static_cast<std::size_t>(features_.cols()); }

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Matrix& features() const noexcept { return features_; }
  const std::optional<ClassId>& label() const noexcept { return label_; }

  /// Sorted neighbor list of `v`.
  const std::vector<NodeId>& neighbors(NodeId v) const { return adjacency_.at(v); }
  std::size_t degree(NodeId v) const { return adjacency_.at(v).size(); }
  bool has_edge(NodeId a, NodeId b) const;

  Graph with_features(Matrix features) const;
  Graph with_label(std::optional<ClassId> label) const;

  bool operator==(const Graph& other) const;

 private:
  std::size_t num_nodes_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> adjacency_;
  Matrix features_;
  std::optional<ClassId> label_;
};

/// An induced subgraph together with the dense, order-preserving reindexing.
struct Subgraph {
  Graph graph;
  std::vector<NodeId> new_to_old;
  /// Indexed by original node; nullopt for nodes that were dropped.
  std::vector<std::optional<NodeId>> old_to_new;
};

/// Keeps exactly the nodes selected in `nodes` and every edge between them.
Subgraph induced_subgraph(const Graph& g, const NodeMask& nodes);

/// Drops the nodes selected in `nodes`; equals induced_subgraph on the complement.
Subgraph remove_nodes(const Graph& g, const NodeMask& nodes);

std::size_t degree(const Graph& g, NodeId v);

/// Relabels nodes: node v of `g` becomes node perm[v] of the result.
Graph permute_nodes(const Graph& g, const std::vector<NodeId>& perm);

}  // namespace geco
