#include "geco/graph.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace geco {

NodeMask NodeMask::from_indices(std::size_t size, const std::vector<NodeId>& nodes) {
  NodeMask mask(size);
  for (NodeId v : nodes) {
    if (v >= size) throw std::invalid_argument("NodeMask: index " + std::to_string(v) + " out of range");
    mask.set(v);
  }
  return mask;
}

std::size_t NodeMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

NodeMask NodeMask::complement() const {
  NodeMask out(size());
  for (std::size_t i = 0; i < size(); ++i) out.bits_[i] = bits_[i] ? 0 : 1;
  return out;
}

std::vector<NodeId> NodeMask::indices() const {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (bits_[i]) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

NodeMask& NodeMask::operator|=(const NodeMask& other) {
  if (other.size() != size()) throw std::invalid_argument("NodeMask: size mismatch in union");
  for (std::size_t i = 0; i < size(); ++i) bits_[i] |= other.bits_[i];
  return *this;
}

Graph::Graph(std::size_t num_nodes, std::vector<Edge> edges, Matrix features,
             std::optional<ClassId> label)
    : num_nodes_(num_nodes), edges_(std::move(edges)), features_(std::move(features)),
      label_(label) {
  for (Edge& e : edges_) {
    if (e.u == e.v) throw std::invalid_argument("Graph: self-loop on node " + std::to_string(e.u));
    if (e.u >= num_nodes_ || e.v >= num_nodes_) {
      throw std::invalid_argument("Graph: edge endpoint out of range");
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw std::invalid_argument("Graph: duplicate edge");
  }

  if (features_.cols() == 0) features_.resize(static_cast<Eigen::Index>(num_nodes_), 0);
  if (features_.rows() != static_cast<Eigen::Index>(num_nodes_)) {
    throw std::invalid_argument("Graph: feature rows (" + std::to_string(features_.rows()) +
                                ") != num_nodes (" + std::to_string(num_nodes_) + ")");
  }

  adjacency_.assign(num_nodes_, {});
  for (const Edge& e : edges_) {
    adjacency_[e.u].push_back(e.v);
    adjacency_[e.v].push_back(e.u);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

bool Graph::has_edge(NodeId a, NodeId b) const {
  if (a >= num_nodes_ || b >= num_nodes_) return false;
  const auto& nbrs = adjacency_[a];
  return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

Graph Graph::with_features(Matrix features) const {
  return Graph(num_nodes_, edges_, std::move(features), label_);
}

Graph Graph::with_label(std::optional<ClassId> label) const {
  Graph out = *this;
  out.label_ = label;
  return out;
}

bool Graph::operator==(const Graph& other) const {
  return num_nodes_ == other.num_nodes_ && edges_ == other.edges_ && label_ == other.label_ &&
         features_.rows() == other.features_.rows() &&
         features_.cols() == other.features_.cols() && features_ == other.features_;
}

Subgraph induced_subgraph(const Graph& g, const NodeMask& nodes) {
  if (nodes.size() != g.num_nodes()) {
    throw std::invalid_argument("induced_subgraph: mask length " + std::to_string(nodes.size()) +
                                " != num_nodes " + std::to_string(g.num_nodes()));
  }
  Subgraph out;
  out.new_to_old = nodes.indices();
  out.old_to_new.assign(g.num_nodes(), std::nullopt);
  for (std::size_t i = 0; i < out.new_to_old.size(); ++i) {
    out.old_to_new[out.new_to_old[i]] = static_cast<NodeId>(i);
  }

  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    const auto& a = out.old_to_new[e.u];
    const auto& b = out.old_to_new[e.v];
    if (a && b) edges.push_back({*a, *b});
  }

  const auto n = static_cast<Eigen::Index>(out.new_to_old.size());
  Matrix features(n, g.features().cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    features.row(i) = g.features().row(out.new_to_old[static_cast<std::size_t>(i)]);
  }
  out.graph = Graph(out.new_to_old.size(), std::move(edges), std::move(features), g.label());
  return out;
}

Subgraph remove_nodes(const Graph& g, const NodeMask& nodes) {
  if (nodes.size() != g.num_nodes()) {
    throw std::invalid_argument("remove_nodes: mask length mismatch");
  }
  return induced_subgraph(g, nodes.complement());
}

std::size_t degree(const Graph& g, NodeId v) { return g.degree(v); }

Graph permute_nodes(const Graph& g, const std::vector<NodeId>& perm) {
  if (perm.size() != g.num_nodes()) throw std::invalid_argument("permute_nodes: size mismatch");
  std::vector<NodeId> seen(perm);
  std::sort(seen.begin(), seen.end());
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i] != i) throw std::invalid_argument("permute_nodes: not a permutation");
  }
  std::vector<Edge> edges;
  edges.reserve(g.num_edges());
  for (const Edge& e : g.edges()) edges.push_back({perm[e.u], perm[e.v]});
  Matrix features(g.features().rows(), g.features().cols());
  for (std::size_t v = 0; v < perm.size(); ++v) {
    features.row(perm[v]) = g.features().row(static_cast<Eigen::Index>(v));
  }
  return Graph(g.num_nodes(), std::move(edges), std::move(features), g.label());
}

}  // namespace geco
