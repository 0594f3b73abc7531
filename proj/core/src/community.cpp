#include "geco/community.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>

namespace geco::community {

Partition Partition::from_labels(const std::vector<std::size_t>& labels) {
  Partition p;
  std::map<std::size_t, CommunityId> dense;
  p.community_of_.reserve(labels.size());
  for (std::size_t raw : labels) {
    auto [it, inserted] = dense.try_emplace(raw, dense.size());
    p.community_of_.push_back(it->second);
  }
  p.num_communities_ = dense.size();
  return p;
}

std::vector<std::vector<NodeId>> Partition::members() const {
  std::vector<std::vector<NodeId>> out(num_communities_);
  for (std::size_t v = 0; v < community_of_.size(); ++v) {
    out[community_of_[v]].push_back(static_cast<NodeId>(v));
  }
  return out;
}

double modularity(const Graph& g, const Partition& p) {
  if (p.num_nodes() != g.num_nodes()) {
    throw std::invalid_argument("modularity: partition covers " + std::to_string(p.num_nodes()) +
                                " nodes, graph has " + std::to_string(g.num_nodes()));
  }
  if (g.num_edges() == 0) return 0.0;
  const double m = static_cast<double>(g.num_edges());
  std::vector<double> internal(p.num_communities(), 0.0);
  std::vector<double> degree_sum(p.num_communities(), 0.0);
  for (const Edge& e : g.edges()) {
    if (p.community_of(e.u) == p.community_of(e.v)) internal[p.community_of(e.u)] += 1.0;
  }
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    degree_sum[p.community_of(v)] += static_cast<double>(g.degree(v));
  }
  double q = 0.0;
  for (std::size_t c = 0; c < p.num_communities(); ++c) {
    const double frac = degree_sum[c] / (2.0 * m);
    q += internal[c] / m - frac * frac;
  }
  return q;
}

namespace {

// Ordered so that begin() is the largest gain, then the smallest (i, j).
struct HeapEntry {
  double delta_q;
  CommunityId i;
  CommunityId j;

  bool operator<(const HeapEntry& o) const {
    if (delta_q != o.delta_q) return delta_q > o.delta_q;
    return std::tie(i, j) < std::tie(o.i, o.j);
  }
};

HeapEntry make_entry(double dq, CommunityId a, CommunityId b) {
  return a < b ? HeapEntry{dq, a, b} : HeapEntry{dq, b, a};
}

}  // namespace

GreedyResult greedy_modularity(const Graph& g, bool record_labels) {
  const std::size_t n = g.num_nodes();
  GreedyResult result;
  std::vector<std::size_t> label(n);
  for (std::size_t v = 0; v < n; ++v) label[v] = v;

  if (g.num_edges() == 0) {
    result.partition = Partition::from_labels(label);
    return result;
  }

  const double m = static_cast<double>(g.num_edges());
  std::vector<double> a(n);
  for (NodeId v = 0; v < n; ++v) a[v] = static_cast<double>(g.degree(v)) / (2.0 * m);

  // Sparse rows of the gain matrix: dq[i][j] for adjacent communities only.
  std::vector<std::map<CommunityId, double>> dq(n);
  std::set<HeapEntry> heap;
  for (const Edge& e : g.edges()) {
    const double gain = 2.0 * (1.0 / (2.0 * m) - a[e.u] * a[e.v]);
    dq[e.u][e.v] = gain;
    dq[e.v][e.u] = gain;
    heap.insert(make_entry(gain, e.u, e.v));
  }

  std::vector<std::vector<NodeId>> members(n);
  for (NodeId v = 0; v < n; ++v) members[v] = {v};

  double q = 0.0;
  for (double x : a) q -= x * x;

  while (!heap.empty() && heap.begin()->delta_q > 0.0) {
    const HeapEntry top = *heap.begin();
    const CommunityId keep = top.i;
    const CommunityId gone = top.j;

    for (const auto& [k, gain] : dq[keep]) heap.erase(make_entry(gain, keep, k));
    for (const auto& [k, gain] : dq[gone]) {
      if (k != keep) heap.erase(make_entry(gain, gone, k));
    }

    std::map<CommunityId, double> merged;
    for (const auto& [k, gain] : dq[keep]) {
      if (k == gone) continue;
      auto it = dq[gone].find(k);
      merged[k] = it != dq[gone].end() ? gain + it->second : gain - 2.0 * a[gone] * a[k];
    }
    for (const auto& [k, gain] : dq[gone]) {
      if (k == keep || dq[keep].count(k)) continue;
      merged[k] = gain - 2.0 * a[keep] * a[k];
    }

    for (const auto& [k, gain] : dq[gone]) {
      if (k != keep) dq[k].erase(gone);
    }
    dq[gone].clear();
    for (const auto& [k, gain] : merged) {
      dq[k][keep] = gain;
      heap.insert(make_entry(gain, keep, k));
    }
    dq[keep] = std::move(merged);

    a[keep] += a[gone];
    a[gone] = 0.0;
    q += top.delta_q;
    for (NodeId v : members[gone]) label[v] = keep;
    members[keep].insert(members[keep].end(), members[gone].begin(), members[gone].end());
    members[gone].clear();

    result.merges.push_back({gone, keep, top.delta_q, q});
    if (record_labels) result.labels_after_merge.push_back(label);
  }

  result.partition = Partition::from_labels(label);
  result.modularity = q;
  return result;
}

Partition greedy_modularity_communities(const Graph& g) {
  return greedy_modularity(g).partition;
}

std::pair<Partition, double> brute_force_best_partition(const Graph& g) {
  const std::size_t n = g.num_nodes();
  if (n > kBruteForceMaxNodes) {
    throw std::invalid_argument("brute_force_best_partition: " + std::to_string(n) +
                                " nodes exceeds the limit of " +
                                std::to_string(kBruteForceMaxNodes));
  }
  if (n == 0) return {Partition{}, 0.0};

  // Restricted growth strings enumerate each set partition exactly once,
  // starting from the single-community partition.
  std::vector<std::size_t> rgs(n, 0);
  std::vector<std::size_t> prefix_max(n, 0);
  Partition best = Partition::from_labels(rgs);
  double best_q = modularity(g, best);
  while (true) {
    std::size_t i = n - 1;
    while (i > 0 && rgs[i] > prefix_max[i - 1]) --i;
    if (i == 0) break;
    ++rgs[i];
    prefix_max[i] = std::max(prefix_max[i - 1], rgs[i]);
    for (std::size_t k = i + 1; k < n; ++k) {
      rgs[k] = 0;
      prefix_max[k] = prefix_max[i];
    }
    Partition candidate = Partition::from_labels(rgs);
    const double q = modularity(g, candidate);
    if (q > best_q + 1e-12) {
      best_q = q;
      best = std::move(candidate);
    }
  }
  return {std::move(best), best_q};
}

std::vector<std::pair<Graph, NodeMask>> community_subgraphs(const Graph& g, const Partition& p) {
  if (p.num_nodes() != g.num_nodes()) {
    throw std::invalid_argument("community_subgraphs: partition size mismatch");
  }
  std::vector<std::pair<Graph, NodeMask>> out;
  out.reserve(p.num_communities());
  for (const auto& nodes : p.members()) {
    NodeMask mask = NodeMask::from_indices(g.num_nodes(), nodes);
    out.emplace_back(induced_subgraph(g, mask).graph, std::move(mask));
  }
  return out;
}

}  // namespace geco::community
