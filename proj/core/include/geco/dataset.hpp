#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "geco/graph.hpp"

namespace geco {

/// Labeled graphs plus their ground-truth explanations.
///
/// ground_truth[i] lists every acceptable explanation of graph i; an empty
/// list means the graph has no explanation (e.g. a negative-class molecule).
struct Dataset {
  std::vector<Graph> graphs;
  std::vector<std::vector<NodeMask>> ground_truth;
  std::size_t num_classes = 0;
  std::size_t feature_dim = 0;

  std::size_t size() const noexcept { return graphs.size(); }

  /// Throws std::invalid_argument when any dataset invariant is broken.
  void validate() const;

  /// Copy restricted to `indices`, in that order.
  Dataset subset(const std::vector<std::size_t>& indices) const;

  bool operator==(const Dataset&) const = default;
};

// JSON document:
//   {num_classes, feature_dim,
//    graphs: [{num_nodes, edges: [[u,v],...], features: [[...],...], label,
//              ground_truth: [[node indices],...]}]}
// Edges are written once per pair with u < v. Doubles use shortest
// round-trip formatting so features survive a save/load bit-exactly.
std::string dataset_to_json(const Dataset& data, int indent = -1);
Dataset dataset_from_json(std::string_view text);

void save_dataset(const Dataset& data, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace geco
