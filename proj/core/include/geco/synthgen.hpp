#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "geco/dataset.hpp"
#include "geco/graph.hpp"
#include "geco/rng.hpp"

namespace geco::synth {

enum class MotifKind { House, Cycle5, Cycle6, Wheel, Grid3x3 };

enum class BaseModel { ErdosRenyi, BarabasiAlbert };

std::string_view to_string(MotifKind kind);
MotifKind motif_from_string(std::string_view name);
std::string_view to_string(BaseModel model);
BaseModel base_model_from_string(std::string_view name);

inline constexpr std::size_t kDefaultMaxDegree = 10;

/// Everything needed to regenerate one synthetic dataset.
struct DatasetRecipe {
  std::string name;
  BaseModel base = BaseModel::BarabasiAlbert;
  std::size_t n_base_nodes = 25;
  std::vector<MotifKind> motif_classes;  // class c plants motif_classes[c]
  std::size_t graphs_per_class = 500;
  double er_p = 0.15;
  std::size_t ba_m = 2;
  std::size_t max_degree = kDefaultMaxDegree;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on out-of-range parameters or repeated motifs.
  void validate() const;
};

/// The six built-in recipes: ba_house_cycle, er_house_cycle, ba_cycle_wheel,
/// er_cycle_wheel, ba_cycle_wheel_grid, er_cycle_wheel_grid.
std::vector<std::string> builtin_recipe_names();
std::optional<DatasetRecipe> builtin_recipe(std::string_view name);

std::string recipe_to_json(const DatasetRecipe& recipe);
DatasetRecipe recipe_from_json(std::string_view text);

/// G(n, p): each of the n(n-1)/2 pairs is an edge independently with probability p.
Graph gen_er(std::size_t n, double p, Rng& rng);

/// Preferential attachment starting from m isolated seed nodes. Each arriving
/// node links to m distinct existing nodes drawn proportionally to degree,
/// with zero-degree nodes counted as degree 1. Yields (n - m) * m edges.
Graph gen_ba(std::size_t n, std::size_t m, Rng& rng);

/// Canonical motif graphs:
///   House   - square 0-1-2-3 plus roof node 4 joined to 0 and 1
///   Cycle5  - simple 5-cycle
///   Cycle6  - simple 6-cycle
///   Wheel   - hub 0 joined to every node of the 5-cycle 1..5
///   Grid3x3 - 3x3 lattice, node r*3+c, 4-neighbor connectivity
Graph motif(MotifKind kind);

/// Disjoint union of `base` and the motif (motif nodes appended after the base
/// nodes) plus one bridge edge between a uniform base node and a uniform motif
/// node. The returned mask marks exactly the motif nodes.
std::pair<Graph, NodeMask> attach_motif(const Graph& base, MotifKind kind, Rng& rng);

/// One-hot degree encoding at column min(degree, max_degree).
Matrix encode_degree_features(const Graph& g, std::size_t max_degree);

/// Generates the dataset; graph i of class c uses a seed derived from
/// (recipe.seed, i), so output depends only on the recipe.
Dataset build_dataset(const DatasetRecipe& recipe);

}  // namespace geco::synth
