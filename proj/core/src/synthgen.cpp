#include "geco/synthgen.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace geco::synth {

namespace {

constexpr std::array<std::pair<MotifKind, std::string_view>, 5> kMotifNames{{
    {MotifKind::House, "house"},
    {MotifKind::Cycle5, "cycle5"},
    {MotifKind::Cycle6, "cycle6"},
    {MotifKind::Wheel, "wheel"},
    {MotifKind::Grid3x3, "grid"},
}};

std::vector<Edge> cycle_edges(NodeId first, NodeId length) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i < length; ++i) edges.push_back({first + i, first + (i + 1) % length});
  return edges;
}

DatasetRecipe make_recipe(std::string name, BaseModel base, std::vector<MotifKind> motifs) {
  DatasetRecipe r;
  r.name = std::move(name);
  r.base = base;
  r.motif_classes = std::move(motifs);
  return r;
}

}  // namespace

std::string_view to_string(MotifKind kind) {
  for (const auto& [k, name] : kMotifNames) {
    if (k == kind) return name;
  }
  throw std::invalid_argument("unknown motif kind");
}

MotifKind motif_from_string(std::string_view name) {
  for (const auto& [k, n] : kMotifNames) {
    if (n == name) return k;
  }
  throw std::invalid_argument("unknown motif '" + std::string(name) + "'");
}

std::string_view to_string(BaseModel model) {
  return model == BaseModel::ErdosRenyi ? "er" : "ba";
}

BaseModel base_model_from_string(std::string_view name) {
  if (name == "er") return BaseModel::ErdosRenyi;
  if (name == "ba") return BaseModel::BarabasiAlbert;
  throw std::invalid_argument("unknown base model '" + std::string(name) + "'");
}

void DatasetRecipe::validate() const {
  if (graphs_per_class < 1) throw std::invalid_argument("recipe: graphs_per_class must be >= 1");
  if (n_base_nodes < 1) throw std::invalid_argument("recipe: n_base_nodes must be >= 1");
  if (motif_classes.empty()) throw std::invalid_argument("recipe: no motif classes");
  if (max_degree < 1) throw std::invalid_argument("recipe: max_degree must be >= 1");
  if (base == BaseModel::ErdosRenyi && !(er_p > 0.0 && er_p < 1.0)) {
    throw std::invalid_argument("recipe: er_p must lie in (0, 1)");
  }
  if (base == BaseModel::BarabasiAlbert && (ba_m < 1 || ba_m >= n_base_nodes)) {
    throw std::invalid_argument("recipe: ba_m must satisfy 1 <= ba_m < n_base_nodes");
  }
  std::set<MotifKind> seen(motif_classes.begin(), motif_classes.end());
  if (seen.size() != motif_classes.size()) {
    throw std::invalid_argument("recipe: duplicate motif in motif_classes");
  }
}

std::vector<std::string> builtin_recipe_names() {
  return {"ba_house_cycle",  "er_house_cycle",      "ba_cycle_wheel",
          "er_cycle_wheel", "ba_cycle_wheel_grid", "er_cycle_wheel_grid"};
}

std::optional<DatasetRecipe> builtin_recipe(std::string_view name) {
  using enum MotifKind;
  const auto ba = BaseModel::BarabasiAlbert;
  const auto er = BaseModel::ErdosRenyi;
  if (name == "ba_house_cycle") return make_recipe("ba_house_cycle", ba, {House, Cycle6});
  if (name == "er_house_cycle") return make_recipe("er_house_cycle", er, {House, Cycle6});
  if (name == "ba_cycle_wheel") return make_recipe("ba_cycle_wheel", ba, {Cycle5, Wheel});
  if (name == "er_cycle_wheel") return make_recipe("er_cycle_wheel", er, {Cycle5, Wheel});
  if (name == "ba_cycle_wheel_grid") {
    return make_recipe("ba_cycle_wheel_grid", ba, {Cycle5, Wheel, Grid3x3});
  }
  if (name == "er_cycle_wheel_grid") {
    return make_recipe("er_cycle_wheel_grid", er, {Cycle5, Wheel, Grid3x3});
  }
  return std::nullopt;
}

std::string recipe_to_json(const DatasetRecipe& recipe) {
  nlohmann::json doc;
  doc["name"] = recipe.name;
  doc["base"] = to_string(recipe.base);
  doc["n_base_nodes"] = recipe.n_base_nodes;
  auto motifs = nlohmann::json::array();
  for (MotifKind k : recipe.motif_classes) motifs.push_back(to_string(k));
  doc["motif_classes"] = std::move(motifs);
  doc["graphs_per_class"] = recipe.graphs_per_class;
  doc["er_p"] = recipe.er_p;
  doc["ba_m"] = recipe.ba_m;
  doc["max_degree"] = recipe.max_degree;
  doc["seed"] = recipe.seed;
  return doc.dump(2);
}

DatasetRecipe recipe_from_json(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    DatasetRecipe r;
    r.name = doc.value("name", std::string("custom"));
    r.base = base_model_from_string(doc.at("base").get<std::string>());
    r.n_base_nodes = doc.value("n_base_nodes", r.n_base_nodes);
    for (const auto& m : doc.at("motif_classes")) {
      r.motif_classes.push_back(motif_from_string(m.get<std::string>()));
    }
    r.graphs_per_class = doc.value("graphs_per_class", r.graphs_per_class);
    r.er_p = doc.value("er_p", r.er_p);
    r.ba_m = doc.value("ba_m", r.ba_m);
    r.max_degree = doc.value("max_degree", r.max_degree);
    r.seed = doc.value("seed", r.seed);
    r.validate();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("recipe JSON: ") + e.what());
  }
}

Graph gen_er(std::size_t n, double p, Rng& rng) {
  if (n < 1) throw std::invalid_argument("gen_er: n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("gen_er: p must lie in [0, 1]");
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (rng.bernoulli(p)) edges.push_back({u, v});
    }
  }
  return Graph(n, std::move(edges));
}

Graph gen_ba(std::size_t n, std::size_t m, Rng& rng) {
  if (m < 1 || m >= n) throw std::invalid_argument("gen_ba: requires 1 <= m < n");
  std::vector<std::size_t> deg(n, 0);
  std::vector<Edge> edges;
  edges.reserve((n - m) * m);
  std::vector<NodeId> targets;
  for (NodeId v = static_cast<NodeId>(m); v < n; ++v) {
    targets.clear();
    while (targets.size() < m) {
      // Weighted draw over existing nodes not already chosen for this arrival.
      std::size_t total = 0;
      for (NodeId u = 0; u < v; ++u) {
        if (std::find(targets.begin(), targets.end(), u) == targets.end()) {
          total += std::max<std::size_t>(deg[u], 1);
        }
      }
      std::size_t pick = rng.uniform_index(total);
      for (NodeId u = 0; u < v; ++u) {
        if (std::find(targets.begin(), targets.end(), u) != targets.end()) continue;
        const std::size_t w = std::max<std::size_t>(deg[u], 1);
        if (pick < w) {
          targets.push_back(u);
          break;
        }
        pick -= w;
      }
    }
    for (NodeId u : targets) {
      edges.push_back({u, v});
      ++deg[u];
      ++deg[v];
    }
  }
  return Graph(n, std::move(edges));
}

Graph motif(MotifKind kind) {
  switch (kind) {
    case MotifKind::House:
      return Graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 0}, {4, 1}});
    case MotifKind::Cycle5:
      return Graph(5, cycle_edges(0, 5));
    case MotifKind::Cycle6:
      return Graph(6, cycle_edges(0, 6));
    case MotifKind::Wheel: {
      auto edges = cycle_edges(1, 5);
      for (NodeId i = 1; i <= 5; ++i) edges.push_back({0, i});
      return Graph(6, std::move(edges));
    }
    case MotifKind::Grid3x3: {
      std::vector<Edge> edges;
      for (NodeId r = 0; r < 3; ++r) {
        for (NodeId c = 0; c < 3; ++c) {
          const NodeId id = r * 3 + c;
          if (c + 1 < 3) edges.push_back({id, id + 1});
          if (r + 1 < 3) edges.push_back({id, id + 3});
        }
      }
      return Graph(9, std::move(edges));
    }
  }
  throw std::invalid_argument("unknown motif kind");
}

std::pair<Graph, NodeMask> attach_motif(const Graph& base, MotifKind kind, Rng& rng) {
  if (base.num_nodes() < 1) throw std::invalid_argument("attach_motif: base graph is empty");
  const Graph m = motif(kind);
  const auto offset = static_cast<NodeId>(base.num_nodes());
  const std::size_t total = base.num_nodes() + m.num_nodes();

  std::vector<Edge> edges = base.edges();
  for (const Edge& e : m.edges()) edges.push_back({e.u + offset, e.v + offset});
  const auto base_end = static_cast<NodeId>(rng.uniform_index(base.num_nodes()));
  const auto motif_end = static_cast<NodeId>(offset + rng.uniform_index(m.num_nodes()));
  edges.push_back({base_end, motif_end});

  NodeMask mask(total);
  for (std::size_t v = offset; v < total; ++v) mask.set(v);
  return {Graph(total, std::move(edges)), std::move(mask)};
}

Matrix encode_degree_features(const Graph& g, std::size_t max_degree) {
  if (max_degree < 1) throw std::invalid_argument("encode_degree_features: max_degree must be >= 1");
  Matrix x = Matrix::Zero(static_cast<Eigen::Index>(g.num_nodes()),
                          static_cast<Eigen::Index>(max_degree + 1));
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    x(v, static_cast<Eigen::Index>(std::min(g.degree(v), max_degree))) = 1.0;
  }
  return x;
}

Dataset build_dataset(const DatasetRecipe& recipe) {
  recipe.validate();
  Dataset data;
  data.num_classes = recipe.motif_classes.size();
  data.feature_dim = recipe.max_degree + 1;
  const std::size_t total = recipe.graphs_per_class * data.num_classes;
  data.graphs.reserve(total);
  data.ground_truth.reserve(total);

  std::size_t index = 0;
  for (ClassId c = 0; c < data.num_classes; ++c) {
    for (std::size_t k = 0; k < recipe.graphs_per_class; ++k, ++index) {
      Rng rng(mix_seed(recipe.seed, index));
      Graph base = recipe.base == BaseModel::ErdosRenyi
                       ? gen_er(recipe.n_base_nodes, recipe.er_p, rng)
                       : gen_ba(recipe.n_base_nodes, recipe.ba_m, rng);
      auto [g, mask] = attach_motif(base, recipe.motif_classes[c], rng);
      Matrix x = encode_degree_features(g, recipe.max_degree);
      data.graphs.push_back(Graph(g.num_nodes(), g.edges(), std::move(x), c));
      data.ground_truth.push_back({std::move(mask)});
    }
  }
  return data;
}

}  // namespace geco::synth
