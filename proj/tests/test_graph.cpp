#include <doctest.h>

#include <numeric>

#include "geco/dataset.hpp"
#include "geco/graph.hpp"
#include "geco/synthgen.hpp"
#include "support/oracles.hpp"

using namespace geco;

namespace {

Graph triangle() { return Graph(3, {{0, 1}, {1, 2}, {0, 2}}); }

}  // namespace

TEST_CASE("graph rejects self-loops, duplicates and bad endpoints") {
  CHECK_THROWS_AS(Graph(3, {{1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(3, {{0, 3}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(2, {}, Matrix::Zero(3, 2)), std::invalid_argument);
}

TEST_CASE("edges are normalized and sorted") {
  Graph g(4, {{3, 1}, {2, 0}, {1, 0}});
  REQUIRE(g.num_edges() == 3);
  CHECK(g.edges()[0] == Edge{0, 1});
  CHECK(g.edges()[1] == Edge{0, 2});
  CHECK(g.edges()[2] == Edge{1, 3});
  CHECK(g.has_edge(3, 1));
  CHECK_FALSE(g.has_edge(2, 3));
}

TEST_CASE("induced_subgraph") {
  SUBCASE("triangle, mask {0,1} keeps one edge") {
    const auto sub = induced_subgraph(triangle(), NodeMask::from_indices(3, {0, 1}));
    CHECK(sub.graph.num_nodes() == 2);
    CHECK(sub.graph.num_edges() == 1);
    CHECK(sub.graph.edges()[0] == Edge{0, 1});
  }
  SUBCASE("full mask is the identity") {
    Graph g = Graph(4, {{0, 1}, {1, 2}, {2, 3}}, Matrix::Random(4, 3), ClassId{1});
    const auto sub = induced_subgraph(g, NodeMask(4, true));
    CHECK(sub.graph == g);
    CHECK(sub.new_to_old == std::vector<NodeId>{0, 1, 2, 3});
  }
  SUBCASE("house restricted to its square is a 4-cycle") {
    // House edges with both ends in {0,1,2,3}: 0-1, 1-2, 2-3, 3-0.
    const Graph house = synth::motif(synth::MotifKind::House);
    const auto sub = induced_subgraph(house, NodeMask::from_indices(5, {0, 1, 2, 3}));
    CHECK(sub.graph.num_nodes() == 4);
    CHECK(sub.graph.num_edges() == 4);
    for (NodeId v = 0; v < 4; ++v) CHECK(sub.graph.degree(v) == 2);
  }
  SUBCASE("empty mask gives the empty graph") {
    Graph g(3, {{0, 1}}, Matrix::Ones(3, 2));
    const auto sub = induced_subgraph(g, NodeMask(3));
    CHECK(sub.graph.num_nodes() == 0);
    CHECK(sub.graph.num_edges() == 0);
    CHECK(sub.graph.feature_dim() == 2);
  }
  SUBCASE("features and label follow the kept nodes, mapping is order-preserving") {
    Matrix x(4, 1);
    x << 10, 11, 12, 13;
    Graph g(4, {{0, 3}, {1, 3}}, x, ClassId{2});
    const auto sub = induced_subgraph(g, NodeMask::from_indices(4, {1, 3}));
    CHECK(sub.new_to_old == std::vector<NodeId>{1, 3});
    CHECK(sub.old_to_new[3] == NodeId{1});
    CHECK_FALSE(sub.old_to_new[0].has_value());
    CHECK(sub.graph.features()(0, 0) == 11);
    CHECK(sub.graph.features()(1, 0) == 13);
    CHECK(sub.graph.label() == ClassId{2});
    CHECK(sub.graph.has_edge(0, 1));
  }
  CHECK_THROWS_AS(induced_subgraph(triangle(), NodeMask(2)), std::invalid_argument);
}

TEST_CASE("remove_nodes") {
  const Graph g = triangle();
  CHECK(remove_nodes(g, NodeMask(3)).graph == g);
  CHECK(remove_nodes(g, NodeMask(3, true)).graph.num_nodes() == 0);
  const Graph path(3, {{0, 1}, {1, 2}});
  const auto cut = remove_nodes(path, NodeMask::from_indices(3, {1}));
  CHECK(cut.graph.num_nodes() == 2);
  CHECK(cut.graph.num_edges() == 0);
}

TEST_CASE("degree") {
  CHECK(degree(Graph(1, {}), 0) == 0);
  CHECK(degree(synth::motif(synth::MotifKind::Wheel), 0) == 5);
  const Graph c6 = synth::motif(synth::MotifKind::Cycle6);
  for (NodeId v = 0; v < 6; ++v) CHECK(degree(c6, v) == 2);
}

TEST_CASE("property: subgraph/removal partition the nodes, handshake lemma") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Graph g = testing::random_graph(rng, 0, 15, 0.3, 2);
    const NodeMask m = testing::random_mask(rng, g.num_nodes());
    const auto kept = induced_subgraph(g, m);
    const auto rest = remove_nodes(g, m);
    CHECK(kept.graph.num_edges() <= g.num_edges());
    CHECK(kept.graph.num_nodes() + rest.graph.num_nodes() == g.num_nodes());
    std::vector<int> covered(g.num_nodes(), 0);
    for (NodeId v : kept.new_to_old) ++covered[v];
    for (NodeId v : rest.new_to_old) ++covered[v];
    for (int c : covered) CHECK(c == 1);

    std::size_t degree_sum = 0;
    for (NodeId v = 0; v < g.num_nodes(); ++v) degree_sum += degree(g, v);
    CHECK(degree_sum == 2 * g.num_edges());
  }
}

TEST_CASE("property: graph survives a dataset JSON round trip bit-exactly") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    Graph g = testing::random_graph(rng, 0, 12, 0.3, 3);
    g = g.with_label(trial % 2 == 0 ? std::optional<ClassId>(trial % 3) : std::nullopt);
    Dataset d;
    d.num_classes = 3;
    d.feature_dim = 3;
    d.graphs.push_back(g);
    d.ground_truth.push_back({testing::random_mask(rng, g.num_nodes())});
    const Dataset back = dataset_from_json(dataset_to_json(d));
    CHECK(back == d);
  }
}

TEST_CASE("dataset validation and file errors") {
  Dataset d;
  d.num_classes = 2;
  d.feature_dim = 1;
  d.graphs.push_back(Graph(2, {{0, 1}}, Matrix::Ones(2, 1), ClassId{5}));
  d.ground_truth.push_back({});
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  CHECK_THROWS(dataset_from_json("{not json"));
  CHECK_THROWS(dataset_from_json(R"({"num_classes":2,"feature_dim":1,"graphs":[{"num_nodes":2,"edges":[[0,0]],"features":[[1],[1]],"label":0}]})"));
  CHECK_THROWS(load_dataset("/nonexistent/geco/dataset.json"));
}

TEST_CASE("dataset JSON follows the documented layout") {
  const auto d = dataset_from_json(R"({
    "num_classes": 2, "feature_dim": 2,
    "graphs": [{"num_nodes": 3, "edges": [[0,1],[1,2]],
                "features": [[1,0],[0,1],[0.5,0.25]], "label": 1,
                "ground_truth": [[0,1],[2]]},
               {"num_nodes": 1, "edges": [], "features": [[0,0]], "label": 0,
                "ground_truth": []}]})");
  REQUIRE(d.size() == 2);
  CHECK(d.graphs[0].num_edges() == 2);
  CHECK(d.graphs[0].features()(2, 1) == 0.25);
  CHECK(d.ground_truth[0].size() == 2);
  CHECK(d.ground_truth[0][1] == NodeMask::from_indices(3, {2}));
  CHECK(d.ground_truth[1].empty());
}
