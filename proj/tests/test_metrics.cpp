#include <doctest.h>

#include <cmath>

#include "geco/metrics.hpp"
#include "geco/synthgen.hpp"
#include "support/oracles.hpp"

using namespace geco;
using namespace geco::metrics;

namespace {

Graph featured(const Graph& g) { return g.with_features(synth::encode_degree_features(g, 10)); }

}  // namespace

TEST_CASE("indicator") {
  CHECK(indicator(1, 1) == 1);
  CHECK(indicator(0, 2) == 0);
}

TEST_CASE("fidelity from predictions") {
  const std::vector<ClassId> y{0, 1};
  CHECK(fidelity_from_predictions(y, std::vector<ClassId>{0, 1}, std::vector<ClassId>{0, 1}) == 0.0);
  CHECK(fidelity_from_predictions(y, std::vector<ClassId>{0, 1}, std::vector<ClassId>{1, 1}) == 0.5);
  CHECK(fidelity_from_predictions(y, std::vector<ClassId>{1, 0}, std::vector<ClassId>{0, 1}) == 1.0);
  // A change between two wrong classes does not count.
  CHECK(fidelity_from_predictions(std::vector<ClassId>{0}, std::vector<ClassId>{1},
                                  std::vector<ClassId>{2}) == 0.0);
  CHECK_THROWS_AS(fidelity_from_predictions(y, std::vector<ClassId>{0}, std::vector<ClassId>{0, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fidelity_from_predictions({}, {}, {}), std::invalid_argument);
}

TEST_CASE("fidelity on models: empty and full masks") {
  Rng rng(4);
  std::vector<Graph> graphs;
  std::vector<ClassId> labels;
  for (int i = 0; i < 20; ++i) {
    graphs.push_back(featured(testing::random_graph(rng, 1, 12, 0.3, 0)));
    labels.push_back(static_cast<ClassId>(i % 2));
  }
  const auto model = gnn::GcnModel::initialize(11, 8, 2, 12);
  std::vector<NodeMask> none;
  std::vector<NodeMask> full;
  for (const auto& g : graphs) {
    none.emplace_back(g.num_nodes());
    full.emplace_back(g.num_nodes(), true);
  }
  CHECK(fidelity_plus(model, graphs, labels, none) == 0.0);
  CHECK(fidelity_minus(model, graphs, labels, full) == 0.0);

  std::vector<NodeMask> wrong_size{NodeMask(100)};
  CHECK_THROWS_AS(fidelity_plus(model, std::span(graphs).first(1), std::span(labels).first(1), wrong_size),
                  std::invalid_argument);
}

TEST_CASE("characterization") {
  CHECK(characterization(1.0, 0.0) == doctest::Approx(1.0));
  CHECK(characterization(0.5, 0.5) == doctest::Approx(0.5));
  CHECK(characterization(0.0, 0.3) == 0.0);
  CHECK(characterization(0.7, 1.0) == 0.0);
  // Weighted harmonic mean of 0.8 and 0.4 with weights 0.25/0.75.
  CHECK(characterization(0.8, 0.6, {0.25, 0.75}) == doctest::Approx(1.0 / (0.25 / 0.8 + 0.75 / 0.4)));
  CHECK_THROWS_AS(characterization(0.5, 0.5, {0.7, 0.7}), std::invalid_argument);
  CHECK_THROWS_AS(characterization(1.5, 0.5), std::invalid_argument);
}

TEST_CASE("jaccard") {
  const NodeMask a = NodeMask::from_indices(5, {0, 1, 2});
  CHECK(std::abs(jaccard(a, a) - 1.0) < 1e-9);
  CHECK(jaccard(a, NodeMask::from_indices(5, {3, 4})) == 0.0);
  // TP 2, FP 1, FN 1.
  CHECK(jaccard(a, NodeMask::from_indices(5, {1, 2, 3})) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(jaccard(NodeMask(4), NodeMask(4)) == 0.0);
  CHECK_THROWS_AS(jaccard(a, NodeMask(4)), std::invalid_argument);
}

TEST_CASE("gea") {
  const NodeMask pred = NodeMask::from_indices(6, {0, 1, 2});
  const std::vector<NodeMask> truths{NodeMask::from_indices(6, {3, 4, 5}), NodeMask::from_indices(6, {0, 1})};
  CHECK(gea(truths, pred) == doctest::Approx(jaccard(truths[1], pred)));
  CHECK(gea(std::vector<NodeMask>{}, pred) == 0.0);
  CHECK(gea(std::vector<NodeMask>{}, NodeMask(6)) == 0.0);
}

TEST_CASE("property: metrics match the counting oracles") {
  Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(20);
    const NodeMask t = testing::random_mask(rng, n);
    const NodeMask p = testing::random_mask(rng, n);
    const double j = jaccard(t, p);
    CHECK(std::abs(j - testing::plain_jaccard(testing::to_bools(t), testing::to_bools(p))) <= 1e-12);
    CHECK(j >= 0.0);
    CHECK(j <= 1.0);
    CHECK(j == jaccard(p, t));

    const NodeMask other = testing::random_mask(rng, n);
    const std::vector<NodeMask> truths{t, other};
    CHECK(gea(truths, p) >= j);
    CHECK(gea(truths, p) >= jaccard(other, p));

    const double fp = rng.uniform();
    const double fm = rng.uniform();
    const double wp = rng.uniform();
    const CharactWeights w{wp, 1.0 - wp};
    const double c = characterization(fp, fm, w);
    CHECK(std::abs(c - testing::plain_charact(fp, fm, w.w_plus, w.w_minus)) <= 1e-12);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0 + 1e-12);
    // Equal weights: swapping fid_plus with 1 - fid_minus leaves charact unchanged.
    CHECK(std::abs(characterization(fp, fm) - characterization(1.0 - fm, 1.0 - fp)) <= 1e-12);
    // Monotone: more necessity never lowers the score.
    const double fp_up = std::min(1.0, fp + 0.1);
    CHECK(characterization(fp_up, fm, w) >= c - 1e-12);
    const double fm_up = std::min(1.0, fm + 0.1);
    CHECK(characterization(fp, fm_up, w) <= c + 1e-12);
  }
}

TEST_CASE("property: fidelity matches counting over explicit predictions") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto model = gnn::GcnModel::initialize(11, 6, 3, rng.next());
    const std::size_t count = 1 + rng.uniform_index(15);
    std::vector<Graph> graphs;
    std::vector<ClassId> labels;
    std::vector<NodeMask> masks;
    std::vector<std::size_t> orig;
    std::vector<std::size_t> removed;
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < count; ++i) {
      graphs.push_back(featured(testing::random_graph(rng, 1, 10, 0.3, 0)));
      labels.push_back(rng.uniform_index(3));
      masks.push_back(testing::random_mask(rng, graphs.back().num_nodes()));
      const auto plain = testing::to_plain(graphs.back());
      auto keep = testing::to_bools(masks.back());
      orig.push_back(testing::plain_argmax(testing::plain_forward(model, plain)));
      kept.push_back(testing::plain_argmax(testing::plain_forward(model, testing::plain_keep(plain, keep))));
      keep.flip();
      removed.push_back(testing::plain_argmax(testing::plain_forward(model, testing::plain_keep(plain, keep))));
    }
    const double fplus = fidelity_plus(model, graphs, labels, masks);
    const double fminus = fidelity_minus(model, graphs, labels, masks);
    CHECK(std::abs(fplus - testing::plain_fidelity(labels, orig, removed)) <= 1e-12);
    CHECK(std::abs(fminus - testing::plain_fidelity(labels, orig, kept)) <= 1e-12);
    CHECK(fplus >= 0.0);
    CHECK(fplus <= 1.0);

    std::vector<std::vector<NodeMask>> truths;
    for (const auto& g : graphs) truths.push_back({testing::random_mask(rng, g.num_nodes())});
    const FidelityReport r = evaluate(model, graphs, labels, masks, truths);
    CHECK(r.n == count);
    CHECK(r.fid_plus == fplus);
    CHECK(r.fid_minus == fminus);
    CHECK(r.charact == characterization(fplus, fminus));
  }
}

TEST_CASE("pairwise_sum and mean_std") {
  std::vector<double> v(1000, 0.1);
  CHECK(std::abs(pairwise_sum(v) - 100.0) < 1e-12);
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);

  const std::vector<double> x{2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
  const MeanStd ms = mean_std(x);
  CHECK(ms.mean == doctest::Approx(5.0));
  CHECK(ms.std == doctest::Approx(std::sqrt(32.0 / 7.0)));
  CHECK(mean_std(std::vector<double>{3.0}).std == 0.0);
  CHECK(mean_std(std::vector<double>{}).mean == 0.0);
}
