// Acceptance suite: one [PASS]/[FAIL] line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "geco/community.hpp"
#include "geco/dataset.hpp"
#include "geco/explain.hpp"
#include "geco/gcn.hpp"
#include "geco/harness.hpp"
#include "geco/metrics.hpp"
#include "geco/synthgen.hpp"
#include "support/oracles.hpp"

using namespace geco;
namespace t = geco::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Accumulates failed checks with a short reason each.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  bool ok() const { return failed_ == 0; }
  std::string summary() const {
    std::string s = std::to_string(failed_) + " failed";
    for (const auto& f : failures_) s += "; " + f;
    return s;
  }

 private:
  std::vector<std::string> failures_;
  std::size_t failed_ = 0;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

Graph degree_featured(const Graph& g) { return g.with_features(synth::encode_degree_features(g, 10)); }

// ---------------------------------------------------------------------------

Outcome metric_oracles() {
  Rng rng(1001);
  Checker check;
  double worst = 0.0;
  auto near = [&](double a, double b, const char* what) {
    worst = std::max(worst, std::abs(a - b));
    check.expect(std::abs(a - b) <= 1e-12, what);
  };
  for (int fixture = 0; fixture < 1000; ++fixture) {
    const std::size_t classes = 2 + rng.uniform_index(2);
    const auto model = gnn::GcnModel::initialize(11, 6, classes, rng.next());
    const std::size_t count = 1 + rng.uniform_index(6);
    std::vector<Graph> graphs;
    std::vector<ClassId> labels;
    std::vector<NodeMask> masks;
    std::vector<std::vector<NodeMask>> truths;
    std::vector<std::size_t> orig, removed, kept;
    std::vector<double> jac;
    for (std::size_t i = 0; i < count; ++i) {
      graphs.push_back(degree_featured(t::random_graph(rng, 1, 12, 0.3, 0)));
      const std::size_t n = graphs.back().num_nodes();
      labels.push_back(rng.uniform_index(classes));
      masks.push_back(t::random_mask(rng, n, rng.uniform()));
      std::vector<NodeMask> zeta;
      const std::size_t k = rng.uniform_index(3);
      for (std::size_t j = 0; j < k; ++j) zeta.push_back(t::random_mask(rng, n));
      truths.push_back(zeta);

      const auto plain = t::to_plain(graphs.back());
      auto keep = t::to_bools(masks.back());
      orig.push_back(t::plain_argmax(t::plain_forward(model, plain)));
      kept.push_back(t::plain_argmax(t::plain_forward(model, t::plain_keep(plain, keep))));
      keep.flip();
      removed.push_back(t::plain_argmax(t::plain_forward(model, t::plain_keep(plain, keep))));

      double best = zeta.empty() ? t::plain_jaccard(std::vector<bool>(n, false), t::to_bools(masks.back())) : 0.0;
      for (const auto& z : zeta) {
        const double j = t::plain_jaccard(t::to_bools(z), t::to_bools(masks.back()));
        near(metrics::jaccard(z, masks.back()), j, "jaccard");
        best = std::max(best, j);
      }
      near(metrics::gea(zeta, masks.back()), best, "gea");
      jac.push_back(best);
    }
    const double fp = metrics::fidelity_plus(model, graphs, labels, masks);
    const double fm = metrics::fidelity_minus(model, graphs, labels, masks);
    near(fp, t::plain_fidelity(labels, orig, removed), "fidelity_plus");
    near(fm, t::plain_fidelity(labels, orig, kept), "fidelity_minus");
    const double wp = rng.uniform();
    near(metrics::characterization(fp, fm, {wp, 1.0 - wp}), t::plain_charact(fp, fm, wp, 1.0 - wp),
         "characterization");
    const auto rep = metrics::evaluate(model, graphs, labels, masks, truths);
    double gea_mean = 0.0;
    for (double j : jac) gea_mean += j;
    near(rep.gea, gea_mean / static_cast<double>(count), "evaluate.gea");
  }
  return {check.ok(), "1000 fixtures, max |diff| " + fmt("%.3g", worst) + (check.ok() ? "" : "; " + check.summary())};
}

Outcome gradient_check() {
  Rng rng(2002);
  double worst = 0.0;
  for (int instance = 0; instance < 50; ++instance) {
    const std::size_t n = 1 + rng.uniform_index(8);
    const std::size_t in = 1 + rng.uniform_index(5);
    const std::size_t hidden = 1 + rng.uniform_index(8);
    const std::size_t classes = 2 + rng.uniform_index(2);
    std::vector<Graph> batch;
    const std::size_t size = 1 + rng.uniform_index(3);
    for (std::size_t b = 0; b < size; ++b) {
      Graph g = t::random_graph(rng, n, n, 0.4, in);
      batch.push_back(g.with_label(rng.uniform_index(classes)));
    }
    // Resample parameters until every pre-activation is clear of the ReLU kink.
    gnn::GcnModel model = t::model_with_random_biases(in, hidden, classes, rng);
    for (int attempt = 0; attempt < 1000 && t::min_abs_preactivation(model, batch) < 1e-3; ++attempt) {
      model = t::model_with_random_biases(in, hidden, classes, rng);
    }
    const auto lg = gnn::loss_and_grad(model, batch);
    worst = std::max(worst, t::check_gradient(model.params(), lg.grad, batch).max_rel_error);
  }
  return {worst < 1e-3, "50 instances, max relative error " + fmt("%.3g", worst)};
}

Outcome community_oracle() {
  Rng rng(3003);
  double worst_ratio = 1e300;
  std::size_t scored = 0;
  for (int instance = 0; instance < 200; ++instance) {
    const std::size_t n = 2 + rng.uniform_index(6);
    const Graph g = t::random_connected_graph(rng, n, rng.uniform() * 0.6);
    const double best = community::brute_force_best_partition(g).second;
    if (best <= 0.0) continue;
    const double q = community::modularity(g, community::greedy_modularity_communities(g));
    worst_ratio = std::min(worst_ratio, q / best);
    ++scored;
  }
  const auto bridge = community::greedy_modularity_communities(t::two_triangles_bridge());
  const auto groups = bridge.members();
  const bool triangles = groups == std::vector<std::vector<NodeId>>{{0, 1, 2}, {3, 4, 5}};
  return {worst_ratio >= 0.9 && triangles,
          std::to_string(scored) + " graphs with optimum > 0, worst greedy/optimal " + fmt("%.4f", worst_ratio) +
              (triangles ? ", bridge fixture split into its triangles" : ", bridge fixture NOT recovered")};
}

/// Means over splits for one method.
harness::MethodSummary summary_for(const harness::ExperimentResults& r, const std::string& method) {
  for (const auto& m : harness::summarize(r.rows)) {
    if (m.method == method) return m;
  }
  return {};
}

harness::ExperimentConfig desk_config(const std::string& dataset) {
  harness::ExperimentConfig cfg = harness::ExperimentConfig::desk_profile();
  cfg.dataset = dataset;
  cfg.graphs_per_class = 150;
  cfg.num_splits = 10;
  cfg.hidden_dim = 20;
  cfg.train.epochs = 100;
  cfg.train.learning_rate = 0.05;
  cfg.train.batch_size = 64;
  cfg.seed = 0;
  return cfg;
}

std::string trend_line(const harness::ExperimentResults& r) {
  const auto g = summary_for(r, "geco");
  const auto x = summary_for(r, "random");
  return fmt("test acc %.3f; geco Fid+ %.3f Fid- %.3f", r.test_accuracy().mean, g.fid_plus.mean, g.fid_minus.mean) +
         fmt(" charact %.3f GEA %.3f; random charact %.3f GEA %.3f", g.charact.mean, g.gea.mean, x.charact.mean,
             x.gea.mean) +
         "; diverged splits " + std::to_string(r.diverged_splits);
}

Outcome house_cycle_trend() {
  const auto r = harness::run_experiment(desk_config("ba_house_cycle"));
  const auto g = summary_for(r, "geco");
  const auto x = summary_for(r, "random");
  std::cout << harness::report(r.rows);
  const bool ok = r.diverged_splits == 0 && r.test_accuracy().mean >= 0.85 && g.fid_minus.mean <= 0.05 &&
                  g.fid_plus.mean >= 0.6 && g.charact.mean > x.charact.mean && g.gea.mean > x.gea.mean;
  return {ok, trend_line(r)};
}

Outcome cycle_wheel_grid_trend() {
  const auto r = harness::run_experiment(desk_config("ba_cycle_wheel_grid"));
  const auto g = summary_for(r, "geco");
  const auto x = summary_for(r, "random");
  std::cout << harness::report(r.rows);
  const bool ok = r.diverged_splits == 0 && g.fid_minus.mean <= 0.05 && g.gea.mean > x.gea.mean;
  return {ok, trend_line(r)};
}

/// Everything a run produces that must be reproducible.
struct RunArtifacts {
  std::string dataset_json;
  std::vector<std::vector<double>> loss_histories;
  std::vector<explain::Explanation> explanations;
  std::string results_csv;
  std::string splits_csv;
};

RunArtifacts one_run() {
  RunArtifacts a;
  auto recipe = *synth::builtin_recipe("ba_house_cycle");
  recipe.graphs_per_class = 150;
  const Dataset data = synth::build_dataset(recipe);
  a.dataset_json = dataset_to_json(data);

  harness::ExperimentConfig cfg = desk_config("ba_house_cycle");
  cfg.graphs_per_class = 40;
  cfg.num_splits = 3;
  cfg.train.epochs = 30;
  auto results = harness::run_experiment(cfg);
  for (auto& s : results.splits) a.loss_histories.push_back(s.loss_history);
  for (auto& row : results.rows) row.explain_seconds = 0.0;
  a.results_csv = harness::results_to_csv(results.rows);
  a.splits_csv = harness::splits_to_csv(results.splits);

  gnn::TrainConfig tc;
  tc.epochs = 30;
  tc.seed = 11;
  const Dataset small = data.subset([] {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < 300; i += 5) idx.push_back(i);
    return idx;
  }());
  const auto trained = gnn::train(gnn::GcnModel::initialize(data.feature_dim, 20, 2, 12), small, tc);
  a.loss_histories.push_back(trained.loss_history);
  for (const Graph& g : small.graphs) a.explanations.push_back(explain::geco_explain(trained.model, g));
  return a;
}

Outcome determinism() {
  const RunArtifacts first = one_run();
  const RunArtifacts second = one_run();
  std::vector<std::string> diffs;
  if (first.dataset_json != second.dataset_json) diffs.push_back("dataset");
  if (first.loss_histories != second.loss_histories) diffs.push_back("loss histories");
  if (!(first.explanations == second.explanations)) diffs.push_back("explanations");
  if (first.results_csv != second.results_csv) diffs.push_back("results CSV");
  if (first.splits_csv != second.splits_csv) diffs.push_back("splits CSV");
  std::string detail = "dataset (" + std::to_string(first.dataset_json.size()) + " bytes), " +
                       std::to_string(first.loss_histories.size()) + " loss histories, " +
                       std::to_string(first.explanations.size()) + " explanations, metric CSVs";
  if (diffs.empty()) return {true, detail + " identical across two runs"};
  std::string which;
  for (const auto& d : diffs) which += (which.empty() ? "" : ", ") + d;
  return {false, "differences in: " + which};
}

Outcome properties() {
  constexpr int kCases = 200;
  Rng rng(7007);
  Checker check;

  for (int i = 0; i < kCases; ++i) {
    const Graph g = t::random_graph(rng, 0, 25, 0.2, 4);
    const auto model = gnn::GcnModel::initialize(4, 1 + rng.uniform_index(16), 2 + rng.uniform_index(4), rng.next());
    const auto p = gnn::forward(model, g).probs;
    check.expect((p.array() >= 0.0).all() && std::abs(p.sum() - 1.0) <= 1e-6, "softmax normalization");
  }
  for (int i = 0; i < kCases; ++i) {
    const Graph g = t::random_graph(rng, 1, 25, 0.2, 4);
    const auto model = gnn::GcnModel::initialize(4, 8, 3, rng.next());
    const Graph h = permute_nodes(g, t::random_permutation(rng, g.num_nodes()));
    const auto a = gnn::forward(model, g).probs;
    const auto b = gnn::forward(model, h).probs;
    check.expect((a - b).cwiseAbs().maxCoeff() <= 1e-6 && gnn::predict(model, g).label == gnn::predict(model, h).label,
                 "predict permutation invariance");
  }
  for (int i = 0; i < kCases; ++i) {
    const Graph g = degree_featured(t::random_graph(rng, 1, 25, 0.15, 0));
    const auto model = gnn::GcnModel::initialize(11, 8, 2, rng.next());
    const auto mode = i % 2 ? explain::ThresholdMode::Median : explain::ThresholdMode::Mean;
    check.expect(explain::geco_explain(model, g, mode).mask.count() > 0, "geco non-empty mask");
  }
  for (int i = 0; i < kCases; ++i) {
    const std::size_t n = rng.uniform_index(30);
    const NodeMask a = t::random_mask(rng, n, rng.uniform());
    const NodeMask b = t::random_mask(rng, n, rng.uniform());
    const double j = metrics::jaccard(a, b);
    check.expect(j >= 0.0 && j <= 1.0 && j == metrics::jaccard(b, a), "jaccard bounds/symmetry");
  }
  for (int i = 0; i < kCases; ++i) {
    const std::size_t n = 1 + rng.uniform_index(500);
    const auto s = harness::split(n, 0.05 + 0.9 * rng.uniform(), rng.next());
    std::set<std::size_t> all(s.train.begin(), s.train.end());
    bool disjoint = true;
    for (std::size_t v : s.test) disjoint = all.insert(v).second && disjoint;
    check.expect(disjoint && all.size() == n && (n == 0 || *all.rbegin() == n - 1), "split disjoint/covering");
  }
  return {check.ok(), "5 properties x " + std::to_string(kCases) + " cases" + (check.ok() ? "" : ": " + check.summary())};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "metric oracle equivalence", 5.0, metric_oracles},
      {2, "gradient check", 30.0, gradient_check},
      {3, "community oracle", 60.0, community_oracle},
      {4, "ba_house_cycle desk-scale trend", 15 * 60.0, house_cycle_trend},
      {5, "ba_cycle_wheel_grid desk-scale trend", 20 * 60.0, cycle_wheel_grid_trend},
      {6, "determinism", 0.0, determinism},
      {7, "property suite", 0.0, properties},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = fmt("%.1f s", seconds);
    if (c.budget_seconds > 0.0) {
      timing += fmt(" (budget %.0f s)", c.budget_seconds);
      if (seconds >= c.budget_seconds) {
        out.pass = false;
        out.detail += "; over time budget";
      }
    }
    if (!out.pass) ++failures;
    std::cout << (out.pass ? "[PASS]" : "[FAIL]") << " criterion " << c.id << ": " << c.name << ": " << out.detail
              << " [" << timing << "]" << std::endl;
  }
  std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
