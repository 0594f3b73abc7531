// geco: command-line front end for dataset generation, training, explanation
// and the experiment harness.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "geco/community.hpp"
#include "geco/dataset.hpp"
#include "geco/explain.hpp"
#include "geco/gcn.hpp"
#include "geco/harness.hpp"
#include "geco/metrics.hpp"
#include "geco/synthgen.hpp"

namespace fs = std::filesystem;
using namespace geco;

namespace {

constexpr const char* kOutputEnv = "GECO_OUTPUT_DIR";

fs::path default_output_dir() {
  const char* env = std::getenv(kOutputEnv);
  return env != nullptr && *env != '\0' ? fs::path(env) : fs::path("geco_out");
}

fs::path resolve_out(const std::string& given, const char* fallback_name) {
  return given.empty() ? default_output_dir() / fallback_name : fs::path(given);
}

const Graph& graph_at(const Dataset& data, std::size_t index) {
  if (index >= data.size()) {
    throw std::invalid_argument("graph index " + std::to_string(index) + " out of range (dataset has " +
                                std::to_string(data.size()) + " graphs)");
  }
  return data.graphs[index];
}

std::string join(const std::vector<NodeId>& v) {
  std::string s;
  for (NodeId x : v) s += (s.empty() ? "" : " ") + std::to_string(x);
  return s;
}

struct GenerateArgs {
  std::string recipe = "ba_house_cycle";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> graphs_per_class;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  synth::DatasetRecipe recipe;
  if (auto builtin = synth::builtin_recipe(a.recipe)) {
    recipe = *builtin;
  } else {
    recipe = synth::recipe_from_json(read_text_file(a.recipe));
  }
  if (a.seed) recipe.seed = *a.seed;
  if (a.graphs_per_class) recipe.graphs_per_class = *a.graphs_per_class;
  const Dataset data = synth::build_dataset(recipe);
  const fs::path out = resolve_out(a.out, "dataset.json");
  save_dataset(data, out);
  std::cout << "wrote " << data.size() << " graphs (" << data.num_classes << " classes) to " << out.string() << '\n';
  return 0;
}

struct TrainArgs {
  std::string data;
  std::size_t hidden = 20;
  gnn::TrainConfig cfg;
  std::uint64_t init_seed = 0;
  std::string out;
  std::string loss_out;
};

int cmd_train(const TrainArgs& a) {
  const Dataset data = load_dataset(a.data);
  const auto init = gnn::GcnModel::initialize(data.feature_dim, a.hidden, data.num_classes, a.init_seed);
  const auto result = gnn::train(init, data, a.cfg);
  const fs::path out = resolve_out(a.out, "model.json");
  save_model(result.model, out);
  if (!a.loss_out.empty()) {
    std::ostringstream csv;
    csv << "epoch,loss\n";
    csv.precision(17);
    for (std::size_t e = 0; e < result.loss_history.size(); ++e) csv << e << ',' << result.loss_history[e] << '\n';
    write_text_file(a.loss_out, csv.str());
  }
  std::cout << "final loss " << result.loss_history.back() << ", training accuracy "
            << gnn::accuracy(result.model, data.graphs) << "\nwrote " << out.string() << '\n';
  return 0;
}

int cmd_communities(const std::string& data_path, std::size_t index) {
  const Dataset data = load_dataset(data_path);
  const Graph& g = graph_at(data, index);
  const auto r = community::greedy_modularity(g);
  std::cout << "modularity " << r.modularity << '\n';
  const auto members = r.partition.members();
  for (std::size_t c = 0; c < members.size(); ++c) std::cout << "community " << c << ": " << join(members[c]) << '\n';
  return 0;
}

struct ExplainArgs {
  std::string model;
  std::string data;
  std::size_t index = 0;
  std::string mode = "mean";
  bool recompute = false;
  std::string dot;
};

int cmd_explain(const ExplainArgs& a) {
  const auto model = gnn::load_model(a.model);
  const Dataset data = load_dataset(a.data);
  const Graph& g = graph_at(data, a.index);
  explain::ExplainOptions options;
  options.mode = explain::threshold_mode_from_string(a.mode);
  options.recompute_degree_features = a.recompute;
  const auto e = explain::geco_explain(model, g, options);
  std::cout << "predicted class " << e.predicted_class;
  if (g.label()) std::cout << " (true " << *g.label() << ")";
  std::cout << "\ntau " << e.tau << '\n';
  const auto members = e.partition.members();
  for (std::size_t c = 0; c < members.size(); ++c) {
    const bool kept = std::find(e.selected_communities.begin(), e.selected_communities.end(), c) !=
                      e.selected_communities.end();
    std::cout << (kept ? "* " : "  ") << "community " << c << " p=" << e.community_probs[c] << ": "
              << join(members[c]) << '\n';
  }
  if (e.fallback_used) std::cout << "no community above tau; kept the best one\n";
  std::cout << "explanation: " << join(e.mask.indices()) << '\n';
  if (!data.ground_truth[a.index].empty()) {
    std::cout << "GEA " << metrics::gea(data.ground_truth[a.index], e.mask) << '\n';
  }
  if (!a.dot.empty()) {
    write_text_file(a.dot, explain::to_dot(g, e.mask));
    std::cout << "wrote " << a.dot << '\n';
  }
  return 0;
}

struct EvaluateArgs {
  std::string model;
  std::string data;
  std::string method = "geco";
  std::string mode = "mean";
  std::uint64_t seed = 0;
  double w_plus = 0.5;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const auto model = gnn::load_model(a.model);
  const Dataset data = load_dataset(a.data);
  std::vector<ClassId> labels;
  for (const Graph& g : data.graphs) {
    if (!g.label()) throw std::invalid_argument("evaluate: dataset contains unlabeled graphs");
    labels.push_back(*g.label());
  }
  const harness::Method method = harness::method_from_string(a.method);
  const auto mode = explain::threshold_mode_from_string(a.mode);
  Rng rng(a.seed);
  std::vector<NodeMask> masks;
  for (const Graph& g : data.graphs) {
    masks.push_back(method == harness::Method::Geco ? explain::geco_explain(model, g, mode).mask
                                                    : explain::random_explain(g, rng));
  }
  const auto r = metrics::evaluate(model, data.graphs, labels, masks, data.ground_truth, {a.w_plus, 1.0 - a.w_plus});
  std::cout << "graphs " << r.n << "\naccuracy " << gnn::accuracy(model, data.graphs) << "\nfid_plus " << r.fid_plus
            << "\nfid_minus " << r.fid_minus << "\ncharact " << r.charact << "\ngea " << r.gea << '\n';
  return 0;
}

struct RunArgs {
  std::string config;
  bool full = false;
  std::optional<std::string> dataset;
  std::optional<std::size_t> graphs_per_class;
  std::optional<std::size_t> splits;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> hidden;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  bool recompute = false;
  std::string out;
};

int cmd_run(const RunArgs& a) {
  harness::ExperimentConfig cfg =
      a.full ? harness::ExperimentConfig::full_profile() : harness::ExperimentConfig::desk_profile();
  if (!a.config.empty()) cfg = harness::config_from_json(read_text_file(a.config), cfg);
  if (a.dataset) cfg.dataset = *a.dataset;
  if (a.graphs_per_class) cfg.graphs_per_class = *a.graphs_per_class;
  if (a.splits) cfg.num_splits = *a.splits;
  if (a.epochs) cfg.train.epochs = *a.epochs;
  if (a.hidden) cfg.hidden_dim = *a.hidden;
  if (a.mode) cfg.threshold_mode = explain::threshold_mode_from_string(*a.mode);
  if (a.seed) cfg.seed = *a.seed;
  if (a.recompute) cfg.recompute_degree_features = true;
  if (!a.out.empty()) {
    cfg.output_dir = a.out;
  } else if (cfg.output_dir.empty()) {
    cfg.output_dir = default_output_dir();
  }
  cfg.log = &std::cerr;
  const auto results = harness::run_experiment(cfg);
  const auto acc = results.test_accuracy();
  std::cout << harness::report(results.rows) << "\ntest accuracy " << acc.mean << " ± " << acc.std;
  if (results.diverged_splits > 0) std::cout << "; " << results.diverged_splits << " splits diverged";
  std::cout << "\nresults in " << cfg.output_dir.string() << '\n';
  return 0;
}

int cmd_report(const std::string& results_path, const std::string& out) {
  const auto rows = harness::results_from_csv(read_text_file(results_path));
  const std::string md = harness::report(rows);
  if (out.empty()) {
    std::cout << md;
  } else {
    write_text_file(out, md);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Community-based GNN explanations on synthetic motif datasets"};
  app.require_subcommand(1);
  app.footer(std::string("Outputs default to $") + kOutputEnv + " (or ./geco_out when unset).");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Build a synthetic dataset from a recipe");
  generate->add_option("--recipe", gen.recipe, "Built-in recipe name or recipe JSON file")->capture_default_str();
  generate->add_option("--seed", gen.seed, "Override the recipe seed");
  generate->add_option("--graphs-per-class", gen.graphs_per_class, "Override graphs per class");
  generate->add_option("--out", gen.out, "Dataset JSON path");

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Train a GCN classifier on a dataset");
  train->add_option("--data", tr.data, "Dataset JSON")->required();
  train->add_option("--hidden", tr.hidden, "Hidden width")->capture_default_str();
  train->add_option("--epochs", tr.cfg.epochs, "Epochs")->capture_default_str();
  train->add_option("--lr", tr.cfg.learning_rate, "Adam learning rate")->capture_default_str();
  train->add_option("--batch", tr.cfg.batch_size, "Minibatch size")->capture_default_str();
  train->add_option("--seed", tr.cfg.seed, "Shuffle seed")->capture_default_str();
  train->add_option("--init-seed", tr.init_seed, "Weight initialization seed")->capture_default_str();
  train->add_option("--out", tr.out, "Model checkpoint path");
  train->add_option("--loss-out", tr.loss_out, "Write the per-epoch loss as CSV");

  std::string comm_data;
  std::size_t comm_index = 0;
  auto* communities = app.add_subcommand("communities", "Greedy modularity communities of one graph");
  communities->add_option("--data", comm_data, "Dataset JSON")->required();
  communities->add_option("--index", comm_index, "Graph index")->capture_default_str();

  ExplainArgs ex;
  auto* explain_cmd = app.add_subcommand("explain", "Explain one graph's prediction");
  explain_cmd->add_option("--model", ex.model, "Model checkpoint")->required();
  explain_cmd->add_option("--data", ex.data, "Dataset JSON")->required();
  explain_cmd->add_option("--index", ex.index, "Graph index")->capture_default_str();
  explain_cmd->add_option("--mode", ex.mode, "Threshold: mean or median")->capture_default_str();
  explain_cmd->add_flag("--recompute-degree", ex.recompute, "Re-encode degree features on each community");
  explain_cmd->add_option("--dot", ex.dot, "Write a Graphviz file with the explanation highlighted");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score explanations of every graph in a dataset");
  evaluate->add_option("--model", ev.model, "Model checkpoint")->required();
  evaluate->add_option("--data", ev.data, "Dataset JSON")->required();
  evaluate->add_option("--method", ev.method, "geco or random")->capture_default_str();
  evaluate->add_option("--mode", ev.mode, "Threshold: mean or median")->capture_default_str();
  evaluate->add_option("--seed", ev.seed, "Seed of the random baseline")->capture_default_str();
  evaluate->add_option("--w-plus", ev.w_plus, "Weight of Fid+ in charact")->capture_default_str();

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Full experiment: repeated splits, training, explanation, scoring");
  run_cmd->add_option("--config", run.config, "Experiment config JSON");
  run_cmd->add_flag("--full", run.full, "Start from the full profile (500 graphs/class, 100 splits)");
  run_cmd->add_option("--dataset", run.dataset, "Recipe name, recipe JSON or dataset JSON");
  run_cmd->add_option("--graphs-per-class", run.graphs_per_class, "Graphs per class for recipes");
  run_cmd->add_option("--splits", run.splits, "Number of random splits");
  run_cmd->add_option("--epochs", run.epochs, "Training epochs");
  run_cmd->add_option("--hidden", run.hidden, "Hidden width");
  run_cmd->add_option("--mode", run.mode, "Threshold: mean or median");
  run_cmd->add_option("--seed", run.seed, "Experiment seed");
  run_cmd->add_flag("--recompute-degree", run.recompute, "Re-encode degree features on each community");
  run_cmd->add_option("--out", run.out, "Output directory");

  std::string report_in;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Render a results CSV as a Markdown table");
  report->add_option("--results", report_in, "results.csv from a run")->required();
  report->add_option("--out", report_out, "Write Markdown here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) return cmd_generate(gen);
    if (*train) return cmd_train(tr);
    if (*communities) return cmd_communities(comm_data, comm_index);
    if (*explain_cmd) return cmd_explain(ex);
    if (*evaluate) return cmd_evaluate(ev);
    if (*run_cmd) return cmd_run(run);
    if (*report) return cmd_report(report_in, report_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
