#include "geco/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "geco/rng.hpp"
#include "geco/synthgen.hpp"
#include "json.hpp"

namespace geco::harness {

namespace {

constexpr std::uint64_t kSplitDomain = 0x73706c6974ULL;
constexpr std::string_view kCsvHeader =
    "dataset,method,split_seed,fid_plus,fid_minus,charact,gea,explain_seconds";

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_cell(const metrics::MeanStd& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f ± %.3f", s.mean, s.std);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void log_line(const ExperimentConfig& cfg, const std::string& text) {
  if (cfg.log != nullptr) *cfg.log << text << '\n' << std::flush;
}

}  // namespace

std::string_view to_string(Method method) { return method == Method::Geco ? "geco" : "random"; }

Method method_from_string(std::string_view name) {
  if (name == "geco") return Method::Geco;
  if (name == "random") return Method::Random;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
    throw std::invalid_argument("ExperimentConfig: train_ratio must lie in (0, 1)");
  }
  if (num_splits < 1) throw std::invalid_argument("ExperimentConfig: num_splits must be >= 1");
  if (methods.empty()) throw std::invalid_argument("ExperimentConfig: no methods selected");
  if (hidden_dim && *hidden_dim == 0) throw std::invalid_argument("ExperimentConfig: hidden_dim must be > 0");
  train.validate();
  charact_weights.validate();
}

ExperimentConfig ExperimentConfig::desk_profile() { return ExperimentConfig{}; }

ExperimentConfig ExperimentConfig::full_profile() {
  ExperimentConfig cfg;
  cfg.graphs_per_class = 500;
  cfg.num_splits = 100;
  return cfg;
}

ExperimentConfig config_from_json(std::string_view text, ExperimentConfig cfg) {
  try {
    const auto doc = nlohmann::json::parse(text);
    cfg.dataset = doc.value("dataset", cfg.dataset);
    if (doc.contains("graphs_per_class")) {
      cfg.graphs_per_class = doc["graphs_per_class"].is_null()
                                 ? std::nullopt
                                 : std::optional(doc["graphs_per_class"].get<std::size_t>());
    }
    cfg.num_splits = doc.value("num_splits", cfg.num_splits);
    cfg.train_ratio = doc.value("train_ratio", cfg.train_ratio);
    if (doc.contains("hidden_dim")) cfg.hidden_dim = doc["hidden_dim"].get<std::size_t>();
    cfg.train.epochs = doc.value("epochs", cfg.train.epochs);
    cfg.train.learning_rate = doc.value("learning_rate", cfg.train.learning_rate);
    cfg.train.batch_size = doc.value("batch_size", cfg.train.batch_size);
    if (doc.contains("threshold_mode")) {
      cfg.threshold_mode = explain::threshold_mode_from_string(doc["threshold_mode"].get<std::string>());
    }
    cfg.recompute_degree_features = doc.value("recompute_degree_features", cfg.recompute_degree_features);
    if (doc.contains("methods")) {
      cfg.methods.clear();
      for (const auto& m : doc["methods"]) cfg.methods.push_back(method_from_string(m.get<std::string>()));
    }
    cfg.charact_weights.w_plus = doc.value("w_plus", cfg.charact_weights.w_plus);
    cfg.charact_weights.w_minus = doc.value("w_minus", cfg.charact_weights.w_minus);
    cfg.seed = doc.value("seed", cfg.seed);
    if (doc.contains("output_dir")) cfg.output_dir = doc["output_dir"].get<std::string>();
    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("config JSON: ") + e.what());
  }
}

LoadedDataset load_experiment_dataset(const ExperimentConfig& cfg) {
  if (auto recipe = synth::builtin_recipe(cfg.dataset)) {
    recipe->seed = cfg.seed;
    if (cfg.graphs_per_class) recipe->graphs_per_class = *cfg.graphs_per_class;
    return {synth::build_dataset(*recipe), recipe->name, true};
  }
  const std::filesystem::path path(cfg.dataset);
  if (!std::filesystem::exists(path)) {
    throw std::invalid_argument("dataset '" + cfg.dataset + "' is neither a built-in recipe nor a file");
  }
  const std::string text = read_text_file(path);
  const bool is_dataset = nlohmann::json::parse(text).contains("graphs");
  if (is_dataset) return {dataset_from_json(text), path.stem().string(), false};
  auto recipe = synth::recipe_from_json(text);
  if (cfg.graphs_per_class) recipe.graphs_per_class = *cfg.graphs_per_class;
  return {synth::build_dataset(recipe), recipe.name, true};
}

Split split(std::size_t n, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("split: ratio must lie in (0, 1)");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  Split s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return s;
}

std::uint64_t split_seed(std::uint64_t experiment_seed, std::size_t index) {
  return mix_seed(experiment_seed ^ kSplitDomain, index);
}

metrics::MeanStd ExperimentResults::test_accuracy() const {
  std::vector<double> acc;
  for (const SplitRecord& s : splits) {
    if (!s.diverged) acc.push_back(s.test_accuracy);
  }
  return metrics::mean_std(acc);
}

ExperimentResults run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResults results;
  LoadedDataset loaded = load_experiment_dataset(cfg);
  results.dataset = loaded.name;
  const Dataset& data = loaded.data;
  if (data.graphs.empty()) throw std::invalid_argument("run_experiment: empty dataset");
  for (const Graph& g : data.graphs) {
    if (!g.label()) throw std::invalid_argument("run_experiment: dataset contains unlabeled graphs");
  }
  const std::size_t hidden = cfg.hidden_dim.value_or(loaded.generated ? 20 : 64);

  for (std::size_t s = 0; s < cfg.num_splits; ++s) {
    SplitRecord rec;
    rec.index = s;
    rec.seed = split_seed(cfg.seed, s);
    const Split parts = split(data, cfg.train_ratio, rec.seed);
    {
      std::vector<bool> in_train(data.size(), false);
      for (std::size_t i : parts.train) in_train[i] = true;
      for (std::size_t i : parts.test) {
        if (in_train[i]) throw std::logic_error("run_experiment: test graph leaked into training set");
      }
    }
    const Dataset train_set = data.subset(parts.train);
    const Dataset test_set = data.subset(parts.test);
    rec.test_size = test_set.size();

    gnn::TrainConfig tcfg = cfg.train;
    tcfg.seed = mix_seed(rec.seed, 2);
    gnn::GcnModel fresh =
        gnn::GcnModel::initialize(data.feature_dim, hidden, data.num_classes, mix_seed(rec.seed, 1));
    std::optional<gnn::GcnModel> model;
    try {
      auto trained = gnn::train(std::move(fresh), train_set, tcfg);
      model = std::move(trained.model);
      rec.loss_history = std::move(trained.loss_history);
    } catch (const gnn::TrainingDiverged& e) {
      rec.diverged = true;
      rec.diagnostic = e.what();
      ++results.diverged_splits;
      log_line(cfg, "split " + std::to_string(s) + ": training diverged: " + e.what());
      results.splits.push_back(std::move(rec));
      continue;
    }
    rec.train_accuracy = gnn::accuracy(*model, train_set.graphs);
    rec.test_accuracy = gnn::accuracy(*model, test_set.graphs);

    std::vector<ClassId> labels;
    for (const Graph& g : test_set.graphs) labels.push_back(*g.label());

    for (Method method : cfg.methods) {
      std::vector<NodeMask> masks;
      masks.reserve(test_set.size());
      Rng rng(mix_seed(rec.seed, 3));
      explain::ExplainOptions options;
      options.mode = cfg.threshold_mode;
      options.recompute_degree_features = cfg.recompute_degree_features;
      double seconds = 0.0;
      for (const Graph& g : test_set.graphs) {
        const auto start = std::chrono::steady_clock::now();
        if (method == Method::Geco) {
          explain::Explanation ex = explain::geco_explain(*model, g, options);
          if (ex.fallback_used) ++rec.geco_fallbacks;
          masks.push_back(std::move(ex.mask));
        } else {
          masks.push_back(explain::random_explain(g, rng));
        }
        seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
      const metrics::FidelityReport rep = metrics::evaluate(
          *model, test_set.graphs, labels, masks, test_set.ground_truth, cfg.charact_weights);
      results.rows.push_back({results.dataset, std::string(to_string(method)), rec.seed, rep.fid_plus,
                              rep.fid_minus, rep.charact, rep.gea,
                              seconds / static_cast<double>(test_set.size())});
    }
    char line[160];
    std::snprintf(line, sizeof line, "split %zu: train acc %.3f, test acc %.3f, final loss %.4f",
                  s, rec.train_accuracy, rec.test_accuracy,
                  rec.loss_history.empty() ? 0.0 : rec.loss_history.back());
    log_line(cfg, line);
    results.splits.push_back(std::move(rec));
  }

  if (!cfg.output_dir.empty()) write_outputs(results, cfg.output_dir);
  return results;
}

std::vector<MethodSummary> summarize(const std::vector<ResultRow>& rows) {
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, std::vector<const ResultRow*>> groups;
  for (const ResultRow& r : rows) {
    auto key = std::make_pair(r.dataset, r.method);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) keys.push_back(key);
    it->second.push_back(&r);
  }
  std::vector<MethodSummary> out;
  for (const auto& key : keys) {
    const auto& group = groups[key];
    auto column = [&](double ResultRow::*field) {
      std::vector<double> v;
      for (const ResultRow* r : group) v.push_back(r->*field);
      return metrics::mean_std(v);
    };
    MethodSummary m;
    m.dataset = key.first;
    m.method = key.second;
    m.splits = group.size();
    m.fid_plus = column(&ResultRow::fid_plus);
    m.fid_minus = column(&ResultRow::fid_minus);
    m.charact = column(&ResultRow::charact);
    m.gea = column(&ResultRow::gea);
    m.explain_seconds = column(&ResultRow::explain_seconds);
    out.push_back(std::move(m));
  }
  return out;
}

std::string report(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "| Dataset | Method | Fid+ ↑ | Fid- ↓ | charact ↑ | GEA ↑ |\n";
  out << "|---|---|---|---|---|---|\n";
  for (const MethodSummary& m : summarize(rows)) {
    out << "| " << m.dataset << " | " << m.method << " | " << fmt_cell(m.fid_plus) << " | "
        << fmt_cell(m.fid_minus) << " | " << fmt_cell(m.charact) << " | " << fmt_cell(m.gea)
        << " |\n";
  }
  return out.str();
}

std::string results_to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const ResultRow& r : rows) {
    out << r.dataset << ',' << r.method << ',' << r.split_seed << ',' << fmt_double(r.fid_plus) << ','
        << fmt_double(r.fid_minus) << ',' << fmt_double(r.charact) << ',' << fmt_double(r.gea) << ','
        << fmt_double(r.explain_seconds) << '\n';
  }
  return out.str();
}

std::vector<ResultRow> results_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::invalid_argument("results CSV: missing or unexpected header");
  }
  std::vector<ResultRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 8) {
      throw std::invalid_argument("results CSV: line " + std::to_string(lineno) + " has " +
                                  std::to_string(cells.size()) + " fields");
    }
    try {
      rows.push_back({cells[0], cells[1], std::stoull(cells[2]), std::stod(cells[3]),
                      std::stod(cells[4]), std::stod(cells[5]), std::stod(cells[6]),
                      std::stod(cells[7])});
    } catch (const std::logic_error&) {
      throw std::invalid_argument("results CSV: bad number on line " + std::to_string(lineno));
    }
  }
  return rows;
}

std::string splits_to_csv(const std::vector<SplitRecord>& splits) {
  std::ostringstream out;
  out << "split,split_seed,diverged,train_accuracy,test_accuracy,test_size,geco_fallbacks,final_loss\n";
  for (const SplitRecord& s : splits) {
    out << s.index << ',' << s.seed << ',' << (s.diverged ? 1 : 0) << ','
        << fmt_double(s.train_accuracy) << ',' << fmt_double(s.test_accuracy) << ',' << s.test_size
        << ',' << s.geco_fallbacks << ','
        << fmt_double(s.loss_history.empty() ? 0.0 : s.loss_history.back()) << '\n';
  }
  return out.str();
}

void write_outputs(const ExperimentResults& results, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "results.csv", results_to_csv(results.rows));
  write_text_file(dir / "splits.csv", splits_to_csv(results.splits));
  std::ostringstream summary;
  summary << report(results.rows);
  const auto acc = results.test_accuracy();
  char line[128];
  std::snprintf(line, sizeof line, "\nTest accuracy: %.3f ± %.3f over %zu splits (%zu diverged)\n",
                acc.mean, acc.std, results.splits.size() - results.diverged_splits,
                results.diverged_splits);
  summary << line;
  write_text_file(dir / "summary.md", summary.str());
}

}  // namespace geco::harness
