#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "geco/dataset.hpp"
#include "geco/explain.hpp"
#include "geco/gcn.hpp"
#include "geco/metrics.hpp"

namespace geco::harness {

enum class Method { Geco, Random };

std::string_view to_string(Method method);
Method method_from_string(std::string_view name);

struct ExperimentConfig {
  /// Built-in recipe name, or a path to a dataset JSON or a recipe JSON.
  std::string dataset = "ba_house_cycle";
  /// Overrides the recipe's graphs_per_class; ignored for dataset files.
  std::optional<std::size_t> graphs_per_class = 150;
  std::size_t num_splits = 10;
  double train_ratio = 0.8;
  /// 20 for generated datasets and 64 for dataset files when unset.
  std::optional<std::size_t> hidden_dim;
  gnn::TrainConfig train;
  explain::ThresholdMode threshold_mode = explain::ThresholdMode::Mean;
  bool recompute_degree_features = false;
  std::vector<Method> methods{Method::Geco, Method::Random};
  metrics::CharactWeights charact_weights;
  std::uint64_t seed = 0;
  /// Where results.csv, splits.csv and summary.md go; nothing is written when empty.
  std::filesystem::path output_dir;
  /// Progress lines go here when set.
  std::ostream* log = nullptr;

  void validate() const;

  /// Small enough for CI: 150 graphs per class, 10 splits, 100 epochs.
  static ExperimentConfig desk_profile();
  /// 500 graphs per class and 100 splits.
  static ExperimentConfig full_profile();
};

/// Reads a config JSON whose keys mirror ExperimentConfig (missing keys keep defaults).
ExperimentConfig config_from_json(std::string_view text, ExperimentConfig base = {});

struct LoadedDataset {
  Dataset data;
  std::string name;
  /// True when built from a recipe rather than read from a dataset file.
  bool generated = false;
};

/// Resolves cfg.dataset to a concrete dataset.
LoadedDataset load_experiment_dataset(const ExperimentConfig& cfg);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded shuffle of 0..n-1, first round(ratio * n) indices train, the rest test.
Split split(std::size_t n, double ratio, std::uint64_t seed);
inline Split split(const Dataset& data, double ratio, std::uint64_t seed) {
  return split(data.size(), ratio, seed);
}

/// Seed of split `index`, derived from the experiment seed.
std::uint64_t split_seed(std::uint64_t experiment_seed, std::size_t index);

/// One CSV row: one method on one split.
struct ResultRow {
  std::string dataset;
  std::string method;
  std::uint64_t split_seed = 0;
  double fid_plus = 0.0;
  double fid_minus = 0.0;
  double charact = 0.0;
  double gea = 0.0;
  double explain_seconds = 0.0;
};

struct SplitRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool diverged = false;
  std::string diagnostic;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::size_t test_size = 0;
  std::size_t geco_fallbacks = 0;
  std::vector<double> loss_history;
};

struct MethodSummary {
  std::string dataset;
  std::string method;
  std::size_t splits = 0;
  metrics::MeanStd fid_plus;
  metrics::MeanStd fid_minus;
  metrics::MeanStd charact;
  metrics::MeanStd gea;
  metrics::MeanStd explain_seconds;
};

struct ExperimentResults {
  std::string dataset;
  std::vector<ResultRow> rows;
  std::vector<SplitRecord> splits;
  std::size_t diverged_splits = 0;

  /// Test accuracy over the splits that trained successfully.
  metrics::MeanStd test_accuracy() const;
};

/// Runs the full protocol: for every split, train a fresh model on the train
/// part, explain every test graph with each method, and score the masks.
/// A split whose training diverges is logged, counted and skipped.
ExperimentResults run_experiment(const ExperimentConfig& cfg);

/// Mean and sample std per (dataset, method), in first-appearance order.
std::vector<MethodSummary> summarize(const std::vector<ResultRow>& rows);

/// Markdown table: Dataset | Method | Fid+ | Fid- | charact | GEA, cells "mean ± std".
std::string report(const std::vector<ResultRow>& rows);

// CSV header: dataset,method,split_seed,fid_plus,fid_minus,charact,gea,explain_seconds
std::string results_to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> results_from_csv(std::string_view text);
std::string splits_to_csv(const std::vector<SplitRecord>& splits);

/// Writes results.csv, splits.csv and summary.md into `dir`.
void write_outputs(const ExperimentResults& results, const std::filesystem::path& dir);

}  // namespace geco::harness
