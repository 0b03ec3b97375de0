#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "divsel/dataset.hpp"
#include "divsel/embedder.hpp"
#include "divsel/selection.hpp"

namespace divsel {

enum class Strategy { kDiverse, kRandom, kClusterBalanced };

Strategy strategy_from_name(std::string_view name);
std::string_view strategy_name(Strategy s);

struct EmbedderSpec {
  std::vector<int> layer_dims;
  Activation activation = Activation::kTanh;
};

struct PipelineConfig {
  int iterations = 1;
  int n_select = 1;
  Strategy strategy = Strategy::kDiverse;
  ClusterSelectConfig cluster;             // consulted for kClusterBalanced only
  std::optional<EmbedderSpec> embedder;    // nullopt: identity embedder (raw features)
  TrainConfig train;
  enum class InitialTrain { kFullDataset, kRandomSubset } initial_train_on = InitialTrain::kFullDataset;
  int initial_subset_n = 0;                // for kRandomSubset
  int eval_knn_k = 5;
  bool standardize = true;                 // z-score embedder inputs per feature
  std::uint64_t seed = 0;
};

struct IterationReport {
  int iteration = 0;
  std::vector<int> selected_indices;
  double train_accuracy_on_test = 0.0;
  double class_size_std = 0.0;
  LossTrace loss_trace;
  int shortfall = 0;
  double wall_time_seconds = 0.0;  // informational; kept out of serialized reports
};

// Iterative balancing loop: train embedder, embed everything, select a subset,
// evaluate it with k-NN on the test set, then retrain the embedder from
// scratch on that subset for the next round. Fully deterministic given config;
// all per-iteration randomness is sub-seeded from config.seed.
std::vector<IterationReport> run_pipeline(const LabeledDataset& dataset,
                                          const LabeledDataset& test_set,
                                          const PipelineConfig& config);

// Collision-resistant mix of (master seed, iteration, purpose tag).
std::uint64_t derive_subseed(std::uint64_t master_seed, std::uint64_t iteration,
                             std::string_view purpose_tag);

void write_reports_jsonl(const std::filesystem::path& path,
                         const std::vector<IterationReport>& reports);
std::vector<IterationReport> read_reports_jsonl(const std::filesystem::path& path);

// strategy,seed,iteration,accuracy,class_size_std
void write_summary_csv(const std::filesystem::path& path, std::string_view strategy,
                       std::uint64_t seed, const std::vector<IterationReport>& reports);

}  // namespace divsel
