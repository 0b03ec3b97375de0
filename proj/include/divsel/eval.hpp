#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "divsel/dataset.hpp"

namespace divsel {

enum class BalanceMode { kAsIs, kClassBalanced };

BalanceMode balance_mode_from_name(std::string_view name);
std::string_view balance_mode_name(BalanceMode mode);

struct EvalSplit {
  std::vector<int> train_indices;
  std::vector<int> test_indices;
  BalanceMode balance_mode = BalanceMode::kAsIs;
};

// Majority label among the k Euclidean-nearest training rows per query.
// Distance ties break to the lowest training index, vote ties to the smallest
// label id. All training rows must be labeled.
std::vector<int> knn_predict(const LabeledDataset& train, const Matrix& query, int k);

double accuracy(const std::vector<int>& predicted, const std::vector<int>& actual);

// Population standard deviation of per-class counts; classes absent from the
// selection count zero.
double class_size_std(const std::vector<int>& labels_of_selected, int num_classes);

// Seeded disjoint train/test split. Under kClassBalanced the test side is
// subsampled to equal per-class counts (num_classes times the smallest raw
// test-side class count); the train side stays the complement of the raw test
// side either way.
EvalSplit make_split(const LabeledDataset& ds, double test_fraction, BalanceMode mode,
                     std::uint64_t seed);

struct CrossoverStep {
  int n_random = 0;
  double accuracy = 0.0;        // mean over seeds
  double class_size_std = 0.0;  // mean over seeds
};

struct CrossoverResult {
  std::optional<double> ratio;  // n_random / n_diverse; nullopt if never reached
  double diverse_accuracy = 0.0;
  double diverse_class_size_std = 0.0;
  std::vector<CrossoverStep> sweep;
};

// How much more randomly selected training data matches diverse selection:
// fixes mean diverse accuracy at n_diverse over seed_count seeds, then grows
// the random selection in 25% steps of n_diverse (capped at the train side)
// until its mean accuracy catches up.
CrossoverResult crossover_ratio(const LabeledDataset& ds, const EvalSplit& split, int n_diverse,
                                int k, int seed_count, std::uint64_t seed);

}  // namespace divsel
