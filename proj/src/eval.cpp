#include "divsel/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "divsel/parallel.hpp"
#include "divsel/pipeline.hpp"
#include "divsel/rng.hpp"
#include "divsel/selection.hpp"

namespace divsel {

namespace {
constexpr std::uint64_t kSplitStream = 0x65762D73706C6901ull;
}

BalanceMode balance_mode_from_name(std::string_view name) {
  if (name == "as-is" || name == "as_is") return BalanceMode::kAsIs;
  if (name == "class-balanced" || name == "class_balanced") return BalanceMode::kClassBalanced;
  throw ConfigError("unknown balance mode '" + std::string(name) + "'");
}

std::string_view balance_mode_name(BalanceMode mode) {
  return mode == BalanceMode::kAsIs ? "as-is" : "class-balanced";
}

std::vector<int> knn_predict(const LabeledDataset& train, const Matrix& query, int k) {
  if (train.rows() == 0) throw ConfigError("knn_predict needs a nonempty training set");
  if (k < 1) throw ConfigError("k must be >= 1 (got " + std::to_string(k) + ")");
  if (k > train.rows())
    throw ConfigError("k (" + std::to_string(k) + ") exceeds training size (" +
                      std::to_string(train.rows()) + ")");
  if (!train.fully_labeled()) throw ConfigError("knn_predict training rows must all be labeled");
  if (query.cols() != train.dim())
    throw ShapeError("query has " + std::to_string(query.cols()) + " columns, training data has " +
                     std::to_string(train.dim()));

  const auto n_train = train.rows();
  std::vector<int> predictions(query.rows());
  parallel_for(static_cast<std::size_t>(query.rows()), [&](std::size_t q) {
    std::vector<std::pair<double, int>> dist(n_train);
    const auto query_row = row_span(query, static_cast<Eigen::Index>(q));
    for (Eigen::Index i = 0; i < n_train; ++i)
      dist[i] = {euclidean_distance(query_row, row_span(train.features, i)), static_cast<int>(i)};
    std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());

    int max_label = 0;
    for (int i = 0; i < k; ++i) max_label = std::max(max_label, *train.labels[dist[i].second]);
    std::vector<int> votes(max_label + 1, 0);
    for (int i = 0; i < k; ++i) ++votes[*train.labels[dist[i].second]];
    int best = 0;
    for (int l = 1; l <= max_label; ++l)
      if (votes[l] > votes[best]) best = l;  // ties keep the smaller label
    predictions[q] = best;
  });
  return predictions;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& actual) {
  if (predicted.size() != actual.size())
    throw ConfigError("accuracy lengths differ: " + std::to_string(predicted.size()) + " vs " +
                      std::to_string(actual.size()));
  if (predicted.empty()) throw ConfigError("accuracy of empty label lists");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    if (predicted[i] == actual[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

double class_size_std(const std::vector<int>& labels_of_selected, int num_classes) {
  if (num_classes < 1) throw ConfigError("num_classes must be >= 1");
  std::vector<double> counts(num_classes, 0.0);
  for (int l : labels_of_selected) {
    if (l < 0 || l >= num_classes)
      throw ConfigError("label " + std::to_string(l) + " outside [0, " +
                        std::to_string(num_classes) + ")");
    counts[l] += 1.0;
  }
  const double mean =
      std::accumulate(counts.begin(), counts.end(), 0.0) / static_cast<double>(num_classes);
  double var = 0.0;
  for (double c : counts) var += (c - mean) * (c - mean);
  return std::sqrt(var / static_cast<double>(num_classes));
}

EvalSplit make_split(const LabeledDataset& ds, double test_fraction, BalanceMode mode,
                     std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ConfigError("test_fraction must be in (0, 1) (got " + std::to_string(test_fraction) + ")");
  const auto n = ds.rows();
  const auto n_test = static_cast<Eigen::Index>(test_fraction * static_cast<double>(n));
  if (n_test < 1 || n_test >= n)
    throw ConfigError("test_fraction " + std::to_string(test_fraction) +
                      " leaves an empty split side for " + std::to_string(n) + " records");

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  auto g = rng::stream(seed ^ kSplitStream, static_cast<std::uint64_t>(n), 0);
  for (Eigen::Index i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[g.next_below(static_cast<std::uint64_t>(i) + 1)]);

  EvalSplit split;
  split.balance_mode = mode;
  std::vector<int> test_raw(perm.begin(), perm.begin() + n_test);
  split.train_indices.assign(perm.begin() + n_test, perm.end());
  std::sort(split.train_indices.begin(), split.train_indices.end());

  for (int i : test_raw)
    if (!ds.labels[i])
      throw ConfigError("test record " + std::to_string(i) + " has no label");

  if (mode == BalanceMode::kAsIs) {
    split.test_indices = std::move(test_raw);
    std::sort(split.test_indices.begin(), split.test_indices.end());
    return split;
  }

  const int num_classes = ds.num_classes();
  std::vector<int> counts(num_classes, 0);
  for (int i : test_raw) ++counts[*ds.labels[i]];
  const int min_count = *std::min_element(counts.begin(), counts.end());
  if (min_count == 0)
    throw ConfigError("class-balanced split: a class has no members on the test side");
  // first min_count per class in permutation order
  std::vector<int> taken(num_classes, 0);
  for (int i : test_raw) {
    const int label = *ds.labels[i];
    if (taken[label] < min_count) {
      ++taken[label];
      split.test_indices.push_back(i);
    }
  }
  std::sort(split.test_indices.begin(), split.test_indices.end());
  return split;
}

CrossoverResult crossover_ratio(const LabeledDataset& ds, const EvalSplit& split, int n_diverse,
                                int k, int seed_count, std::uint64_t seed) {
  const int train_size = static_cast<int>(split.train_indices.size());
  if (n_diverse < 1 || n_diverse > train_size)
    throw ConfigError("n_diverse (" + std::to_string(n_diverse) +
                      ") must be in [1, train side size " + std::to_string(train_size) + "]");
  if (seed_count < 1) throw ConfigError("seed_count must be >= 1");

  const LabeledDataset train_side = subset(ds, split.train_indices);
  const LabeledDataset test_side = subset(ds, split.test_indices);
  const std::vector<int> test_labels = test_side.labels_at([&] {
    std::vector<int> all(test_side.rows());
    std::iota(all.begin(), all.end(), 0);
    return all;
  }());

  const int num_classes = ds.num_classes();
  // returns (accuracy, class_size_std) of the chosen train-side subset
  auto eval_subset = [&](const std::vector<int>& chosen) {
    const LabeledDataset sub = subset(train_side, chosen);
    const double acc =
        accuracy(knn_predict(sub, test_side.features, std::min<int>(k, sub.rows())), test_labels);
    return std::pair{acc, class_size_std(train_side.labels_at(chosen), num_classes)};
  };

  CrossoverResult result;
  double diverse_sum = 0.0, diverse_std_sum = 0.0;
  for (int s = 0; s < seed_count; ++s) {
    const auto sel = diverse_select(train_side.features, n_diverse,
                                    derive_subseed(seed, s, "crossover-diverse"));
    const auto [acc, std_dev] = eval_subset(sel.indices);
    diverse_sum += acc;
    diverse_std_sum += std_dev;
  }
  result.diverse_accuracy = diverse_sum / seed_count;
  result.diverse_class_size_std = diverse_std_sum / seed_count;

  for (int step = 0;; ++step) {
    int n_random = n_diverse + (step * n_diverse) / 4;  // 25% increments
    const bool at_cap = n_random >= train_size;
    if (at_cap) n_random = train_size;
    double random_sum = 0.0, random_std_sum = 0.0;
    for (int s = 0; s < seed_count; ++s) {
      const auto sel =
          random_select(train_size, n_random, derive_subseed(seed, s, "crossover-random"));
      const auto [acc, std_dev] = eval_subset(sel);
      random_sum += acc;
      random_std_sum += std_dev;
    }
    const double mean_random = random_sum / seed_count;
    result.sweep.push_back({n_random, mean_random, random_std_sum / seed_count});
    if (mean_random >= result.diverse_accuracy) {
      result.ratio = static_cast<double>(n_random) / static_cast<double>(n_diverse);
      return result;
    }
    if (at_cap) return result;  // ratio stays nullopt: not reached
  }
}

}  // namespace divsel
