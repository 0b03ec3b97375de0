#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "divsel/common.hpp"

namespace divsel {

// Output of farthest-point sampling. indices[0] is the seed point;
// minmax_trace[t] is the max-min distance achieved when picking point t+1,
// with the seed's entry the +inf sentinel. After the sentinel the trace is
// non-increasing, and its last value bounds the covering radius of the
// selection over the whole dataset.
struct SelectionResult {
  std::vector<int> indices;
  std::vector<double> minmax_trace;
  std::uint64_t seed = 0;
};

double euclidean_distance(std::span<const double> a, std::span<const double> b);

// Greedy max-min selection of n rows: seed uniformly at random, then repeat
// picking the row farthest from its nearest selected row. Ties break to the
// lowest index. O(n * N * d) time, O(N) extra space.
SelectionResult diverse_select(const Matrix& embeddings, int n, std::uint64_t seed);

// Same greedy rule with the seed row given explicitly. recorded_seed is only
// carried into the result for serialization.
SelectionResult diverse_select_from(const Matrix& embeddings, int n, int seed_index,
                                    std::uint64_t recorded_seed = 0);

// Reference implementation for testing: recomputes every candidate's distance
// to the entire selected set at every step. O(n^2 * N * d).
SelectionResult brute_force_diverse_select(const Matrix& embeddings, int n, int seed_index);

// Uniform sample of n indices from [0, n_total) without replacement.
std::vector<int> random_select(int n_total, int n, std::uint64_t seed);

struct KmeansResult {
  Matrix centroids;             // k x d
  std::vector<int> assignment;  // length N, values in [0, k)
};

// Lloyd's algorithm with k-means++ seeding. Empty clusters are re-seeded to
// the point farthest from its current centroid. Cluster ids are canonicalized
// by first occurrence in row order, so equal inputs give equal labelings.
KmeansResult kmeans(const Matrix& embeddings, int k, int max_iters, double tol,
                    std::uint64_t seed);

struct ClusterSelectConfig {
  int k = 1;
  int per_cluster = 1;
  int max_lloyd_iters = 100;
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

struct ClusterSelection {
  std::vector<int> indices;  // concatenated by cluster id, nearest-centroid first
  int shortfall = 0;         // k * per_cluster minus what small clusters could supply
};

// Equal-per-cluster selection: cluster with kmeans, then take from each cluster
// the per_cluster points nearest its centroid. Short clusters contribute all
// their members; the shortfall is reported, not padded.
ClusterSelection cluster_balanced_select(const Matrix& embeddings,
                                         const ClusterSelectConfig& config);

void save_selection_json(const std::filesystem::path& path, const SelectionResult& result);
SelectionResult load_selection_json(const std::filesystem::path& path);

}  // namespace divsel
