#include "divsel/selection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>

#include <json.hpp>

#include "divsel/parallel.hpp"
#include "divsel/rng.hpp"

namespace divsel {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kSelectStream = 0x6469767365656401ull;
constexpr std::uint64_t kRandomStream = 0x726E6473656C6501ull;
constexpr std::uint64_t kKmeansStream = 0x6B6D65616E730001ull;

void check_selection_args(const Matrix& embeddings, int n) {
  if (n < 1) throw ConfigError("selection size n must be >= 1 (got " + std::to_string(n) + ")");
  if (n > embeddings.rows())
    throw ConfigError("selection size n (" + std::to_string(n) + ") exceeds row count (" +
                      std::to_string(embeddings.rows()) + ")");
}
}  // namespace

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw ShapeError("vector lengths differ: " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

SelectionResult diverse_select(const Matrix& embeddings, int n, std::uint64_t seed) {
  check_selection_args(embeddings, n);
  auto g = rng::stream(seed ^ kSelectStream, 0, 0);
  const int seed_index =
      static_cast<int>(g.next_below(static_cast<std::uint64_t>(embeddings.rows())));
  return diverse_select_from(embeddings, n, seed_index, seed);
}

SelectionResult diverse_select_from(const Matrix& embeddings, int n, int seed_index,
                                    std::uint64_t recorded_seed) {
  check_selection_args(embeddings, n);
  const auto rows = embeddings.rows();
  if (seed_index < 0 || seed_index >= rows)
    throw ConfigError("seed_index " + std::to_string(seed_index) + " out of range");

  SelectionResult result;
  result.seed = recorded_seed;
  result.indices.reserve(n);
  result.minmax_trace.reserve(n);
  result.indices.push_back(seed_index);
  result.minmax_trace.push_back(kInf);

  std::vector<char> selected(rows, 0);
  selected[seed_index] = 1;
  // distance to the nearest selected row; +inf until first update
  std::vector<double> min_dist(rows, kInf);

  for (int t = 1; t < n; ++t) {
    const int last = result.indices.back();
    const auto last_row = row_span(embeddings, last);
    // each slot is independent, so chunking never changes the result
    parallel_for(static_cast<std::size_t>(rows), [&](std::size_t i) {
      if (selected[i]) return;
      const double d = euclidean_distance(row_span(embeddings, static_cast<Eigen::Index>(i)), last_row);
      if (d < min_dist[i]) min_dist[i] = d;
    });

    int best = -1;
    double best_dist = -kInf;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (selected[i]) continue;
      if (min_dist[i] > best_dist) {
        best_dist = min_dist[i];
        best = static_cast<int>(i);
      }
    }
    result.indices.push_back(best);
    result.minmax_trace.push_back(best_dist);
    selected[best] = 1;
  }
  return result;
}

SelectionResult brute_force_diverse_select(const Matrix& embeddings, int n, int seed_index) {
  check_selection_args(embeddings, n);
  const auto rows = embeddings.rows();
  if (seed_index < 0 || seed_index >= rows)
    throw ConfigError("seed_index " + std::to_string(seed_index) + " out of range");

  SelectionResult result;
  result.indices.push_back(seed_index);
  result.minmax_trace.push_back(kInf);
  std::vector<char> selected(rows, 0);
  selected[seed_index] = 1;

  for (int t = 1; t < n; ++t) {
    int best = -1;
    double best_dist = -kInf;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (selected[i]) continue;
      double nearest = kInf;
      for (int s : result.indices) {
        const double d = euclidean_distance(row_span(embeddings, i), row_span(embeddings, s));
        if (d < nearest) nearest = d;
      }
      if (nearest > best_dist) {
        best_dist = nearest;
        best = static_cast<int>(i);
      }
    }
    result.indices.push_back(best);
    result.minmax_trace.push_back(best_dist);
    selected[best] = 1;
  }
  return result;
}

std::vector<int> random_select(int n_total, int n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("selection size n must be >= 1 (got " + std::to_string(n) + ")");
  if (n > n_total)
    throw ConfigError("selection size n (" + std::to_string(n) + ") exceeds population (" +
                      std::to_string(n_total) + ")");
  std::vector<int> pool(n_total);
  std::iota(pool.begin(), pool.end(), 0);
  auto g = rng::stream(seed ^ kRandomStream, 0, 0);
  for (int i = 0; i < n; ++i) {
    const auto j = i + static_cast<int>(g.next_below(static_cast<std::uint64_t>(n_total - i)));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  return pool;
}

KmeansResult kmeans(const Matrix& embeddings, int k, int max_iters, double tol,
                    std::uint64_t seed) {
  const auto rows = embeddings.rows();
  if (k < 1) throw ConfigError("k must be >= 1 (got " + std::to_string(k) + ")");
  if (k > rows)
    throw ConfigError("k (" + std::to_string(k) + ") exceeds row count (" + std::to_string(rows) + ")");
  if (max_iters < 1) throw ConfigError("max_lloyd_iters must be >= 1");
  if (tol < 0.0) throw ConfigError("tol must be >= 0");

  auto g = rng::stream(seed ^ kKmeansStream, static_cast<std::uint64_t>(k), 0);
  Matrix centroids(k, embeddings.cols());
  std::vector<double> d2(rows, kInf);
  std::vector<char> is_center(rows, 0);

  // k-means++ seeding
  {
    const int first = static_cast<int>(g.next_below(static_cast<std::uint64_t>(rows)));
    centroids.row(0) = embeddings.row(first);
    is_center[first] = 1;
    for (int c = 1; c < k; ++c) {
      double sum = 0.0;
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double d = euclidean_distance(row_span(embeddings, i),
                                            {centroids.data() + (c - 1) * centroids.cols(),
                                             static_cast<std::size_t>(centroids.cols())});
        if (d * d < d2[i]) d2[i] = d * d;
        sum += d2[i];
      }
      int chosen = -1;
      if (sum > 0.0) {
        const double target = g.next_double() * sum;
        double acc = 0.0;
        for (Eigen::Index i = 0; i < rows; ++i) {
          acc += d2[i];
          if (acc > target) {
            chosen = static_cast<int>(i);
            break;
          }
        }
        if (chosen < 0) chosen = static_cast<int>(rows - 1);
      } else {
        // all remaining mass zero (duplicate-heavy data): lowest unused row
        for (Eigen::Index i = 0; i < rows; ++i)
          if (!is_center[i]) {
            chosen = static_cast<int>(i);
            break;
          }
        if (chosen < 0) chosen = 0;
      }
      centroids.row(c) = embeddings.row(chosen);
      is_center[chosen] = 1;
    }
  }

  std::vector<int> assignment(rows, 0);
  std::vector<double> assigned_dist(rows, 0.0);
  for (int iter = 0; iter < max_iters; ++iter) {
    parallel_for(static_cast<std::size_t>(rows), [&](std::size_t i) {
      int best = 0;
      double best_d = kInf;
      for (int c = 0; c < k; ++c) {
        const double d = euclidean_distance(
            row_span(embeddings, static_cast<Eigen::Index>(i)),
            {centroids.data() + c * centroids.cols(), static_cast<std::size_t>(centroids.cols())});
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      assignment[i] = best;
      assigned_dist[i] = best_d;
    });

    Matrix sums = Matrix::Zero(k, embeddings.cols());
    std::vector<int> counts(k, 0);
    for (Eigen::Index i = 0; i < rows; ++i) {
      sums.row(assignment[i]) += embeddings.row(i);
      ++counts[assignment[i]];
    }
    // re-seed empty clusters to the point farthest from its current centroid
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      int farthest = -1;
      double far_d = -kInf;
      for (Eigen::Index i = 0; i < rows; ++i) {
        if (counts[assignment[i]] <= 1) continue;  // keep donor clusters nonempty
        if (assigned_dist[i] > far_d) {
          far_d = assigned_dist[i];
          farthest = static_cast<int>(i);
        }
      }
      if (farthest < 0) continue;
      sums.row(assignment[farthest]) -= embeddings.row(farthest);
      --counts[assignment[farthest]];
      assignment[farthest] = c;
      sums.row(c) = embeddings.row(farthest);
      counts[c] = 1;
    }

    double max_move = 0.0;
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // degenerate data; keep the old centroid
      const Matrix::RowXpr old = centroids.row(c);
      Eigen::RowVectorXd next = sums.row(c) / static_cast<double>(counts[c]);
      const double move = (next - old).norm();
      if (move > max_move) max_move = move;
      centroids.row(c) = next;
    }
    if (max_move <= tol) break;
  }

  // final assignment against the converged centroids
  parallel_for(static_cast<std::size_t>(rows), [&](std::size_t i) {
    int best = 0;
    double best_d = kInf;
    for (int c = 0; c < k; ++c) {
      const double d = euclidean_distance(
          row_span(embeddings, static_cast<Eigen::Index>(i)),
          {centroids.data() + c * centroids.cols(), static_cast<std::size_t>(centroids.cols())});
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    assignment[i] = best;
  });

  // canonical cluster ids: order of first occurrence in row order
  std::vector<int> remap(k, -1);
  int next_id = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    if (remap[assignment[i]] < 0) remap[assignment[i]] = next_id++;
  for (int c = 0; c < k; ++c)
    if (remap[c] < 0) remap[c] = next_id++;  // clusters that ended up empty
  KmeansResult result;
  result.centroids.resize(k, embeddings.cols());
  for (int c = 0; c < k; ++c) result.centroids.row(remap[c]) = centroids.row(c);
  result.assignment.resize(rows);
  for (Eigen::Index i = 0; i < rows; ++i) result.assignment[i] = remap[assignment[i]];
  return result;
}

ClusterSelection cluster_balanced_select(const Matrix& embeddings,
                                         const ClusterSelectConfig& config) {
  if (config.per_cluster < 1) throw ConfigError("per_cluster must be >= 1");
  const KmeansResult km =
      kmeans(embeddings, config.k, config.max_lloyd_iters, config.tol, config.seed);

  ClusterSelection out;
  for (int c = 0; c < config.k; ++c) {
    std::vector<std::pair<double, int>> members;  // (distance to centroid, index)
    for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
      if (km.assignment[i] != c) continue;
      const double d = euclidean_distance(
          row_span(embeddings, i),
          {km.centroids.data() + c * km.centroids.cols(),
           static_cast<std::size_t>(km.centroids.cols())});
      members.emplace_back(d, static_cast<int>(i));
    }
    std::sort(members.begin(), members.end());
    const int take = std::min<int>(config.per_cluster, static_cast<int>(members.size()));
    for (int i = 0; i < take; ++i) out.indices.push_back(members[i].second);
    out.shortfall += config.per_cluster - take;
  }
  return out;
}

void save_selection_json(const std::filesystem::path& path, const SelectionResult& result) {
  nlohmann::json j;
  j["seed"] = result.seed;
  j["indices"] = result.indices;
  auto& trace = j["minmax_trace"] = nlohmann::json::array();
  for (double v : result.minmax_trace) {
    if (std::isinf(v))
      trace.push_back("inf");
    else
      trace.push_back(v);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

SelectionResult load_selection_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad selection json in " + path.string() + ": " + e.what());
  }
  SelectionResult result;
  result.seed = j.at("seed").get<std::uint64_t>();
  result.indices = j.at("indices").get<std::vector<int>>();
  for (const auto& v : j.at("minmax_trace")) {
    if (v.is_string() && v.get<std::string>() == "inf")
      result.minmax_trace.push_back(kInf);
    else
      result.minmax_trace.push_back(v.get<double>());
  }
  return result;
}

}  // namespace divsel
