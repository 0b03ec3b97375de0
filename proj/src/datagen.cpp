#include "divsel/datagen.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "divsel/rng.hpp"

namespace divsel {

namespace {
constexpr std::uint64_t kCirclesStream = 0x636972636C657301ull;
constexpr std::uint64_t kBlobCenterStream = 0x626C6F6263747201ull;
constexpr std::uint64_t kBlobSampleStream = 0x626C6F62736D7001ull;
}  // namespace

void validate(const CirclesConfig& cfg) {
  if (cfg.num_rings < 1) throw ConfigError("num_rings must be >= 1 (got " + std::to_string(cfg.num_rings) + ")");
  if (cfg.base_count < 1) throw ConfigError("base_count must be >= 1 (got " + std::to_string(cfg.base_count) + ")");
  if (cfg.odd_ratio < 1) throw ConfigError("odd_ratio must be >= 1 (got " + std::to_string(cfg.odd_ratio) + ")");
  if (!(cfg.ring_gap > 0.0)) throw ConfigError("ring_gap must be > 0 (got " + std::to_string(cfg.ring_gap) + ")");
  if (!(cfg.radial_noise >= 0.0))
    throw ConfigError("radial_noise must be >= 0 (got " + std::to_string(cfg.radial_noise) + ")");
}

int total_points(const CirclesConfig& cfg) {
  int total = 0;
  for (int k = 1; k <= cfg.num_rings; ++k)
    total += (k % 2 == 1 ? cfg.odd_ratio : 1) * cfg.base_count;
  return total;
}

LabeledDataset generate_biased_circles(const CirclesConfig& cfg) {
  validate(cfg);
  const int n = total_points(cfg);
  LabeledDataset ds;
  ds.features.resize(n, 2);
  ds.labels.reserve(n);
  ds.ids.reserve(n);

  int row = 0;
  for (int k = 1; k <= cfg.num_rings; ++k) {
    const double ring_radius = static_cast<double>(cfg.num_rings - k + 1) * cfg.ring_gap;
    const int count = (k % 2 == 1 ? cfg.odd_ratio : 1) * cfg.base_count;
    for (int j = 0; j < count; ++j) {
      // one generator per point keyed by (seed, ring, point): order-free
      auto g = rng::stream(cfg.seed ^ kCirclesStream, static_cast<std::uint64_t>(k),
                           static_cast<std::uint64_t>(j));
      const double angle = 2.0 * std::numbers::pi * g.next_double();
      const double radius = ring_radius + cfg.radial_noise * g.next_gaussian();
      ds.features(row, 0) = radius * std::cos(angle);
      ds.features(row, 1) = radius * std::sin(angle);
      ds.labels.push_back(k - 1);
      ds.ids.push_back(static_cast<std::uint64_t>(row));
      ++row;
    }
  }
  return ds;
}

void validate(const BlobsConfig& cfg) {
  if (cfg.num_classes < 1)
    throw ConfigError("num_classes must be >= 1 (got " + std::to_string(cfg.num_classes) + ")");
  if (static_cast<int>(cfg.class_counts.size()) != cfg.num_classes)
    throw ConfigError("class_counts length (" + std::to_string(cfg.class_counts.size()) +
                      ") != num_classes (" + std::to_string(cfg.num_classes) + ")");
  for (int c : cfg.class_counts)
    if (c < 1) throw ConfigError("class_counts entries must be >= 1 (got " + std::to_string(c) + ")");
  if (cfg.dim < 1) throw ConfigError("dim must be >= 1 (got " + std::to_string(cfg.dim) + ")");
  if (!(cfg.cluster_std > 0.0) && cfg.cluster_std != 0.0)
    throw ConfigError("cluster_std must be >= 0 (got " + std::to_string(cfg.cluster_std) + ")");
  if (!(cfg.center_separation > 0.0))
    throw ConfigError("center_separation must be > 0 (got " + std::to_string(cfg.center_separation) + ")");
}

Matrix place_blob_centers(const BlobsConfig& cfg) {
  validate(cfg);
  const std::uint64_t cseed = cfg.center_seed.value_or(cfg.seed);
  auto g = rng::stream(cseed ^ kBlobCenterStream, static_cast<std::uint64_t>(cfg.num_classes),
                       static_cast<std::uint64_t>(cfg.dim));
  const double side = cfg.center_separation * cfg.num_classes;
  const long max_attempts = 1000L * cfg.num_classes;

  Matrix centers(cfg.num_classes, cfg.dim);
  int placed = 0;
  for (long attempt = 0; placed < cfg.num_classes; ++attempt) {
    if (attempt >= max_attempts)
      throw GenerationError("failed to place " + std::to_string(cfg.num_classes) +
                            " centers at separation " + std::to_string(cfg.center_separation) +
                            " after " + std::to_string(max_attempts) + " attempts");
    Vector cand(cfg.dim);
    for (int j = 0; j < cfg.dim; ++j) cand[j] = side * (2.0 * g.next_double() - 1.0);
    bool ok = true;
    for (int c = 0; c < placed && ok; ++c)
      ok = (centers.row(c).transpose() - cand).norm() >= cfg.center_separation;
    if (ok) centers.row(placed++) = cand.transpose();
  }
  return centers;
}

LabeledDataset generate_imbalanced_blobs(const BlobsConfig& cfg) {
  const Matrix centers = place_blob_centers(cfg);
  int n = 0;
  for (int c : cfg.class_counts) n += c;

  LabeledDataset ds;
  ds.features.resize(n, cfg.dim);
  ds.labels.reserve(n);
  ds.ids.reserve(n);

  int row = 0;
  for (int c = 0; c < cfg.num_classes; ++c) {
    for (int j = 0; j < cfg.class_counts[c]; ++j) {
      auto g = rng::stream(cfg.seed ^ kBlobSampleStream, static_cast<std::uint64_t>(c),
                           static_cast<std::uint64_t>(j));
      for (int d = 0; d < cfg.dim; ++d)
        ds.features(row, d) = centers(c, d) + cfg.cluster_std * g.next_gaussian();
      ds.labels.push_back(c);
      ds.ids.push_back(static_cast<std::uint64_t>(row));
      ++row;
    }
  }
  return ds;
}

}  // namespace divsel
