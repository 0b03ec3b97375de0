#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "divsel/dataset.hpp"

namespace divsel {

// Concentric rings with an 8:1 (configurable) alternating class-size bias.
// Ring k (1 = outermost) has radius (num_rings - k + 1) * ring_gap; odd rings
// get odd_ratio * base_count points, even rings get base_count.
struct CirclesConfig {
  int num_rings = 10;
  int base_count = 100;
  int odd_ratio = 8;
  double ring_gap = 1.0;
  double radial_noise = 0.05;
  std::uint64_t seed = 0;
};

void validate(const CirclesConfig& cfg);
int total_points(const CirclesConfig& cfg);
LabeledDataset generate_biased_circles(const CirclesConfig& cfg);

// Gaussian clusters with configurable per-class counts. Centers are drawn
// uniformly in a box and rejection-checked to be at least center_separation
// apart. center_seed lets two generations (say an imbalanced train set and a
// balanced test set) share identical centers; it defaults to seed.
struct BlobsConfig {
  int num_classes = 2;
  std::vector<int> class_counts;
  int dim = 2;
  double cluster_std = 1.0;
  double center_separation = 10.0;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> center_seed;
};

void validate(const BlobsConfig& cfg);
Matrix place_blob_centers(const BlobsConfig& cfg);
LabeledDataset generate_imbalanced_blobs(const BlobsConfig& cfg);

}  // namespace divsel
