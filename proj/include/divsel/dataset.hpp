#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "divsel/common.hpp"

namespace divsel {

// A universe of records to select from. Labels are evaluation-only: selection
// operations take bare feature/embedding matrices and cannot see them.
struct LabeledDataset {
  Matrix features;                          // n x m
  std::vector<std::optional<int>> labels;   // length n
  std::vector<std::uint64_t> ids;           // length n, unique

  Eigen::Index rows() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }

  bool fully_labeled() const;
  // max label + 1; 0 when no labels are present
  int num_classes() const;
  // labels of the given rows; throws ConfigError if any is missing
  std::vector<int> labels_at(std::span<const int> indices) const;
};

void validate(const LabeledDataset& ds);

LabeledDataset subset(const LabeledDataset& ds, std::span<const int> indices);

// CSV with header id,label,f0,...,f{m-1}; empty label column when absent;
// floats in round-trip-exact decimal form.
void write_dataset_csv(const std::filesystem::path& path, const LabeledDataset& ds);
LabeledDataset read_dataset_csv(const std::filesystem::path& path);

// CSV with header id,e0,...,e{d-1}; ids must match the dataset the rows came from.
void write_embeddings_csv(const std::filesystem::path& path, const Matrix& embeddings,
                          std::span<const std::uint64_t> ids);
std::pair<Matrix, std::vector<std::uint64_t>> read_embeddings_csv(const std::filesystem::path& path);

}  // namespace divsel
