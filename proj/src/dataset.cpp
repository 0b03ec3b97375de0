#include "divsel/dataset.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <unordered_set>

#include "divsel/format.hpp"

namespace divsel {

bool LabeledDataset::fully_labeled() const {
  for (const auto& l : labels)
    if (!l) return false;
  return true;
}

int LabeledDataset::num_classes() const {
  int max_label = -1;
  for (const auto& l : labels)
    if (l && *l > max_label) max_label = *l;
  return max_label + 1;
}

std::vector<int> LabeledDataset::labels_at(std::span<const int> indices) const {
  std::vector<int> out;
  out.reserve(indices.size());
  for (int i : indices) {
    if (i < 0 || i >= static_cast<int>(labels.size()))
      throw ConfigError("index " + std::to_string(i) + " out of range");
    if (!labels[i]) throw ConfigError("record " + std::to_string(i) + " has no label");
    out.push_back(*labels[i]);
  }
  return out;
}

void validate(const LabeledDataset& ds) {
  const auto n = static_cast<std::size_t>(ds.rows());
  if (ds.labels.size() != n || ds.ids.size() != n)
    throw ConfigError("dataset fields disagree on record count");
  std::unordered_set<std::uint64_t> seen(ds.ids.begin(), ds.ids.end());
  if (seen.size() != n) throw ConfigError("dataset ids are not unique");
}

LabeledDataset subset(const LabeledDataset& ds, std::span<const int> indices) {
  LabeledDataset out;
  out.features.resize(static_cast<Eigen::Index>(indices.size()), ds.dim());
  out.labels.reserve(indices.size());
  out.ids.reserve(indices.size());
  Eigen::Index r = 0;
  for (int i : indices) {
    if (i < 0 || i >= ds.rows())
      throw ConfigError("subset index " + std::to_string(i) + " out of range");
    out.features.row(r++) = ds.features.row(i);
    out.labels.push_back(ds.labels[i]);
    out.ids.push_back(ds.ids[i]);
  }
  return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

}  // namespace

void write_dataset_csv(const std::filesystem::path& path, const LabeledDataset& ds) {
  validate(ds);
  auto out = open_out(path);
  out << "id,label";
  for (Eigen::Index j = 0; j < ds.dim(); ++j) out << ",f" << j;
  out << "\n";
  for (Eigen::Index i = 0; i < ds.rows(); ++i) {
    out << ds.ids[i] << ',';
    if (ds.labels[i]) out << *ds.labels[i];
    for (Eigen::Index j = 0; j < ds.dim(); ++j) out << ',' << format_double(ds.features(i, j));
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path.string());
}

LabeledDataset read_dataset_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty file: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line);
  if (header.size() < 3 || header[0] != "id" || header[1] != "label")
    throw IoError("bad dataset header in " + path.string());
  const Eigen::Index m = static_cast<Eigen::Index>(header.size()) - 2;

  std::vector<double> values;
  LabeledDataset ds;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (static_cast<Eigen::Index>(fields.size()) != m + 2)
      throw IoError("row with " + std::to_string(fields.size()) + " fields, expected " +
                    std::to_string(m + 2) + " in " + path.string());
    ds.ids.push_back(static_cast<std::uint64_t>(parse_int(fields[0])));
    if (fields[1].empty())
      ds.labels.push_back(std::nullopt);
    else
      ds.labels.push_back(static_cast<int>(parse_int(fields[1])));
    for (Eigen::Index j = 0; j < m; ++j) values.push_back(parse_double(fields[2 + j]));
  }
  const auto n = static_cast<Eigen::Index>(ds.ids.size());
  ds.features.resize(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) ds.features(i, j) = values[i * m + j];
  validate(ds);
  return ds;
}

void write_embeddings_csv(const std::filesystem::path& path, const Matrix& embeddings,
                          std::span<const std::uint64_t> ids) {
  if (static_cast<Eigen::Index>(ids.size()) != embeddings.rows())
    throw ShapeError("embeddings rows (" + std::to_string(embeddings.rows()) +
                     ") != ids (" + std::to_string(ids.size()) + ")");
  auto out = open_out(path);
  out << "id";
  for (Eigen::Index j = 0; j < embeddings.cols(); ++j) out << ",e" << j;
  out << "\n";
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
    out << ids[i];
    for (Eigen::Index j = 0; j < embeddings.cols(); ++j)
      out << ',' << format_double(embeddings(i, j));
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::pair<Matrix, std::vector<std::uint64_t>> read_embeddings_csv(
    const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty file: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line);
  if (header.size() < 2 || header[0] != "id")
    throw IoError("bad embeddings header in " + path.string());
  const Eigen::Index d = static_cast<Eigen::Index>(header.size()) - 1;

  std::vector<double> values;
  std::vector<std::uint64_t> ids;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (static_cast<Eigen::Index>(fields.size()) != d + 1)
      throw IoError("row with " + std::to_string(fields.size()) + " fields, expected " +
                    std::to_string(d + 1) + " in " + path.string());
    ids.push_back(static_cast<std::uint64_t>(parse_int(fields[0])));
    for (Eigen::Index j = 0; j < d; ++j) values.push_back(parse_double(fields[1 + j]));
  }
  Matrix emb(static_cast<Eigen::Index>(ids.size()), d);
  for (Eigen::Index i = 0; i < emb.rows(); ++i)
    for (Eigen::Index j = 0; j < d; ++j) emb(i, j) = values[i * d + j];
  return {std::move(emb), std::move(ids)};
}

}  // namespace divsel
