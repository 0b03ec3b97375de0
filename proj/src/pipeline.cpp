#include "divsel/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include <json.hpp>

#include "divsel/eval.hpp"
#include "divsel/format.hpp"
#include "divsel/rng.hpp"

namespace divsel {

Strategy strategy_from_name(std::string_view name) {
  if (name == "diverse") return Strategy::kDiverse;
  if (name == "random") return Strategy::kRandom;
  if (name == "cluster-balanced" || name == "cluster_balanced") return Strategy::kClusterBalanced;
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kDiverse:
      return "diverse";
    case Strategy::kRandom:
      return "random";
    case Strategy::kClusterBalanced:
      return "cluster-balanced";
  }
  return "diverse";
}

std::uint64_t derive_subseed(std::uint64_t master_seed, std::uint64_t iteration,
                             std::string_view purpose_tag) {
  return rng::hash_combine(rng::hash_combine(master_seed, iteration), rng::hash_tag(purpose_tag));
}

namespace {

struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static Standardizer fit(const Matrix& data) {
    Standardizer s;
    s.mean = data.colwise().mean();
    Eigen::RowVectorXd var = Eigen::RowVectorXd::Zero(data.cols());
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      const auto centered = data.row(i) - s.mean;
      var += centered.cwiseProduct(centered);
    }
    var /= static_cast<double>(data.rows());
    s.scale = var.cwiseSqrt();
    for (Eigen::Index j = 0; j < s.scale.size(); ++j)
      if (s.scale[j] < 1e-12) s.scale[j] = 1.0;  // constant feature
    return s;
  }

  Matrix apply(const Matrix& data) const {
    Matrix out = data;
    out.rowwise() -= mean;
    out.array().rowwise() /= scale.array();
    return out;
  }
};

void validate_pipeline_inputs(const LabeledDataset& dataset, const LabeledDataset& test_set,
                              const PipelineConfig& config) {
  if (dataset.dim() != test_set.dim())
    throw ShapeError("dataset dim " + std::to_string(dataset.dim()) + " != test set dim " +
                     std::to_string(test_set.dim()));
  if (config.iterations < 1) throw ConfigError("iterations must be >= 1");
  if (config.n_select < 1 || config.n_select > dataset.rows())
    throw ConfigError("n_select (" + std::to_string(config.n_select) +
                      ") must be in [1, dataset size " + std::to_string(dataset.rows()) + "]");
  if (config.eval_knn_k < 1) throw ConfigError("eval_knn_k must be >= 1");
  if (!dataset.fully_labeled() || !test_set.fully_labeled())
    throw ConfigError("pipeline datasets must be fully labeled (labels are used for "
                      "evaluation only, never for selection)");
  if (config.embedder && config.embedder->layer_dims.front() != dataset.dim())
    throw ShapeError("embedder input dim " + std::to_string(config.embedder->layer_dims.front()) +
                     " != dataset dim " + std::to_string(dataset.dim()));
  if (config.initial_train_on == PipelineConfig::InitialTrain::kRandomSubset &&
      (config.initial_subset_n < 1 || config.initial_subset_n > dataset.rows()))
    throw ConfigError("initial_subset_n must be in [1, dataset size]");
}

}  // namespace

std::vector<IterationReport> run_pipeline(const LabeledDataset& dataset,
                                          const LabeledDataset& test_set,
                                          const PipelineConfig& config) {
  validate_pipeline_inputs(dataset, test_set, config);

  const int num_classes = dataset.num_classes();
  std::vector<int> test_labels(test_set.rows());
  {
    std::vector<int> all(test_set.rows());
    std::iota(all.begin(), all.end(), 0);
    test_labels = test_set.labels_at(all);
  }

  // rows the embedder trains on this iteration (previous selection after it 0)
  std::vector<int> train_rows(dataset.rows());
  std::iota(train_rows.begin(), train_rows.end(), 0);
  if (config.initial_train_on == PipelineConfig::InitialTrain::kRandomSubset)
    train_rows = random_select(static_cast<int>(dataset.rows()), config.initial_subset_n,
                               derive_subseed(config.seed, 0, "init-subset"));

  std::vector<IterationReport> reports;
  reports.reserve(config.iterations);

  for (int t = 0; t < config.iterations; ++t) {
    const auto started = std::chrono::steady_clock::now();
    IterationReport report;
    report.iteration = t;

    Matrix embeddings;
    if (config.embedder) {
      Matrix embed_train(static_cast<Eigen::Index>(train_rows.size()), dataset.dim());
      for (std::size_t r = 0; r < train_rows.size(); ++r)
        embed_train.row(static_cast<Eigen::Index>(r)) = dataset.features.row(train_rows[r]);

      Matrix full = dataset.features;
      if (config.standardize) {
        const auto stz = Standardizer::fit(embed_train);
        embed_train = stz.apply(embed_train);
        full = stz.apply(full);
      }
      // fresh init every iteration: embeddings reflect only the current subset
      auto params = init_embedder(config.embedder->layer_dims, config.embedder->activation,
                                  derive_subseed(config.seed, t, "embed-init"),
                                  config.train.weight_init_scale);
      TrainConfig train_cfg = config.train;
      train_cfg.seed = derive_subseed(config.seed, t, "embed-train");
      auto [trained, trace] = train_autoencoder(std::move(params), embed_train, train_cfg);
      report.loss_trace = std::move(trace);
      embeddings = encode(trained, full);
    } else {
      embeddings = dataset.features;  // identity embedder
    }

    const std::uint64_t select_seed = derive_subseed(config.seed, t, "select");
    switch (config.strategy) {
      case Strategy::kDiverse:
        report.selected_indices = diverse_select(embeddings, config.n_select, select_seed).indices;
        break;
      case Strategy::kRandom:
        report.selected_indices =
            random_select(static_cast<int>(dataset.rows()), config.n_select, select_seed);
        break;
      case Strategy::kClusterBalanced: {
        ClusterSelectConfig cluster = config.cluster;
        cluster.seed = select_seed;
        auto picked = cluster_balanced_select(embeddings, cluster);
        report.selected_indices = std::move(picked.indices);
        report.shortfall = picked.shortfall;
        break;
      }
    }

    report.class_size_std = class_size_std(dataset.labels_at(report.selected_indices), num_classes);
    const LabeledDataset selected = subset(dataset, report.selected_indices);
    const int k = std::min<int>(config.eval_knn_k, static_cast<int>(selected.rows()));
    report.train_accuracy_on_test =
        accuracy(knn_predict(selected, test_set.features, k), test_labels);

    train_rows = report.selected_indices;
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    reports.push_back(std::move(report));
  }
  return reports;
}

void write_reports_jsonl(const std::filesystem::path& path,
                         const std::vector<IterationReport>& reports) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  for (const auto& r : reports) {
    nlohmann::json j;
    j["iteration"] = r.iteration;
    j["selected_indices"] = r.selected_indices;
    j["train_accuracy_on_test"] = r.train_accuracy_on_test;
    j["class_size_std"] = r.class_size_std;
    j["loss_trace"] = r.loss_trace.per_epoch;
    j["shortfall"] = r.shortfall;
    out << j.dump() << "\n";
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<IterationReport> read_reports_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::vector<IterationReport> reports;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw IoError("bad report line in " + path.string() + ": " + e.what());
    }
    IterationReport r;
    r.iteration = j.at("iteration").get<int>();
    r.selected_indices = j.at("selected_indices").get<std::vector<int>>();
    r.train_accuracy_on_test = j.at("train_accuracy_on_test").get<double>();
    r.class_size_std = j.at("class_size_std").get<double>();
    r.loss_trace.per_epoch = j.at("loss_trace").get<std::vector<double>>();
    r.shortfall = j.at("shortfall").get<int>();
    reports.push_back(std::move(r));
  }
  return reports;
}

void write_summary_csv(const std::filesystem::path& path, std::string_view strategy,
                       std::uint64_t seed, const std::vector<IterationReport>& reports) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "strategy,seed,iteration,accuracy,class_size_std\n";
  for (const auto& r : reports)
    out << strategy << ',' << seed << ',' << r.iteration << ','
        << format_double(r.train_accuracy_on_test) << ',' << format_double(r.class_size_std)
        << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace divsel
