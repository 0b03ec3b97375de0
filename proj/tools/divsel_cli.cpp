// divsel: deterministic diverse-selection experiments with file-based handoff.
// Exit codes: 0 success, 1 runtime/I-O failure, 2 usage/config error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "divsel/datagen.hpp"
#include "divsel/dataset.hpp"
#include "divsel/embedder.hpp"
#include "divsel/eval.hpp"
#include "divsel/format.hpp"
#include "divsel/parallel.hpp"
#include "divsel/pipeline.hpp"
#include "divsel/selection.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace divsel;

namespace {

json load_json_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("bad JSON in " + path.string() + ": " + e.what());
  }
}

// Pop a key so leftovers can be rejected as typos.
template <class T>
T take(json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    T v = it->get<T>();
    j.erase(it);
    return v;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + " config must be a JSON object");
  if (!j.empty()) throw ConfigError("unknown " + what + " config key '" + j.begin().key() + "'");
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<int> full_label_list(const LabeledDataset& ds) {
  std::vector<int> all(ds.rows());
  for (int i = 0; i < static_cast<int>(all.size()); ++i) all[i] = i;
  return ds.labels_at(all);
}

std::vector<int> class_counts_of(const LabeledDataset& ds) {
  std::vector<int> counts(ds.num_classes(), 0);
  for (int label : full_label_list(ds)) ++counts[label];
  return counts;
}

void report_generated(const LabeledDataset& ds, const fs::path& csv_path) {
  std::cout << "wrote " << ds.rows() << " points to " << csv_path.string() << "\n";
  std::cout << "class sizes:";
  for (int c : class_counts_of(ds)) std::cout << ' ' << c;
  std::cout << "\n";
}

// ---- gen-circles / gen-blobs ------------------------------------------------

struct GenOpts {
  std::string config_path;
  std::string out_dir;
};

void run_gen_circles(const GenOpts& opts) {
  json j = load_json_config(opts.config_path);
  CirclesConfig cfg;
  cfg.num_rings = take(j, "num_rings", cfg.num_rings);
  cfg.base_count = take(j, "base_count", cfg.base_count);
  cfg.odd_ratio = take(j, "odd_ratio", cfg.odd_ratio);
  cfg.ring_gap = take(j, "ring_gap", cfg.ring_gap);
  cfg.radial_noise = take(j, "radial_noise", cfg.radial_noise);
  cfg.seed = take(j, "seed", cfg.seed);
  reject_unknown(j, "circles");
  validate(cfg);

  const LabeledDataset ds = generate_biased_circles(cfg);
  const fs::path out(opts.out_dir);
  fs::create_directories(out);
  write_dataset_csv(out / "dataset.csv", ds);
  write_json_file(out / "metadata.json",
                  json{{"generator", "circles"},
                       {"config",
                        {{"num_rings", cfg.num_rings},
                         {"base_count", cfg.base_count},
                         {"odd_ratio", cfg.odd_ratio},
                         {"ring_gap", cfg.ring_gap},
                         {"radial_noise", cfg.radial_noise},
                         {"seed", cfg.seed}}},
                       {"total_points", static_cast<int>(ds.rows())},
                       {"class_counts", class_counts_of(ds)}});
  report_generated(ds, out / "dataset.csv");
}

void run_gen_blobs(const GenOpts& opts) {
  json j = load_json_config(opts.config_path);
  BlobsConfig cfg;
  cfg.num_classes = take(j, "num_classes", cfg.num_classes);
  cfg.class_counts = take(j, "class_counts", cfg.class_counts);
  cfg.dim = take(j, "dim", cfg.dim);
  cfg.cluster_std = take(j, "cluster_std", cfg.cluster_std);
  cfg.center_separation = take(j, "center_separation", cfg.center_separation);
  cfg.seed = take(j, "seed", cfg.seed);
  if (j.contains("center_seed")) cfg.center_seed = take<std::uint64_t>(j, "center_seed", 0);
  reject_unknown(j, "blobs");
  validate(cfg);

  const LabeledDataset ds = generate_imbalanced_blobs(cfg);
  const fs::path out(opts.out_dir);
  fs::create_directories(out);
  write_dataset_csv(out / "dataset.csv", ds);
  json meta_cfg{{"num_classes", cfg.num_classes}, {"class_counts", cfg.class_counts},
                {"dim", cfg.dim},                 {"cluster_std", cfg.cluster_std},
                {"center_separation", cfg.center_separation}, {"seed", cfg.seed}};
  if (cfg.center_seed) meta_cfg["center_seed"] = *cfg.center_seed;
  write_json_file(out / "metadata.json", json{{"generator", "blobs"},
                                              {"config", meta_cfg},
                                              {"total_points", static_cast<int>(ds.rows())},
                                              {"class_counts", class_counts_of(ds)}});
  report_generated(ds, out / "dataset.csv");
}

// ---- select -----------------------------------------------------------------

struct SelectOpts {
  std::string dataset_path;
  std::string embeddings_path;  // empty: identity embedder (raw features)
  std::string strategy = "diverse";
  int n = 0;
  std::uint64_t seed = 0;
  int cluster_k = 0;  // required for cluster-balanced
  int max_lloyd_iters = 100;
  double tol = 1e-6;
  std::string out_dir;
};

void run_select(const SelectOpts& opts) {
  const LabeledDataset ds = read_dataset_csv(opts.dataset_path);
  Matrix embeddings = ds.features;
  if (!opts.embeddings_path.empty()) {
    auto [emb, ids] = read_embeddings_csv(opts.embeddings_path);
    if (ids != ds.ids)
      throw ConfigError("embedding ids do not match dataset ids (" + opts.embeddings_path + ")");
    embeddings = std::move(emb);
  }
  if (opts.n < 1 || opts.n > embeddings.rows())
    throw ConfigError("--n (" + std::to_string(opts.n) + ") must be in [1, dataset size " +
                      std::to_string(embeddings.rows()) + "]");

  SelectionResult result;
  const Strategy strategy = strategy_from_name(opts.strategy);
  switch (strategy) {
    case Strategy::kDiverse:
      result = diverse_select(embeddings, opts.n, opts.seed);
      break;
    case Strategy::kRandom:
      result.indices = random_select(static_cast<int>(embeddings.rows()), opts.n, opts.seed);
      result.seed = opts.seed;
      break;
    case Strategy::kClusterBalanced: {
      if (opts.cluster_k < 1) throw ConfigError("--cluster-k is required for cluster-balanced");
      if (opts.n % opts.cluster_k != 0)
        throw ConfigError("--n must be divisible by --cluster-k for cluster-balanced");
      ClusterSelectConfig cfg{opts.cluster_k, opts.n / opts.cluster_k, opts.max_lloyd_iters,
                              opts.tol, opts.seed};
      auto picked = cluster_balanced_select(embeddings, cfg);
      result.indices = std::move(picked.indices);
      result.seed = opts.seed;
      if (picked.shortfall > 0)
        std::cout << "shortfall: " << picked.shortfall << " (small clusters)\n";
      break;
    }
  }

  const fs::path out(opts.out_dir);
  fs::create_directories(out);
  save_selection_json(out / "selection.json", result);
  write_dataset_csv(out / "subset.csv", subset(ds, result.indices));
  std::cout << "selected " << result.indices.size() << " of " << ds.rows() << " rows ("
            << opts.strategy << ")\n";
  if (ds.fully_labeled())
    std::cout << "class_size_std: "
              << format_double(class_size_std(ds.labels_at(result.indices), ds.num_classes()))
              << "\n";
}

// ---- iterate ----------------------------------------------------------------

struct IterateOpts {
  std::string dataset_path;
  std::string test_path;
  std::string config_path;
  std::string out_dir;
};

PipelineConfig parse_pipeline_config(json j) {
  PipelineConfig cfg;
  cfg.iterations = take(j, "iterations", cfg.iterations);
  cfg.n_select = take(j, "n_select", cfg.n_select);
  cfg.strategy = strategy_from_name(take<std::string>(j, "strategy", "diverse"));
  cfg.eval_knn_k = take(j, "eval_knn_k", cfg.eval_knn_k);
  cfg.standardize = take(j, "standardize", cfg.standardize);
  cfg.seed = take(j, "seed", cfg.seed);

  const std::string initial = take<std::string>(j, "initial_train_on", "full-dataset");
  if (initial == "full-dataset" || initial == "full_dataset")
    cfg.initial_train_on = PipelineConfig::InitialTrain::kFullDataset;
  else if (initial == "random-subset" || initial == "random_subset")
    cfg.initial_train_on = PipelineConfig::InitialTrain::kRandomSubset;
  else
    throw ConfigError("unknown initial_train_on '" + initial + "'");
  cfg.initial_subset_n = take(j, "initial_subset_n", cfg.initial_subset_n);

  if (auto it = j.find("cluster"); it != j.end()) {
    json c = *it;
    j.erase(it);
    cfg.cluster.k = take(c, "k", cfg.cluster.k);
    cfg.cluster.per_cluster = take(c, "per_cluster", cfg.cluster.per_cluster);
    cfg.cluster.max_lloyd_iters = take(c, "max_lloyd_iters", cfg.cluster.max_lloyd_iters);
    cfg.cluster.tol = take(c, "tol", cfg.cluster.tol);
    reject_unknown(c, "cluster");
  }

  if (auto it = j.find("embedder"); it != j.end()) {
    if (!it->is_null()) {
      json e = *it;
      cfg.embedder = EmbedderSpec{};
      cfg.embedder->layer_dims = take(e, "layer_dims", std::vector<int>{});
      cfg.embedder->activation = activation_from_name(take<std::string>(e, "activation", "tanh"));
      reject_unknown(e, "embedder");
      if (cfg.embedder->layer_dims.empty())
        throw ConfigError("embedder config requires layer_dims");
    }
    j.erase(it);
  }

  if (auto it = j.find("train"); it != j.end()) {
    json t = *it;
    j.erase(it);
    cfg.train.epochs = take(t, "epochs", cfg.train.epochs);
    cfg.train.batch_size = take(t, "batch_size", cfg.train.batch_size);
    cfg.train.learning_rate = take(t, "learning_rate", cfg.train.learning_rate);
    const std::string opt = take<std::string>(t, "optimizer", "adam");
    if (opt == "sgd")
      cfg.train.optimizer = TrainConfig::Optimizer::kSgd;
    else if (opt == "adam")
      cfg.train.optimizer = TrainConfig::Optimizer::kAdam;
    else
      throw ConfigError("unknown optimizer '" + opt + "'");
    cfg.train.adam_beta1 = take(t, "adam_beta1", cfg.train.adam_beta1);
    cfg.train.adam_beta2 = take(t, "adam_beta2", cfg.train.adam_beta2);
    cfg.train.adam_eps = take(t, "adam_eps", cfg.train.adam_eps);
    cfg.train.weight_init_scale = take(t, "weight_init_scale", cfg.train.weight_init_scale);
    cfg.train.shuffle = take(t, "shuffle", cfg.train.shuffle);
    reject_unknown(t, "train");
  }

  reject_unknown(j, "pipeline");
  return cfg;
}

void run_iterate(const IterateOpts& opts) {
  const LabeledDataset ds = read_dataset_csv(opts.dataset_path);
  const LabeledDataset test = read_dataset_csv(opts.test_path);
  const PipelineConfig cfg = parse_pipeline_config(load_json_config(opts.config_path));

  const auto reports = run_pipeline(ds, test, cfg);

  const fs::path out(opts.out_dir);
  fs::create_directories(out);
  write_reports_jsonl(out / "reports.jsonl", reports);
  write_summary_csv(out / "summary.csv", strategy_name(cfg.strategy), cfg.seed, reports);

  std::cout << "iteration  accuracy  class_size_std  shortfall\n";
  for (const auto& r : reports)
    std::cout << r.iteration << "  " << format_double(r.train_accuracy_on_test) << "  "
              << format_double(r.class_size_std) << "  " << r.shortfall << "\n";
}

// ---- evaluate ---------------------------------------------------------------

struct EvaluateOpts {
  std::string train_path;
  std::string test_path;
  int k = 5;
  std::string out_dir;
};

void run_evaluate(const EvaluateOpts& opts) {
  const LabeledDataset train = read_dataset_csv(opts.train_path);
  const LabeledDataset test = read_dataset_csv(opts.test_path);
  const double acc = accuracy(knn_predict(train, test.features, opts.k), full_label_list(test));
  const int num_classes = std::max(train.num_classes(), test.num_classes());
  const double std_dev = class_size_std(full_label_list(train), num_classes);

  const fs::path out(opts.out_dir);
  fs::create_directories(out);
  std::ofstream csv(out / "metrics.csv", std::ios::binary);
  if (!csv) throw IoError("cannot open for writing: " + (out / "metrics.csv").string());
  csv << "k,accuracy,class_size_std\n"
      << opts.k << ',' << format_double(acc) << ',' << format_double(std_dev) << "\n";
  if (!csv) throw IoError("write failed: " + (out / "metrics.csv").string());

  std::cout << "accuracy: " << format_double(acc) << "\n";
  std::cout << "class_size_std: " << format_double(std_dev) << "\n";
}

// ---- crossover --------------------------------------------------------------

struct CrossoverOpts {
  std::string dataset_path;
  int n_diverse = 0;
  int k = 5;
  int seed_count = 5;
  double test_fraction = 0.2;
  std::string balance_mode = "class-balanced";
  std::uint64_t seed = 0;
  std::string out_dir;
};

void run_crossover(const CrossoverOpts& opts) {
  const LabeledDataset ds = read_dataset_csv(opts.dataset_path);
  const EvalSplit split =
      make_split(ds, opts.test_fraction, balance_mode_from_name(opts.balance_mode), opts.seed);
  const CrossoverResult result =
      crossover_ratio(ds, split, opts.n_diverse, opts.k, opts.seed_count, opts.seed);

  const fs::path out(opts.out_dir);
  fs::create_directories(out);
  json sweep = json::array();
  for (const auto& step : result.sweep)
    sweep.push_back({{"n_random", step.n_random},
                     {"accuracy", step.accuracy},
                     {"class_size_std", step.class_size_std}});
  write_json_file(out / "crossover.json",
                  json{{"n_diverse", opts.n_diverse},
                       {"k", opts.k},
                       {"seed_count", opts.seed_count},
                       {"seed", opts.seed},
                       {"test_fraction", opts.test_fraction},
                       {"balance_mode", std::string(balance_mode_name(split.balance_mode))},
                       {"diverse_accuracy", result.diverse_accuracy},
                       {"diverse_class_size_std", result.diverse_class_size_std},
                       {"ratio", result.ratio ? json(*result.ratio) : json(nullptr)},
                       {"sweep", sweep}});

  // same column schema as pipeline summaries; iteration indexes the sweep step
  std::ofstream csv(out / "summary.csv", std::ios::binary);
  if (!csv) throw IoError("cannot open for writing: " + (out / "summary.csv").string());
  csv << "strategy,seed,iteration,accuracy,class_size_std\n";
  for (std::size_t i = 0; i < result.sweep.size(); ++i)
    csv << "crossover," << opts.seed << ',' << i << ',' << format_double(result.sweep[i].accuracy)
        << ',' << format_double(result.sweep[i].class_size_std) << "\n";
  if (!csv) throw IoError("write failed: " + (out / "summary.csv").string());

  std::cout << "diverse accuracy at n=" << opts.n_diverse << ": "
            << format_double(result.diverse_accuracy) << "\n";
  if (result.ratio)
    std::cout << "crossover ratio: " << format_double(*result.ratio) << " (n_random="
              << result.sweep.back().n_random << ")\n";
  else
    std::cout << "crossover ratio: not reached (random accuracy "
              << format_double(result.sweep.back().accuracy) << " at cap n_random="
              << result.sweep.back().n_random << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic diverse sample selection experiments"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "worker threads for data-parallel loops")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  GenOpts circles_opts;
  auto* gen_circles = app.add_subcommand("gen-circles", "generate the biased concentric-rings dataset");
  gen_circles->add_option("--config", circles_opts.config_path, "JSON config")
      ->required()
      ->check(CLI::ExistingFile);
  gen_circles->add_option("--out", circles_opts.out_dir, "output directory")->required();
  gen_circles->fallthrough();
  gen_circles->callback([&] { set_max_threads(threads); run_gen_circles(circles_opts); });

  GenOpts blobs_opts;
  auto* gen_blobs = app.add_subcommand("gen-blobs", "generate imbalanced Gaussian blobs");
  gen_blobs->add_option("--config", blobs_opts.config_path, "JSON config")
      ->required()
      ->check(CLI::ExistingFile);
  gen_blobs->add_option("--out", blobs_opts.out_dir, "output directory")->required();
  gen_blobs->fallthrough();
  gen_blobs->callback([&] { set_max_threads(threads); run_gen_blobs(blobs_opts); });

  SelectOpts select_opts;
  auto* select = app.add_subcommand("select", "select a subset by diverse/random/cluster-balanced strategy");
  select->add_option("--dataset", select_opts.dataset_path, "dataset CSV")
      ->required()
      ->check(CLI::ExistingFile);
  select->add_option("--embeddings", select_opts.embeddings_path,
                     "embeddings CSV (default: raw features)")
      ->check(CLI::ExistingFile);
  select->add_option("--strategy", select_opts.strategy, "diverse | random | cluster-balanced")
      ->capture_default_str();
  select->add_option("--n", select_opts.n, "number of points to select")->required();
  select->add_option("--seed", select_opts.seed, "RNG seed")->required();
  select->add_option("--cluster-k", select_opts.cluster_k, "clusters (cluster-balanced only)");
  select->add_option("--max-lloyd-iters", select_opts.max_lloyd_iters, "k-means iteration cap")
      ->capture_default_str();
  select->add_option("--tol", select_opts.tol, "k-means convergence tolerance")
      ->capture_default_str();
  select->add_option("--out", select_opts.out_dir, "output directory")->required();
  select->fallthrough();
  select->callback([&] { set_max_threads(threads); run_select(select_opts); });

  IterateOpts iterate_opts;
  auto* iterate = app.add_subcommand("iterate", "run the iterative balancing pipeline");
  iterate->add_option("--dataset", iterate_opts.dataset_path, "training pool CSV")
      ->required()
      ->check(CLI::ExistingFile);
  iterate->add_option("--test", iterate_opts.test_path, "test set CSV")
      ->required()
      ->check(CLI::ExistingFile);
  iterate->add_option("--config", iterate_opts.config_path, "pipeline JSON config")
      ->required()
      ->check(CLI::ExistingFile);
  iterate->add_option("--out", iterate_opts.out_dir, "output directory")->required();
  iterate->fallthrough();
  iterate->callback([&] { set_max_threads(threads); run_iterate(iterate_opts); });

  EvaluateOpts evaluate_opts;
  auto* evaluate = app.add_subcommand("evaluate", "k-NN accuracy and class balance of a subset");
  evaluate->add_option("--train-subset", evaluate_opts.train_path, "training subset CSV")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--test", evaluate_opts.test_path, "test set CSV")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--k", evaluate_opts.k, "k-NN neighbor count")->capture_default_str();
  evaluate->add_option("--out", evaluate_opts.out_dir, "output directory")->required();
  evaluate->fallthrough();
  evaluate->callback([&] { set_max_threads(threads); run_evaluate(evaluate_opts); });

  CrossoverOpts crossover_opts;
  auto* crossover = app.add_subcommand("crossover", "random-vs-diverse crossover ratio sweep");
  crossover->add_option("--dataset", crossover_opts.dataset_path, "dataset CSV")
      ->required()
      ->check(CLI::ExistingFile);
  crossover->add_option("--n-diverse", crossover_opts.n_diverse, "diverse selection size")
      ->required();
  crossover->add_option("--k", crossover_opts.k, "k-NN neighbor count")->capture_default_str();
  crossover->add_option("--seed-count", crossover_opts.seed_count, "seeds averaged per point")
      ->capture_default_str();
  crossover->add_option("--test-fraction", crossover_opts.test_fraction, "held-out fraction")
      ->capture_default_str();
  crossover->add_option("--balance-mode", crossover_opts.balance_mode, "as-is | class-balanced")
      ->capture_default_str();
  crossover->add_option("--seed", crossover_opts.seed, "RNG seed")->required();
  crossover->add_option("--out", crossover_opts.out_dir, "output directory")->required();
  crossover->fallthrough();
  crossover->callback([&] { set_max_threads(threads); run_crossover(crossover_opts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
