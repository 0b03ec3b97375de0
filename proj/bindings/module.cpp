#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "divsel/datagen.hpp"
#include "divsel/dataset.hpp"
#include "divsel/embedder.hpp"
#include "divsel/eval.hpp"
#include "divsel/parallel.hpp"
#include "divsel/pipeline.hpp"
#include "divsel/selection.hpp"

namespace py = pybind11;
using namespace divsel;

PYBIND11_MODULE(_divsel, m) {
  m.doc() = "embedding-based diverse sample selection";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_IOError);
  py::register_exception<TrainingError>(m, "TrainingError", PyExc_RuntimeError);
  py::register_exception<GenerationError>(m, "GenerationError", PyExc_RuntimeError);

  m.def("max_threads", &max_threads);
  m.def("set_max_threads", &set_max_threads, py::arg("n"));

  // ---- data -----------------------------------------------------------------
  py::class_<LabeledDataset>(m, "LabeledDataset")
      .def(py::init<>())
      .def_readwrite("features", &LabeledDataset::features)
      .def_readwrite("labels", &LabeledDataset::labels)
      .def_readwrite("ids", &LabeledDataset::ids)
      .def_property_readonly("rows", [](const LabeledDataset& ds) { return ds.rows(); })
      .def_property_readonly("dim", [](const LabeledDataset& ds) { return ds.dim(); })
      .def("fully_labeled", &LabeledDataset::fully_labeled)
      .def("num_classes", &LabeledDataset::num_classes);
  m.def("subset", [](const LabeledDataset& ds, const std::vector<int>& idx) {
    return subset(ds, idx);
  }, py::arg("dataset"), py::arg("indices"));
  m.def("write_dataset_csv", &write_dataset_csv, py::arg("path"), py::arg("dataset"));
  m.def("read_dataset_csv", &read_dataset_csv, py::arg("path"));
  m.def("write_embeddings_csv", [](const std::filesystem::path& p, const Matrix& e,
                                   const std::vector<std::uint64_t>& ids) {
    write_embeddings_csv(p, e, ids);
  }, py::arg("path"), py::arg("embeddings"), py::arg("ids"));
  m.def("read_embeddings_csv", &read_embeddings_csv, py::arg("path"));

  py::class_<CirclesConfig>(m, "CirclesConfig")
      .def(py::init<>())
      .def_readwrite("num_rings", &CirclesConfig::num_rings)
      .def_readwrite("base_count", &CirclesConfig::base_count)
      .def_readwrite("odd_ratio", &CirclesConfig::odd_ratio)
      .def_readwrite("ring_gap", &CirclesConfig::ring_gap)
      .def_readwrite("radial_noise", &CirclesConfig::radial_noise)
      .def_readwrite("seed", &CirclesConfig::seed);
  m.def("generate_biased_circles", &generate_biased_circles, py::arg("config"));

  py::class_<BlobsConfig>(m, "BlobsConfig")
      .def(py::init<>())
      .def_readwrite("num_classes", &BlobsConfig::num_classes)
      .def_readwrite("class_counts", &BlobsConfig::class_counts)
      .def_readwrite("dim", &BlobsConfig::dim)
      .def_readwrite("cluster_std", &BlobsConfig::cluster_std)
      .def_readwrite("center_separation", &BlobsConfig::center_separation)
      .def_readwrite("seed", &BlobsConfig::seed)
      .def_readwrite("center_seed", &BlobsConfig::center_seed);
  m.def("generate_imbalanced_blobs", &generate_imbalanced_blobs, py::arg("config"));

  // ---- selection ------------------------------------------------------------
  py::class_<SelectionResult>(m, "SelectionResult")
      .def_readonly("indices", &SelectionResult::indices)
      .def_readonly("minmax_trace", &SelectionResult::minmax_trace)
      .def_readonly("seed", &SelectionResult::seed);
  m.def("euclidean_distance", [](const std::vector<double>& a, const std::vector<double>& b) {
    return euclidean_distance(a, b);
  }, py::arg("a"), py::arg("b"));
  m.def("diverse_select", &diverse_select, py::arg("embeddings"), py::arg("n"), py::arg("seed"));
  m.def("diverse_select_from", &diverse_select_from, py::arg("embeddings"), py::arg("n"),
        py::arg("seed_index"), py::arg("recorded_seed") = 0);
  m.def("random_select", &random_select, py::arg("n_total"), py::arg("n"), py::arg("seed"));

  py::class_<KmeansResult>(m, "KmeansResult")
      .def_readonly("centroids", &KmeansResult::centroids)
      .def_readonly("assignment", &KmeansResult::assignment);
  m.def("kmeans", &kmeans, py::arg("embeddings"), py::arg("k"), py::arg("max_iters") = 100,
        py::arg("tol") = 1e-6, py::arg("seed") = 0);

  py::class_<ClusterSelectConfig>(m, "ClusterSelectConfig")
      .def(py::init<>())
      .def_readwrite("k", &ClusterSelectConfig::k)
      .def_readwrite("per_cluster", &ClusterSelectConfig::per_cluster)
      .def_readwrite("max_lloyd_iters", &ClusterSelectConfig::max_lloyd_iters)
      .def_readwrite("tol", &ClusterSelectConfig::tol)
      .def_readwrite("seed", &ClusterSelectConfig::seed);
  py::class_<ClusterSelection>(m, "ClusterSelection")
      .def_readonly("indices", &ClusterSelection::indices)
      .def_readonly("shortfall", &ClusterSelection::shortfall);
  m.def("cluster_balanced_select", &cluster_balanced_select, py::arg("embeddings"),
        py::arg("config"));

  // ---- embedder -------------------------------------------------------------
  py::class_<EmbedderParams>(m, "EmbedderParams")
      .def_readonly("layer_dims", &EmbedderParams::layer_dims)
      .def_readonly("weights", &EmbedderParams::weights)
      .def_readonly("biases", &EmbedderParams::biases)
      .def_readonly("bottleneck_index", &EmbedderParams::bottleneck_index)
      .def_property_readonly("activation", [](const EmbedderParams& p) {
        return std::string(activation_name(p.activation));
      })
      .def_property_readonly("embedding_dim", &EmbedderParams::embedding_dim);
  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_property("optimizer",
                    [](const TrainConfig& c) {
                      return c.optimizer == TrainConfig::Optimizer::kAdam ? "adam" : "sgd";
                    },
                    [](TrainConfig& c, const std::string& name) {
                      if (name == "adam") c.optimizer = TrainConfig::Optimizer::kAdam;
                      else if (name == "sgd") c.optimizer = TrainConfig::Optimizer::kSgd;
                      else throw ConfigError("unknown optimizer '" + name + "'");
                    })
      .def_readwrite("adam_beta1", &TrainConfig::adam_beta1)
      .def_readwrite("adam_beta2", &TrainConfig::adam_beta2)
      .def_readwrite("adam_eps", &TrainConfig::adam_eps)
      .def_readwrite("weight_init_scale", &TrainConfig::weight_init_scale)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("shuffle", &TrainConfig::shuffle);
  m.def("init_embedder", [](const std::vector<int>& dims, const std::string& activation,
                            std::uint64_t seed, double scale) {
    return init_embedder(dims, activation_from_name(activation), seed, scale);
  }, py::arg("layer_dims"), py::arg("activation"), py::arg("seed"),
        py::arg("weight_init_scale") = 1.0);
  m.def("encode", &encode, py::arg("params"), py::arg("data"));
  m.def("reconstruct", &reconstruct, py::arg("params"), py::arg("data"));
  m.def("mse_loss", &mse_loss, py::arg("x"), py::arg("x_hat"));
  m.def("train_autoencoder", [](const EmbedderParams& params, const Matrix& data,
                                const TrainConfig& config) {
    auto [trained, trace] = train_autoencoder(params, data, config);
    return std::pair{std::move(trained), trace.per_epoch};
  }, py::arg("params"), py::arg("data"), py::arg("config"));
  m.def("save_params_json", &save_params_json, py::arg("path"), py::arg("params"));
  m.def("load_params_json", &load_params_json, py::arg("path"));

  // ---- eval -----------------------------------------------------------------
  py::class_<EvalSplit>(m, "EvalSplit")
      .def_readonly("train_indices", &EvalSplit::train_indices)
      .def_readonly("test_indices", &EvalSplit::test_indices)
      .def_property_readonly("balance_mode", [](const EvalSplit& s) {
        return std::string(balance_mode_name(s.balance_mode));
      });
  m.def("knn_predict", &knn_predict, py::arg("train"), py::arg("query"), py::arg("k"));
  m.def("accuracy", &accuracy, py::arg("predicted"), py::arg("actual"));
  m.def("class_size_std", &class_size_std, py::arg("labels_of_selected"), py::arg("num_classes"));
  m.def("make_split", [](const LabeledDataset& ds, double fraction, const std::string& mode,
                         std::uint64_t seed) {
    return make_split(ds, fraction, balance_mode_from_name(mode), seed);
  }, py::arg("dataset"), py::arg("test_fraction"), py::arg("balance_mode"), py::arg("seed"));

  py::class_<CrossoverStep>(m, "CrossoverStep")
      .def_readonly("n_random", &CrossoverStep::n_random)
      .def_readonly("accuracy", &CrossoverStep::accuracy)
      .def_readonly("class_size_std", &CrossoverStep::class_size_std);
  py::class_<CrossoverResult>(m, "CrossoverResult")
      .def_readonly("ratio", &CrossoverResult::ratio)
      .def_readonly("diverse_accuracy", &CrossoverResult::diverse_accuracy)
      .def_readonly("diverse_class_size_std", &CrossoverResult::diverse_class_size_std)
      .def_readonly("sweep", &CrossoverResult::sweep);
  m.def("crossover_ratio", &crossover_ratio, py::arg("dataset"), py::arg("split"),
        py::arg("n_diverse"), py::arg("k"), py::arg("seed_count"), py::arg("seed"));

  // ---- pipeline -------------------------------------------------------------
  py::class_<EmbedderSpec>(m, "EmbedderSpec")
      .def(py::init<>())
      .def_readwrite("layer_dims", &EmbedderSpec::layer_dims)
      .def_property("activation",
                    [](const EmbedderSpec& s) { return std::string(activation_name(s.activation)); },
                    [](EmbedderSpec& s, const std::string& name) {
                      s.activation = activation_from_name(name);
                    });
  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def(py::init<>())
      .def_readwrite("iterations", &PipelineConfig::iterations)
      .def_readwrite("n_select", &PipelineConfig::n_select)
      .def_property("strategy",
                    [](const PipelineConfig& c) { return std::string(strategy_name(c.strategy)); },
                    [](PipelineConfig& c, const std::string& name) {
                      c.strategy = strategy_from_name(name);
                    })
      .def_readwrite("cluster", &PipelineConfig::cluster)
      .def_readwrite("embedder", &PipelineConfig::embedder)
      .def_readwrite("train", &PipelineConfig::train)
      .def_property("initial_train_on",
                    [](const PipelineConfig& c) {
                      return c.initial_train_on == PipelineConfig::InitialTrain::kFullDataset
                                 ? "full-dataset"
                                 : "random-subset";
                    },
                    [](PipelineConfig& c, const std::string& name) {
                      if (name == "full-dataset")
                        c.initial_train_on = PipelineConfig::InitialTrain::kFullDataset;
                      else if (name == "random-subset")
                        c.initial_train_on = PipelineConfig::InitialTrain::kRandomSubset;
                      else
                        throw ConfigError("unknown initial_train_on '" + name + "'");
                    })
      .def_readwrite("initial_subset_n", &PipelineConfig::initial_subset_n)
      .def_readwrite("eval_knn_k", &PipelineConfig::eval_knn_k)
      .def_readwrite("standardize", &PipelineConfig::standardize)
      .def_readwrite("seed", &PipelineConfig::seed);
  py::class_<IterationReport>(m, "IterationReport")
      .def_readonly("iteration", &IterationReport::iteration)
      .def_readonly("selected_indices", &IterationReport::selected_indices)
      .def_readonly("train_accuracy_on_test", &IterationReport::train_accuracy_on_test)
      .def_readonly("class_size_std", &IterationReport::class_size_std)
      .def_property_readonly("loss_trace",
                             [](const IterationReport& r) { return r.loss_trace.per_epoch; })
      .def_readonly("shortfall", &IterationReport::shortfall)
      .def_readonly("wall_time_seconds", &IterationReport::wall_time_seconds);
  m.def("run_pipeline", &run_pipeline, py::arg("dataset"), py::arg("test_set"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("derive_subseed", &derive_subseed, py::arg("master_seed"), py::arg("iteration"),
        py::arg("purpose_tag"));
}
