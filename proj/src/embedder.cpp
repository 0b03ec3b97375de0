#include "divsel/embedder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include <json.hpp>

#include "divsel/rng.hpp"

namespace divsel {

namespace {
constexpr std::uint64_t kInitStream = 0x656D62696E697401ull;
constexpr std::uint64_t kShuffleStream = 0x656D627368756601ull;

Matrix apply_activation(Matrix z, Activation act) {
  switch (act) {
    case Activation::kTanh:
      return z.array().tanh().matrix();
    case Activation::kRelu:
      return z.cwiseMax(0.0);
    case Activation::kIdentity:
      return z;
  }
  return z;
}

// derivative expressed through the activation value
Matrix activation_deriv(const Matrix& a, Activation act) {
  switch (act) {
    case Activation::kTanh:
      return (1.0 - a.array().square()).matrix();
    case Activation::kRelu:
      return (a.array() > 0.0).cast<double>().matrix();
    case Activation::kIdentity:
      return Matrix::Ones(a.rows(), a.cols());
  }
  return Matrix::Ones(a.rows(), a.cols());
}

void check_input(const EmbedderParams& params, const Matrix& data) {
  if (data.cols() != params.input_dim())
    throw ShapeError("data has " + std::to_string(data.cols()) + " columns, embedder expects " +
                     std::to_string(params.input_dim()));
}

// activations per layer, [0] = input, [L] = linear output
std::vector<Matrix> forward_all(const EmbedderParams& params, const Matrix& data) {
  std::vector<Matrix> acts;
  acts.reserve(params.num_layers() + 1);
  acts.push_back(data);
  for (int l = 0; l < params.num_layers(); ++l) {
    Matrix z = acts.back() * params.weights[l].transpose();
    z.rowwise() += params.biases[l].transpose();
    acts.push_back(l + 1 == params.num_layers() ? std::move(z)
                                                : apply_activation(std::move(z), params.activation));
  }
  return acts;
}

}  // namespace

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::kTanh:
      return "tanh";
    case Activation::kRelu:
      return "relu";
    case Activation::kIdentity:
      return "identity";
  }
  return "tanh";
}

Activation activation_from_name(std::string_view name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  if (name == "identity") return Activation::kIdentity;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

EmbedderParams init_embedder(const std::vector<int>& layer_dims, Activation activation,
                             std::uint64_t seed, double weight_init_scale) {
  const std::size_t n = layer_dims.size();
  if (n < 3 || n % 2 == 0)
    throw ConfigError("layer_dims must have odd length >= 3 (got " + std::to_string(n) + " entries)");
  for (std::size_t i = 0; i < n; ++i) {
    if (layer_dims[i] < 1)
      throw ConfigError("layer_dims entries must be positive (got " +
                        std::to_string(layer_dims[i]) + ")");
    if (layer_dims[i] != layer_dims[n - 1 - i])
      throw ConfigError("layer_dims must be symmetric about the bottleneck");
  }
  const int middle = static_cast<int>(n / 2);
  if (layer_dims[middle] != *std::min_element(layer_dims.begin(), layer_dims.end()))
    throw ConfigError("bottleneck (middle of layer_dims) must be the minimum dimension");
  if (!(weight_init_scale > 0.0)) throw ConfigError("weight_init_scale must be > 0");

  EmbedderParams params;
  params.layer_dims = layer_dims;
  params.activation = activation;
  params.bottleneck_index = middle;
  for (std::size_t l = 0; l + 1 < n; ++l) {
    const int fan_in = layer_dims[l];
    const int fan_out = layer_dims[l + 1];
    const double scale = weight_init_scale / std::sqrt(static_cast<double>(fan_in));
    auto g = rng::stream(seed ^ kInitStream, l, 0);
    Matrix w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) w(r, c) = scale * (2.0 * g.next_double() - 1.0);
    params.weights.push_back(std::move(w));
    params.biases.push_back(Vector::Zero(fan_out));
  }
  return params;
}

Matrix encode(const EmbedderParams& params, const Matrix& data) {
  check_input(params, data);
  Matrix a = data;
  for (int l = 0; l < params.bottleneck_index; ++l) {
    Matrix z = a * params.weights[l].transpose();
    z.rowwise() += params.biases[l].transpose();
    a = apply_activation(std::move(z), params.activation);
  }
  return a;
}

Matrix reconstruct(const EmbedderParams& params, const Matrix& data) {
  check_input(params, data);
  return forward_all(params, data).back();
}

double mse_loss(const Matrix& x, const Matrix& x_hat) {
  if (x.rows() != x_hat.rows() || x.cols() != x_hat.cols())
    throw ShapeError("mse_loss shapes differ: " + std::to_string(x.rows()) + "x" +
                     std::to_string(x.cols()) + " vs " + std::to_string(x_hat.rows()) + "x" +
                     std::to_string(x_hat.cols()));
  if (x.size() == 0) throw ConfigError("mse_loss of empty matrices");
  return (x - x_hat).array().square().sum() / static_cast<double>(x.size());
}

Gradients gradient(const EmbedderParams& params, const Matrix& batch) {
  check_input(params, batch);
  if (batch.rows() == 0) throw ConfigError("gradient needs a nonempty batch");

  const auto acts = forward_all(params, batch);
  const int L = params.num_layers();
  const double scale = 2.0 / static_cast<double>(batch.size());

  Gradients g;
  g.weights.resize(L);
  g.biases.resize(L);
  Matrix delta = scale * (acts[L] - batch);  // output layer is linear
  for (int l = L - 1; l >= 0; --l) {
    g.weights[l] = delta.transpose() * acts[l];
    g.biases[l] = delta.colwise().sum().transpose();
    if (l > 0)
      delta = (delta * params.weights[l]).cwiseProduct(activation_deriv(acts[l], params.activation));
  }
  return g;
}

std::pair<EmbedderParams, LossTrace> train_autoencoder(EmbedderParams params, const Matrix& data,
                                                       const TrainConfig& config) {
  check_input(params, data);
  if (data.rows() == 0) throw ConfigError("train_autoencoder needs nonempty data");
  if (config.epochs < 0) throw ConfigError("epochs must be >= 0");
  if (config.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (config.learning_rate < 0.0) throw ConfigError("learning_rate must be >= 0");

  const int L = params.num_layers();
  const auto n = data.rows();

  // Adam state, unused under plain SGD
  std::vector<Matrix> mw(L), vw(L);
  std::vector<Vector> mb(L), vb(L);
  for (int l = 0; l < L; ++l) {
    mw[l] = Matrix::Zero(params.weights[l].rows(), params.weights[l].cols());
    vw[l] = mw[l];
    mb[l] = Vector::Zero(params.biases[l].size());
    vb[l] = mb[l];
  }
  long step = 0;

  LossTrace trace;
  trace.per_epoch.reserve(config.epochs);
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) {
      auto g = rng::stream(config.seed ^ kShuffleStream, static_cast<std::uint64_t>(epoch), 0);
      for (Eigen::Index i = n - 1; i > 0; --i)
        std::swap(order[i], order[g.next_below(static_cast<std::uint64_t>(i) + 1)]);
    }

    double loss_sum = 0.0;
    for (Eigen::Index start = 0; start < n; start += config.batch_size) {
      const Eigen::Index rows = std::min<Eigen::Index>(config.batch_size, n - start);
      Matrix batch(rows, data.cols());
      for (Eigen::Index r = 0; r < rows; ++r) batch.row(r) = data.row(order[start + r]);

      const Matrix recon = reconstruct(params, batch);
      const double loss = mse_loss(batch, recon);
      if (!std::isfinite(loss))
        throw TrainingError("loss diverged at epoch " + std::to_string(epoch) +
                            "; retry with a smaller learning_rate");
      loss_sum += loss * static_cast<double>(rows);

      const Gradients g = gradient(params, batch);
      ++step;
      if (config.optimizer == TrainConfig::Optimizer::kSgd) {
        for (int l = 0; l < L; ++l) {
          params.weights[l] -= config.learning_rate * g.weights[l];
          params.biases[l] -= config.learning_rate * g.biases[l];
        }
      } else {
        const double c1 = 1.0 - std::pow(config.adam_beta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(config.adam_beta2, static_cast<double>(step));
        for (int l = 0; l < L; ++l) {
          mw[l] = config.adam_beta1 * mw[l] + (1.0 - config.adam_beta1) * g.weights[l];
          vw[l] = config.adam_beta2 * vw[l] +
                  (1.0 - config.adam_beta2) * g.weights[l].cwiseProduct(g.weights[l]);
          params.weights[l].array() -=
              config.learning_rate * (mw[l].array() / c1) / ((vw[l].array() / c2).sqrt() + config.adam_eps);
          mb[l] = config.adam_beta1 * mb[l] + (1.0 - config.adam_beta1) * g.biases[l];
          vb[l] = config.adam_beta2 * vb[l] +
                  (1.0 - config.adam_beta2) * g.biases[l].cwiseProduct(g.biases[l]);
          params.biases[l].array() -=
              config.learning_rate * (mb[l].array() / c1) / ((vb[l].array() / c2).sqrt() + config.adam_eps);
        }
      }
    }
    trace.per_epoch.push_back(loss_sum / static_cast<double>(n));
  }
  return {std::move(params), std::move(trace)};
}

void save_params_json(const std::filesystem::path& path, const EmbedderParams& params) {
  nlohmann::json j;
  j["layer_dims"] = params.layer_dims;
  j["activation"] = activation_name(params.activation);
  j["bottleneck_index"] = params.bottleneck_index;
  auto& jw = j["weights"] = nlohmann::json::array();
  for (const auto& w : params.weights) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < w.cols(); ++c) row.push_back(w(r, c));
      rows.push_back(std::move(row));
    }
    jw.push_back(std::move(rows));
  }
  auto& jb = j["biases"] = nlohmann::json::array();
  for (const auto& b : params.biases) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index i = 0; i < b.size(); ++i) row.push_back(b[i]);
    jb.push_back(std::move(row));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

EmbedderParams load_params_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad embedder json in " + path.string() + ": " + e.what());
  }
  EmbedderParams params;
  params.layer_dims = j.at("layer_dims").get<std::vector<int>>();
  params.activation = activation_from_name(j.at("activation").get<std::string>());
  params.bottleneck_index = j.at("bottleneck_index").get<int>();
  for (const auto& jw : j.at("weights")) {
    const auto rows = jw.size();
    const auto cols = rows ? jw[0].size() : 0;
    Matrix w(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) w(r, c) = jw[r][c].get<double>();
    params.weights.push_back(std::move(w));
  }
  for (const auto& jb : j.at("biases")) {
    Vector b(jb.size());
    for (std::size_t i = 0; i < jb.size(); ++i) b[i] = jb[i].get<double>();
    params.biases.push_back(std::move(b));
  }
  if (params.weights.size() + 1 != params.layer_dims.size() ||
      params.biases.size() != params.weights.size())
    throw IoError("embedder json layer counts disagree in " + path.string());
  return params;
}

}  // namespace divsel
