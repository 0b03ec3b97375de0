#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <utility>
#include <vector>

#include "divsel/common.hpp"

namespace divsel {

enum class Activation { kTanh, kRelu, kIdentity };

std::string_view activation_name(Activation a);
Activation activation_from_name(std::string_view name);

// Symmetric MLP autoencoder. layer_dims runs input..bottleneck..output and must
// be mirror-symmetric with the bottleneck (the minimum) in the middle.
// Hidden layers share one activation; the output layer is linear.
struct EmbedderParams {
  std::vector<int> layer_dims;
  std::vector<Matrix> weights;  // weights[l] is layer_dims[l+1] x layer_dims[l]
  std::vector<Vector> biases;   // biases[l] has layer_dims[l+1] entries
  Activation activation = Activation::kTanh;
  int bottleneck_index = 0;

  int num_layers() const { return static_cast<int>(weights.size()); }
  int input_dim() const { return layer_dims.front(); }
  int embedding_dim() const { return layer_dims[bottleneck_index]; }
};

struct TrainConfig {
  int epochs = 100;
  int batch_size = 32;
  double learning_rate = 0.01;
  enum class Optimizer { kSgd, kAdam } optimizer = Optimizer::kAdam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double weight_init_scale = 1.0;
  std::uint64_t seed = 0;
  bool shuffle = true;
};

struct LossTrace {
  std::vector<double> per_epoch;  // mean reconstruction loss per epoch
};

// Gradient of mse_loss(reconstruct(params, batch), batch), same shapes as params.
struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
};

EmbedderParams init_embedder(const std::vector<int>& layer_dims, Activation activation,
                             std::uint64_t seed, double weight_init_scale = 1.0);

// Forward pass up to and including the bottleneck layer; n x d output.
Matrix encode(const EmbedderParams& params, const Matrix& data);

// Full forward pass; output shape equals input shape.
Matrix reconstruct(const EmbedderParams& params, const Matrix& data);

// Mean over all entries of the squared difference.
double mse_loss(const Matrix& x, const Matrix& x_hat);

Gradients gradient(const EmbedderParams& params, const Matrix& batch);

// Mini-batch gradient descent on the reconstruction loss. Deterministic given
// config.seed; throws TrainingError naming the epoch if the loss goes non-finite.
std::pair<EmbedderParams, LossTrace> train_autoencoder(EmbedderParams params,
                                                       const Matrix& data,
                                                       const TrainConfig& config);

void save_params_json(const std::filesystem::path& path, const EmbedderParams& params);
EmbedderParams load_params_json(const std::filesystem::path& path);

}  // namespace divsel
