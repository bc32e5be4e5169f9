#pragma once

#include <map>
#include <string>
#include <vector>

#include "fogforge/nn/tensor.hpp"
#include "fogforge/rng.hpp"

namespace fogforge::nn {

enum class Activation { Tanh, Relu, Identity };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation a);
Var activate(const Var& x, Activation a);

/// Named parameters (trainable) and buffers (non-trainable state such as
/// batch-norm running statistics). Registration order is the canonical
/// order for optimizers and checkpoints.
class ParameterSet {
 public:
  Var add_parameter(const std::string& name, Matrix init);
  Var add_buffer(const std::string& name, Matrix init);

  const std::vector<std::pair<std::string, Var>>& parameters() const { return params_; }
  const std::vector<std::pair<std::string, Var>>& buffers() const { return buffers_; }
  std::vector<Var> trainable() const;

  void zero_grad();

  /// Name -> value for every parameter and buffer.
  std::map<std::string, Matrix> state() const;
  /// Copies values by name. Throws DimensionError when a name is missing or
  /// a shape differs.
  void load_state(const std::map<std::string, Matrix>& state);

 private:
  void check_unique(const std::string& name) const;
  std::vector<std::pair<std::string, Var>> params_;
  std::vector<std::pair<std::string, Var>> buffers_;
};

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)).
Matrix fan_in_uniform(Eigen::Index rows, Eigen::Index cols, Eigen::Index fan_in, Rng& rng);

class Linear {
 public:
  Linear() = default;
  Linear(ParameterSet& params, const std::string& name, int in, int out, Rng& rng);

  /// x: batch x in -> batch x out
  Var forward(const Var& x) const;

  Var weight;  // in x out
  Var bias;    // 1 x out
};

enum class NormMode {
  Batch,        // batch statistics
  BatchUpdate,  // batch statistics and a running-average update
  Running,      // running statistics (inference)
};

class BatchNorm {
 public:
  BatchNorm() = default;
  BatchNorm(ParameterSet& params, const std::string& name, int features, double momentum = 0.1,
            double eps = 1e-5);

  /// BatchUpdate mutates the running buffers; never call it concurrently.
  Var forward(const Var& x, NormMode mode) const;

  Var gamma, beta;
  Var running_mean, running_var;  // buffers
  double momentum = 0.1;
  double eps = 1e-5;
};

struct MlpSpec {
  int input_dim = 1;
  std::vector<int> hidden_dims;
  int output_dim = 1;
  Activation activation = Activation::Tanh;
  bool batch_norm = false;

  void validate() const;
};

/// Affine + (batch norm) + activation per hidden layer, then a final affine
/// output layer.
class Mlp {
 public:
  Mlp() = default;
  Mlp(ParameterSet& params, const std::string& name, MlpSpec spec, Rng& rng);

  Var forward(const Var& x, NormMode mode = NormMode::Batch) const;
  const MlpSpec& spec() const { return spec_; }
  const std::vector<Linear>& layers() const { return layers_; }

 private:
  MlpSpec spec_;
  std::vector<Linear> layers_;
  std::vector<BatchNorm> norms_;
};

}  // namespace fogforge::nn
