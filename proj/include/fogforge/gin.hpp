#pragma once

#include <string>
#include <vector>

#include "fogforge/nn/layers.hpp"

namespace fogforge {

struct GinConfig {
  int input_dim = 5;
  int hidden_dim = 64;
  int k_iterations = 2;
  /// Linear layers per MLP (including its output layer).
  int mlp_layers = 4;
  nn::Activation activation = nn::Activation::Tanh;
  bool batch_norm = true;
  double epsilon_init = 0.0;

  void validate() const;
  friend bool operator==(const GinConfig&, const GinConfig&) = default;
};

struct GraphEmbedding {
  nn::Var nodes;   // services x hidden_dim
  nn::Var pooled;  // 1 x hidden_dim, mean of `nodes`
};

/// Graph Isomorphism Network. h0 = act(MLP0(x)); each iteration k computes
/// h_k = act(MLP_k((1 + eps_k) * h_{k-1} + A h_{k-1})) with a learnable eps_k
/// and neighbour matrix A; the graph embedding is the mean of the last layer.
class GinEncoder {
 public:
  GinEncoder() = default;
  GinEncoder(nn::ParameterSet& params, const std::string& name, GinConfig config, Rng& rng);

  GraphEmbedding forward(const nn::Var& features, const nn::Matrix& adjacency,
                         nn::NormMode mode = nn::NormMode::Batch) const;

  const GinConfig& config() const { return config_; }
  const std::vector<nn::Var>& epsilons() const { return eps_; }
  const std::vector<nn::Mlp>& mlps() const { return mlps_; }

 private:
  GinConfig config_;
  std::vector<nn::Mlp> mlps_;  // k_iterations + 1
  std::vector<nn::Var> eps_;   // k_iterations
};

}  // namespace fogforge
