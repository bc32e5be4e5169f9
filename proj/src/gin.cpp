#include "fogforge/gin.hpp"

namespace fogforge {

void GinConfig::validate() const {
  if (input_dim < 1 || hidden_dim < 1) throw nn::DimensionError("GIN dimensions must be >= 1");
  if (k_iterations < 1) throw nn::DimensionError("GIN needs at least one iteration");
  if (mlp_layers < 1) throw nn::DimensionError("GIN MLPs need at least one layer");
}

GinEncoder::GinEncoder(nn::ParameterSet& params, const std::string& name, GinConfig config, Rng& rng)
    : config_(config) {
  config_.validate();
  for (int k = 0; k <= config_.k_iterations; ++k) {
    nn::MlpSpec spec;
    spec.input_dim = k == 0 ? config_.input_dim : config_.hidden_dim;
    spec.hidden_dims.assign(static_cast<std::size_t>(config_.mlp_layers - 1), config_.hidden_dim);
    spec.output_dim = config_.hidden_dim;
    spec.activation = config_.activation;
    spec.batch_norm = config_.batch_norm;
    mlps_.emplace_back(params, name + ".mlp" + std::to_string(k), spec, rng);
    if (k > 0)
      eps_.push_back(params.add_parameter(name + ".eps" + std::to_string(k),
                                          nn::Matrix::Constant(1, 1, config_.epsilon_init)));
  }
}

GraphEmbedding GinEncoder::forward(const nn::Var& features, const nn::Matrix& adjacency,
                                   nn::NormMode mode) const {
  const Eigen::Index n = features.rows();
  if (features.cols() != config_.input_dim)
    throw nn::DimensionError("GIN expects " + std::to_string(config_.input_dim) + " node features, got " +
                             std::to_string(features.cols()));
  if (adjacency.rows() != n || adjacency.cols() != n)
    throw nn::DimensionError("adjacency must be " + std::to_string(n) + "x" + std::to_string(n));

  const nn::Var adj = nn::Var::constant(adjacency);
  nn::Var h = nn::activate(mlps_[0].forward(features, mode), config_.activation);
  for (int k = 1; k <= config_.k_iterations; ++k) {
    const nn::Var self = nn::scale_by(h, nn::add_scalar(eps_[static_cast<std::size_t>(k - 1)], 1.0));
    const nn::Var aggregated = nn::add(self, nn::matmul(adj, h));
    h = nn::activate(mlps_[static_cast<std::size_t>(k)].forward(aggregated, mode), config_.activation);
  }
  return {h, nn::mean_rows(h)};
}

}  // namespace fogforge
