#include "fogforge/nn/layers.hpp"

#include <cmath>

namespace fogforge::nn {

Activation activation_from_string(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "relu") return Activation::Relu;
  if (name == "identity") return Activation::Identity;
  throw std::invalid_argument("unknown activation '" + name + "'");
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
    case Activation::Identity: return "identity";
  }
  return "identity";
}

Var activate(const Var& x, Activation a) {
  switch (a) {
    case Activation::Tanh: return tanh(x);
    case Activation::Relu: return relu(x);
    case Activation::Identity: return x;
  }
  return x;
}

void ParameterSet::check_unique(const std::string& name) const {
  for (const auto& [n, v] : params_)
    if (n == name) throw std::invalid_argument("duplicate parameter name " + name);
  for (const auto& [n, v] : buffers_)
    if (n == name) throw std::invalid_argument("duplicate buffer name " + name);
}

Var ParameterSet::add_parameter(const std::string& name, Matrix init) {
  check_unique(name);
  Var v = Var::parameter(std::move(init));
  params_.emplace_back(name, v);
  return v;
}

Var ParameterSet::add_buffer(const std::string& name, Matrix init) {
  check_unique(name);
  Var v = Var::constant(std::move(init));
  buffers_.emplace_back(name, v);
  return v;
}

std::vector<Var> ParameterSet::trainable() const {
  std::vector<Var> out;
  out.reserve(params_.size());
  for (const auto& [n, v] : params_) out.push_back(v);
  return out;
}

void ParameterSet::zero_grad() {
  for (auto& [n, v] : params_) v.zero_grad();
}

std::map<std::string, Matrix> ParameterSet::state() const {
  std::map<std::string, Matrix> out;
  for (const auto& [n, v] : params_) out.emplace(n, v.value());
  for (const auto& [n, v] : buffers_) out.emplace(n, v.value());
  return out;
}

void ParameterSet::load_state(const std::map<std::string, Matrix>& state) {
  auto copy = [&](const std::string& name, Var& v) {
    auto it = state.find(name);
    if (it == state.end()) throw DimensionError("state is missing tensor '" + name + "'");
    if (it->second.rows() != v.rows() || it->second.cols() != v.cols())
      throw DimensionError("tensor '" + name + "' has shape " + std::to_string(it->second.rows()) + "x" +
                           std::to_string(it->second.cols()) + ", expected " + std::to_string(v.rows()) + "x" +
                           std::to_string(v.cols()));
  };
  // Validate everything before mutating anything.
  for (auto& [n, v] : params_) copy(n, v);
  for (auto& [n, v] : buffers_) copy(n, v);
  for (auto& [n, v] : params_) v.mutable_value() = state.at(n);
  for (auto& [n, v] : buffers_) v.mutable_value() = state.at(n);
}

Matrix fan_in_uniform(Eigen::Index rows, Eigen::Index cols, Eigen::Index fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<Eigen::Index>(fan_in, 1)));
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = (2.0 * rng.uniform() - 1.0) * bound;
  return m;
}

Linear::Linear(ParameterSet& params, const std::string& name, int in, int out, Rng& rng) {
  weight = params.add_parameter(name + ".weight", fan_in_uniform(in, out, in, rng));
  bias = params.add_parameter(name + ".bias", fan_in_uniform(1, out, in, rng));
}

Var Linear::forward(const Var& x) const {
  if (x.cols() != weight.rows())
    throw DimensionError("linear layer expects " + std::to_string(weight.rows()) + " inputs, got " +
                         std::to_string(x.cols()));
  Var y = add_row(matmul(x, weight), bias);
#ifndef NDEBUG
  if (!y.value().allFinite()) throw std::domain_error("non-finite activation in linear layer");
#endif
  return y;
}

BatchNorm::BatchNorm(ParameterSet& params, const std::string& name, int features, double momentum_in,
                     double eps_in)
    : momentum(momentum_in), eps(eps_in) {
  gamma = params.add_parameter(name + ".gamma", Matrix::Ones(1, features));
  beta = params.add_parameter(name + ".beta", Matrix::Zero(1, features));
  running_mean = params.add_buffer(name + ".running_mean", Matrix::Zero(1, features));
  running_var = params.add_buffer(name + ".running_var", Matrix::Ones(1, features));
}

Var BatchNorm::forward(const Var& x, NormMode mode) const {
  if (mode == NormMode::Running) {
    const Matrix inv_std = (running_var.value().array() + eps).rsqrt().matrix();
    const Matrix shift = -running_mean.value().cwiseProduct(inv_std);
    // y = (x * inv_std + shift) * gamma + beta, with constant statistics.
    Var normalized = add_row(mul(x, Var::constant(inv_std.replicate(x.rows(), 1))), Var::constant(shift));
    return add_row(mul(normalized, repeat_rows(gamma, x.rows())), beta);
  }
  Matrix mu, var;
  Var y = batch_norm(x, gamma, beta, eps, &mu, &var);
  if (mode == NormMode::BatchUpdate) {
    const double count = static_cast<double>(x.rows());
    const Matrix unbiased = count > 1 ? Matrix(var * (count / (count - 1.0))) : var;
    Var rm = running_mean, rv = running_var;
    rm.mutable_value() = (1.0 - momentum) * running_mean.value() + momentum * mu;
    rv.mutable_value() = (1.0 - momentum) * running_var.value() + momentum * unbiased;
  }
  return y;
}

void MlpSpec::validate() const {
  if (input_dim < 1 || output_dim < 1) throw DimensionError("MLP dimensions must be >= 1");
  for (int h : hidden_dims)
    if (h < 1) throw DimensionError("MLP hidden dimensions must be >= 1");
}

Mlp::Mlp(ParameterSet& params, const std::string& name, MlpSpec spec, Rng& rng) : spec_(std::move(spec)) {
  spec_.validate();
  int in = spec_.input_dim;
  for (std::size_t i = 0; i < spec_.hidden_dims.size(); ++i) {
    const int out = spec_.hidden_dims[i];
    layers_.emplace_back(params, name + ".fc" + std::to_string(i), in, out, rng);
    if (spec_.batch_norm) norms_.emplace_back(params, name + ".bn" + std::to_string(i), out);
    in = out;
  }
  layers_.emplace_back(params, name + ".out", in, spec_.output_dim, rng);
}

Var Mlp::forward(const Var& x, NormMode mode) const {
  if (x.cols() != spec_.input_dim)
    throw DimensionError("MLP expects input width " + std::to_string(spec_.input_dim) + ", got " +
                         std::to_string(x.cols()));
  Var h = x;
  for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
    h = layers_[i].forward(h);
    if (spec_.batch_norm) h = norms_[i].forward(h, mode);
    h = activate(h, spec_.activation);
  }
  return layers_.back().forward(h);
}

}  // namespace fogforge::nn
