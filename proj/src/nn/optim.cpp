#include "fogforge/nn/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace fogforge::nn {

Adam::Adam(std::vector<Var> params, AdamOptions options) : params_(std::move(params)), options_(options) {
  set_learning_rate(options_.learning_rate);
  for (const Var& p : params_) {
    m_.push_back(Matrix::Zero(p.rows(), p.cols()));
    v_.push_back(Matrix::Zero(p.rows(), p.cols()));
  }
}

void Adam::set_learning_rate(double lr) {
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  options_.learning_rate = lr;
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const Matrix g = params_[i].grad();
    m_[i] = options_.beta1 * m_[i] + (1.0 - options_.beta1) * g;
    v_[i] = options_.beta2 * v_[i] + (1.0 - options_.beta2) * g.cwiseAbs2();
    const Matrix m_hat = m_[i] / bc1;
    const Matrix v_hat = v_[i] / bc2;
    params_[i].mutable_value().array() -=
        options_.learning_rate * m_hat.array() / (v_hat.array().sqrt() + options_.eps);
  }
}

StepLr::StepLr(Adam& optimizer, int step_size, double gamma)
    : optimizer_(optimizer), base_lr_(optimizer.learning_rate()), step_size_(step_size), gamma_(gamma) {
  if (step_size_ < 1) throw std::invalid_argument("scheduler step size must be >= 1");
  if (!(gamma_ > 0.0)) throw std::invalid_argument("scheduler gamma must be > 0");
}

void StepLr::step() {
  ++epoch_;
  optimizer_.set_learning_rate(base_lr_ * std::pow(gamma_, static_cast<double>(epoch_ / step_size_)));
}

double clip_global_norm(const std::vector<Var>& params, double max_norm) {
  if (!(max_norm > 0.0)) throw std::invalid_argument("max_norm must be > 0");
  double sq = 0.0;
  for (const Var& p : params)
    if (p.has_grad()) sq += p.node()->grad.squaredNorm();
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double k = max_norm / norm;
    for (const Var& p : params)
      if (p.has_grad()) p.node()->grad *= k;
  }
  return norm;
}

double clip_global_norm(std::vector<Matrix>& grads, double max_norm) {
  if (!(max_norm > 0.0)) throw std::invalid_argument("max_norm must be > 0");
  double sq = 0.0;
  for (const Matrix& g : grads) sq += g.squaredNorm();
  const double norm = std::sqrt(sq);
  if (norm > max_norm)
    for (Matrix& g : grads) g *= max_norm / norm;
  return norm;
}

}  // namespace fogforge::nn
