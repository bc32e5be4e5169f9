#pragma once

#include <vector>

#include "fogforge/nn/tensor.hpp"

namespace fogforge::nn {

struct AdamOptions {
  double learning_rate = 0.022;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction over a fixed parameter list.
class Adam {
 public:
  Adam(std::vector<Var> params, AdamOptions options = {});

  /// Applies one update from the parameters' accumulated gradients. Missing
  /// gradients count as zero.
  void step();

  double learning_rate() const { return options_.learning_rate; }
  void set_learning_rate(double lr);
  long long steps() const { return t_; }
  const std::vector<Var>& params() const { return params_; }

 private:
  std::vector<Var> params_;
  AdamOptions options_;
  std::vector<Matrix> m_, v_;
  long long t_ = 0;
};

/// lr = base * gamma^(floor(epoch / step_size)); call step() once per epoch.
class StepLr {
 public:
  StepLr(Adam& optimizer, int step_size, double gamma = 0.9);
  void step();
  int epoch() const { return epoch_; }

 private:
  Adam& optimizer_;
  double base_lr_;
  int step_size_;
  double gamma_;
  int epoch_ = 0;
};

/// Scales every gradient by max_norm / ||g||_2 when the global norm exceeds
/// max_norm. Returns the norm before clipping.
double clip_global_norm(const std::vector<Var>& params, double max_norm);

/// Same operation on plain gradient matrices.
double clip_global_norm(std::vector<Matrix>& grads, double max_norm);

}  // namespace fogforge::nn
