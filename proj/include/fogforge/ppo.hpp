#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fogforge/env.hpp"
#include "fogforge/nn/optim.hpp"
#include "fogforge/policy.hpp"

namespace fogforge {

class NumericDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PpoConfig {
  int update_epochs = 2;
  double clip_range = 0.25;
  double policy_coef = 3.0;
  double value_coef = 2.0;
  double entropy_coef = 0.023;
  /// Global gradient-norm clip; <= 0 disables it.
  double max_grad_norm = 0.0;
  bool normalize_advantages = false;
};

struct Transition {
  EnvState state;
  std::vector<std::uint8_t> mask;
  std::size_t service = 0;
  int device = 0;
  double log_prob_service = 0.0;
  double log_prob_device = 0.0;
  double value_service = 0.0;
  double value_device = 0.0;
  double reward = 0.0;
  bool done = false;
};

struct Trajectory {
  std::vector<Transition> steps;

  double total_reward() const;
};

/// Undiscounted reward-to-go for every step.
std::vector<double> reward_to_go(const Trajectory& trajectory);

/// Loss terms for one pass over a batch. `total` is the average of the two
/// actor-critic losses c_p * policy - ... ; see ppo_loss.
struct PpoLoss {
  nn::Var total;
  nn::Var policy_service, policy_device;
  nn::Var value_service, value_device;
  nn::Var entropy_service, entropy_device;
  std::vector<double> ratio_service, ratio_device;
};

/// For each actor-critic i: L_i = c_p * -mean(min(r A, clip(r, 1 -+ eps) A))
/// + c_v * mean((V - G)^2) - c_e * mean(H), with A = G - V_old and r the
/// new/old probability ratio. total = (L_service + L_device) / 2.
PpoLoss ppo_loss(const PolicyModel& model, std::span<const Trajectory> batch, const PpoConfig& config,
                 nn::NormMode mode = nn::NormMode::Batch);

struct LossReport {
  double total = 0.0;
  double policy = 0.0;   // mean of both actors
  double value = 0.0;    // mean of both critics
  double entropy = 0.0;  // mean of both actors
  double grad_norm = 0.0;
  int epochs = 0;
};

/// update_epochs passes, one optimizer step each over every parameter.
/// Throws NumericDivergence (parameters untouched for that epoch) when the
/// loss or a gradient is not finite.
LossReport ppo_update(PolicyModel& model, nn::Adam& optimizer, std::span<const Trajectory> batch,
                      const PpoConfig& config);

}  // namespace fogforge
