#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>

#include "fogforge/env.hpp"
#include "fogforge/gin.hpp"
#include "fogforge/nn/checkpoint.hpp"
#include "fogforge/nn/layers.hpp"
#include "fogforge/rng.hpp"

namespace fogforge {

class TerminalStateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct PolicyConfig {
  /// Services per application; fixes the allocation-feature width.
  int service_count = 9;
  GinConfig gin{};
  int actor_width = 32;
  int actor_hidden_layers = 5;
  int critic_width = 32;
  int critic_hidden_layers = 3;
  nn::Activation activation = nn::Activation::Tanh;
  std::uint64_t init_seed = 1;

  int service_actor_input() const { return 2 * gin.hidden_dim; }
  int device_actor_input() const { return kDeviceFeatures + kServiceFeatures + service_count; }
  int device_critic_input() const { return gin.hidden_dim + kServiceFeatures + service_count; }

  void validate() const;
  std::string to_json() const;
  static PolicyConfig from_json(const std::string& text);
  friend bool operator==(const PolicyConfig&, const PolicyConfig&) = default;
};

enum class SelectMode { Sample, Greedy };

struct ServiceHead {
  GraphEmbedding embedding;
  nn::Var log_probs;  // services x 1, -inf where masked
  nn::Var value;      // 1 x 1
};

struct DeviceHead {
  nn::Var log_probs;  // devices x 1
  nn::Var value;      // 1 x 1
};

struct Decision {
  std::size_t service = 0;
  int device = 0;
  double log_prob_service = 0.0;
  double log_prob_device = 0.0;
  double value_service = 0.0;
  double value_device = 0.0;
};

/// GIN encoder plus two actor-critic pairs: one scores eligible services from
/// node and graph embeddings, the other scores every device for the chosen
/// service from device, candidate and allocation features.
class PolicyModel {
 public:
  explicit PolicyModel(PolicyConfig config);
  PolicyModel(const PolicyModel&) = delete;
  PolicyModel& operator=(const PolicyModel&) = delete;
  PolicyModel(PolicyModel&&) = default;
  PolicyModel& operator=(PolicyModel&&) = default;

  const PolicyConfig& config() const { return config_; }
  nn::ParameterSet& params() { return *params_; }
  const nn::ParameterSet& params() const { return *params_; }

  /// GIN input rows: service features followed by degree features.
  nn::Matrix node_features(const EnvState& state) const;

  ServiceHead service_head(const EnvState& state, std::span<const std::uint8_t> mask,
                           nn::NormMode mode = nn::NormMode::Batch) const;
  DeviceHead device_head(const EnvState& state, std::size_t service, const GraphEmbedding& embedding) const;

  /// Throws TerminalStateError when no service is eligible.
  Decision select_service(const EnvState& state, std::span<const std::uint8_t> mask, SelectMode mode,
                          Rng* rng) const;
  Decision select_device(const EnvState& state, std::size_t service, SelectMode mode, Rng* rng) const;
  /// Both decisions from one embedding pass. Records no graph.
  Decision act(const EnvState& state, SelectMode mode, Rng* rng) const;

  PolicyModel clone() const;
  bool same_architecture(const PolicyModel& other) const { return config_ == other.config_; }

  nn::Checkpoint to_checkpoint() const;
  static PolicyModel from_checkpoint(const nn::Checkpoint& ckpt);
  void save(const std::filesystem::path& path) const;
  static PolicyModel load(const std::filesystem::path& path);

 private:
  void check_state(const EnvState& state) const;

  PolicyConfig config_;
  std::unique_ptr<nn::ParameterSet> params_;
  GinEncoder gin_;
  nn::Mlp actor_s_, critic_s_, actor_d_, critic_d_;
};

/// Index drawn from a column of log-probabilities (sample) or its argmax.
std::size_t choose(const nn::Matrix& log_probs, SelectMode mode, Rng* rng);

}  // namespace fogforge
