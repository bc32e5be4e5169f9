#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fogforge/policy.hpp"
#include "fogforge/ppo.hpp"
#include "fogforge/scenario.hpp"

namespace fogforge {

struct TrainConfig {
  int episodes = 150;
  int envs_per_episode = 40;
  WeightVector weights{0.5, 0.5};
  std::uint64_t seed = 1;
  int eval_interval = 5;
  int train_size = 40;
  int test_size = 8;
  int validation_size = 4;
  int threads = 1;

  double learning_rate = 0.022;
  double lr_gamma = 0.9;
  /// Episodes between learning-rate decays.
  int lr_step = 10;
  PpoConfig ppo{};

  /// Architecture; service_count is taken from the scenario config.
  PolicyConfig policy{};
  ScenarioConfig scenario{};

  void validate() const;
  /// Full paper-scale settings: 150 episodes x 40 envs, 1000 devices, 9x9.
  static TrainConfig paper_scale();
  /// Desk-scale acceptance settings: 60 episodes x 8 envs, 20 devices, 3x3.
  static TrainConfig desk_scale();

  std::string to_json() const;
  /// Keys absent from `text` keep the values already in `base`.
  static TrainConfig from_json(const std::string& text, TrainConfig base);
  static TrainConfig from_json(const std::string& text);
};

struct Datasets {
  std::vector<Scenario> train, test, validation;
};

/// Scenario seeds are derived per split and index; the three splits never
/// share a seed.
Datasets make_datasets(const ScenarioConfig& base, int train_size, int test_size, int validation_size,
                       std::uint64_t seed);

struct EvalSummary {
  double mean_objective = 0.0;  // weighted, lower is better
  ObjectivePoint mean_point;
};

/// Greedy placement over every application of every scenario.
EvalSummary evaluate_policy(const PolicyModel& model, const std::vector<Scenario>& scenarios,
                            const WeightVector& weights);

struct EpisodeMetrics {
  int episode = 0;
  double mean_return = 0.0;     // mean undiscounted weighted return per env
  double mean_objective = 0.0;  // mean final weighted objective of the rollouts
  LossReport loss;
  double learning_rate = 0.0;
  std::optional<double> test_objective;
  double best_objective = 0.0;
};

std::string to_json_line(const EpisodeMetrics& m);

using MetricsSink = std::function<void(const EpisodeMetrics&)>;

struct TrainResult {
  PolicyModel best;
  double best_objective = 0.0;
  int best_episode = 0;  // 0 means the initial model
  int episodes_run = 0;
  std::vector<EpisodeMetrics> history;
  bool diverged = false;
  std::string diagnostic;
};

/// PPO training over the train split with periodic greedy evaluation on the
/// test split. Returns the best-evaluated model. When `initial` is given the
/// run starts from a copy of it with a fresh optimizer.
TrainResult train(const TrainConfig& config, const Datasets& data, const PolicyModel* initial = nullptr,
                  const MetricsSink& sink = {});

/// Initial model for a child weight vector: an exact parameter copy.
PolicyModel transfer_parameters(const PolicyModel& parent);
/// Same, after checking that `child` describes the parent's architecture
/// (init_seed aside). Throws ConfigError on mismatch.
PolicyModel transfer_parameters(const PolicyModel& parent, const PolicyConfig& child);

struct InferenceResult {
  Placement placement;
  /// (service, device) in allocation order.
  std::vector<std::pair<std::size_t, int>> order;
  ObjectivePoint point;
};

/// Greedy sequential placement of every service.
InferenceResult infer_placement(const PolicyModel& model, const Application& app, const DeviceSet& devices);

struct SweepStage {
  WeightVector weights;
  int parent = -1;  // index into the plan, -1 for the root
  int depth = 0;
};

struct SweepPlan {
  std::vector<SweepStage> stages;

  /// Root (0.5,0.5); (0.25,0.75) and (0.75,0.25) from the root; (0,1) from
  /// (0.25,0.75) and (1,0) from (0.75,0.25).
  static SweepPlan standard();
  /// Throws ConfigError unless every parent precedes its children.
  void validate() const;
};

struct SweepEntry {
  WeightVector weights;
  int parent = -1;
  int episodes = 0;
  bool ok = false;
  std::string error;
  std::optional<PolicyModel> model;
  EvalSummary validation;
  bool dominated = false;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  int total_episodes = 0;
};

using StageSink = std::function<void(std::size_t stage, const EpisodeMetrics&)>;

/// Trains every stage, children from their parent's best model with half the
/// root's episode budget, then evaluates each on the validation split.
SweepResult sweep(const SweepPlan& plan, const TrainConfig& config, const Datasets& data,
                  const StageSink& sink = {});

/// Runs `fn(i)` for i in [0, n) on up to `threads` threads.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace fogforge
