#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fogforge/model.hpp"
#include "fogforge/nn/matrix.hpp"

namespace fogforge {

class EnvironmentFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline constexpr int kServiceFeatures = 3;  // exec time, inbound latency, placed flag
inline constexpr int kDeviceFeatures = 4;   // latency, speed, cost, hosted share
inline constexpr int kGraphFeatures = 2;    // in-degree, out-degree

/// Immutable per-episode data shared by every state of one environment.
struct EnvContext {
  Application app;
  DeviceSet devices;
  NormalizationBounds bounds;
  int cloud = 0;

  /// Symmetric 0/1 neighbour matrix over services (in- and out-edges).
  nn::Matrix adjacency;
  /// Per-service normalized in/out degree, services x kGraphFeatures.
  nn::Matrix degree_features;

  double latency_scale = 1.0;
  double speed_scale = 1.0;
  double cost_scale = 1.0;
  double exec_scale = 1.0;
  double inbound_scale = 1.0;

  EnvContext(Application app, DeviceSet devices);
};

/// Observation of the placement process. All feature matrices are in [0,1].
struct EnvState {
  std::shared_ptr<const EnvContext> context;
  Placement placement;
  std::vector<std::uint8_t> placed;
  /// services x kServiceFeatures
  nn::Matrix service_features;
  /// devices x kDeviceFeatures
  nn::Matrix device_features;
  /// Normalized latency of each service's current host.
  nn::Matrix allocation;  // 1 x services
  ObjectivePoint objectives;
  int steps = 0;

  std::size_t service_count() const { return placement.device_of.size(); }
  std::size_t device_count() const { return context->devices.size(); }
  bool done() const;
};

struct Action {
  std::size_t service = 0;  // flat row-major index
  int device = 0;
};

struct RewardBreakdown {
  double r_time = 0.0;
  double r_cost = 0.0;
  double r_total = 0.0;
};

struct StepResult {
  EnvState state;
  RewardBreakdown reward;
  bool done = false;
};

/// Services not yet re-placed whose predecessors all have been.
std::vector<std::uint8_t> eligible_services(const EnvState& state);

/// Weighted normalized reward from raw objective deltas.
RewardBreakdown make_reward(double r_time, double r_cost, const WeightVector& weights,
                            const NormalizationBounds& bounds);

/// Sequential placement environment. Starts with every service on the cloud
/// and re-places one eligible service per step.
class PlacementEnv {
 public:
  PlacementEnv(Application app, DeviceSet devices);
  explicit PlacementEnv(std::shared_ptr<const EnvContext> context);

  const EnvState& reset();
  /// Throws EnvironmentFault on an illegal action or a finished episode.
  StepResult step(const Action& action, const WeightVector& weights);

  const EnvState& state() const { return state_; }
  const std::shared_ptr<const EnvContext>& context() const { return context_; }

 private:
  std::shared_ptr<const EnvContext> context_;
  EnvState state_;
};

/// Builds the state for an arbitrary partial placement.
EnvState make_state(const std::shared_ptr<const EnvContext>& context, Placement placement,
                    std::vector<std::uint8_t> placed, int steps);

/// JSON-lines trajectory dump: one object per step with keys
/// step, service, device, r_time, r_cost, r_total, t_app, cost. Step 0 is the
/// initial cloud placement, reported with r_time = -T_app(initial).
class TrajectoryWriter {
 public:
  explicit TrajectoryWriter(std::ostream& out) : out_(out) {}
  void initial(const EnvState& state, const WeightVector& weights);
  void record(const Action& action, const StepResult& result);

 private:
  std::ostream& out_;
};

}  // namespace fogforge
