#include "fogforge/env.hpp"

#include <algorithm>
#include <ostream>

#include <json.hpp>

namespace fogforge {

namespace {
double positive_or_one(double v) { return v > 0.0 ? v : 1.0; }
}  // namespace

EnvContext::EnvContext(Application app_in, DeviceSet devices_in)
    : app(std::move(app_in)), devices(std::move(devices_in)) {
  validate_devices(devices);
  bounds = default_bounds(app, devices);
  cloud = cloud_id(devices);

  const auto n = static_cast<Eigen::Index>(app.service_count());
  adjacency = nn::Matrix::Zero(n, n);
  degree_features = nn::Matrix::Zero(n, kGraphFeatures);
  std::size_t max_in = 0, max_out = 0, max_deg = 1;
  for (std::size_t v = 0; v < app.service_count(); ++v) {
    max_in = std::max(max_in, app.predecessors()[v].size());
    max_out = std::max(max_out, app.successors()[v].size());
    for (std::size_t u : app.successors()[v]) {
      adjacency(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) = 1.0;
      adjacency(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = 1.0;
    }
  }
  max_deg = std::max<std::size_t>({max_deg, max_in, max_out});
  for (std::size_t v = 0; v < app.service_count(); ++v) {
    degree_features(static_cast<Eigen::Index>(v), 0) = static_cast<double>(app.predecessors()[v].size()) / static_cast<double>(max_deg);
    degree_features(static_cast<Eigen::Index>(v), 1) = static_cast<double>(app.successors()[v].size()) / static_cast<double>(max_deg);
  }

  double max_lat = 0.0, max_speed = 0.0, max_cost = 0.0, min_speed = devices.front().speed;
  for (const Device& d : devices) {
    max_lat = std::max(max_lat, d.latency);
    max_speed = std::max(max_speed, d.speed);
    max_cost = std::max(max_cost, d.cost);
    min_speed = std::min(min_speed, d.speed);
  }
  double max_ops = 0.0;
  for (double o : app.ops()) max_ops = std::max(max_ops, o);
  latency_scale = positive_or_one(max_lat);
  speed_scale = positive_or_one(max_speed);
  cost_scale = positive_or_one(max_cost);
  exec_scale = positive_or_one(max_ops / min_speed);
  inbound_scale = positive_or_one(max_lat * static_cast<double>(1 + max_in));
}

bool EnvState::done() const {
  return std::all_of(placed.begin(), placed.end(), [](std::uint8_t p) { return p != 0; });
}

EnvState make_state(const std::shared_ptr<const EnvContext>& context, Placement placement,
                    std::vector<std::uint8_t> placed, int steps) {
  const EnvContext& ctx = *context;
  const Application& app = ctx.app;
  const std::size_t n = app.service_count();
  if (placed.size() != n) throw EnvironmentFault("placed mask has wrong length");

  EnvState s;
  s.context = context;
  s.objectives = evaluate(app, placement, ctx.devices);
  const std::vector<double> inbound = latency_contributions(app, placement, ctx.devices);

  const auto rows = static_cast<Eigen::Index>(n);
  s.service_features.resize(rows, kServiceFeatures);
  s.allocation.resize(1, rows);
  std::vector<double> hosted(ctx.devices.size(), 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    const Device& host = ctx.devices[static_cast<std::size_t>(placement.device_of[v])];
    const auto r = static_cast<Eigen::Index>(v);
    const double access = app.service(v).col == 0 ? host.latency : 0.0;
    s.service_features(r, 0) = app.ops(v) / host.speed / ctx.exec_scale;
    s.service_features(r, 1) = (access + inbound[v]) / ctx.inbound_scale;
    s.service_features(r, 2) = placed[v] ? 1.0 : 0.0;
    s.allocation(0, r) = host.latency / ctx.latency_scale;
    hosted[static_cast<std::size_t>(host.id)] += 1.0;
  }

  s.device_features.resize(static_cast<Eigen::Index>(ctx.devices.size()), kDeviceFeatures);
  const double share = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  for (std::size_t k = 0; k < ctx.devices.size(); ++k) {
    const Device& d = ctx.devices[k];
    const auto r = static_cast<Eigen::Index>(k);
    s.device_features(r, 0) = d.latency / ctx.latency_scale;
    s.device_features(r, 1) = d.speed / ctx.speed_scale;
    s.device_features(r, 2) = d.cost / ctx.cost_scale;
    s.device_features(r, 3) = hosted[k] * share;
  }

  s.placement = std::move(placement);
  s.placed = std::move(placed);
  s.steps = steps;
  return s;
}

std::vector<std::uint8_t> eligible_services(const EnvState& state) {
  const Application& app = state.context->app;
  std::vector<std::uint8_t> mask(state.service_count(), 0);
  for (std::size_t v = 0; v < mask.size(); ++v) {
    if (state.placed[v]) continue;
    const auto& preds = app.predecessors()[v];
    mask[v] = std::all_of(preds.begin(), preds.end(), [&](std::size_t u) { return state.placed[u] != 0; }) ? 1 : 0;
  }
  return mask;
}

RewardBreakdown make_reward(double r_time, double r_cost, const WeightVector& weights,
                            const NormalizationBounds& bounds) {
  return {r_time, r_cost, weights.time * r_time / bounds.max_time + weights.cost * r_cost / bounds.max_cost};
}

PlacementEnv::PlacementEnv(Application app, DeviceSet devices)
    : PlacementEnv(std::make_shared<const EnvContext>(std::move(app), std::move(devices))) {}

PlacementEnv::PlacementEnv(std::shared_ptr<const EnvContext> context) : context_(std::move(context)) {
  reset();
}

const EnvState& PlacementEnv::reset() {
  state_ = make_state(context_, uniform_placement(context_->app, context_->cloud),
                      std::vector<std::uint8_t>(context_->app.service_count(), 0), 0);
  return state_;
}

StepResult PlacementEnv::step(const Action& action, const WeightVector& weights) {
  const std::size_t n = state_.service_count();
  if (state_.done()) throw EnvironmentFault("episode already finished");
  if (action.service >= n) throw EnvironmentFault("service index out of range");
  if (action.device < 0 || action.device >= static_cast<int>(context_->devices.size()))
    throw EnvironmentFault("device id out of range");
  if (!eligible_services(state_)[action.service])
    throw EnvironmentFault("service " + std::to_string(action.service) + " is not eligible");

  Placement next = state_.placement;
  next.device_of[action.service] = action.device;
  std::vector<std::uint8_t> placed = state_.placed;
  placed[action.service] = 1;
  const ObjectivePoint before = state_.objectives;
  state_ = make_state(context_, std::move(next), std::move(placed), state_.steps + 1);

  StepResult out;
  out.reward = make_reward(before.time - state_.objectives.time, before.cost - state_.objectives.cost,
                           weights, context_->bounds);
  out.done = state_.done();
  out.state = state_;
  return out;
}

void TrajectoryWriter::initial(const EnvState& state, const WeightVector& weights) {
  const RewardBreakdown r = make_reward(-state.objectives.time, -state.objectives.cost, weights,
                                        state.context->bounds);
  nlohmann::json row{{"step", 0},           {"service", nullptr},  {"device", state.context->cloud},
                     {"r_time", r.r_time},  {"r_cost", r.r_cost},  {"r_total", r.r_total},
                     {"t_app", state.objectives.time}, {"cost", state.objectives.cost}};
  out_ << row.dump() << '\n';
}

void TrajectoryWriter::record(const Action& action, const StepResult& result) {
  const ServiceId s = result.state.context->app.service(action.service);
  nlohmann::json row{{"step", result.state.steps},
                     {"service", {s.row, s.col}},
                     {"device", action.device},
                     {"r_time", result.reward.r_time},
                     {"r_cost", result.reward.r_cost},
                     {"r_total", result.reward.r_total},
                     {"t_app", result.state.objectives.time},
                     {"cost", result.state.objectives.cost}};
  out_ << row.dump() << '\n';
}

}  // namespace fogforge
