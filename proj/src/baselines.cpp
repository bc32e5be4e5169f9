#include "fogforge/baselines.hpp"

#include <tuple>

#include "fogforge/rng.hpp"

namespace fogforge {

std::string to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::RandomDevices: return "random";
    case StrategyKind::AllInCloud: return "cloud";
    case StrategyKind::GreedyEdge: return "greedy-edge";
    case StrategyKind::GreedyCost: return "greedy-cost";
  }
  return "unknown";
}

StrategyKind strategy_from_string(const std::string& name) {
  for (StrategyKind k : all_strategies())
    if (to_string(k) == name) return k;
  throw ConfigError("unknown baseline strategy '" + name + "'");
}

std::vector<StrategyKind> all_strategies() {
  return {StrategyKind::RandomDevices, StrategyKind::AllInCloud, StrategyKind::GreedyEdge,
          StrategyKind::GreedyCost};
}

namespace {

template <class Key>
int argmin_device(const DeviceSet& devices, Key key) {
  int best = 0;
  for (std::size_t d = 1; d < devices.size(); ++d)
    if (key(devices[d]) < key(devices[static_cast<std::size_t>(best)])) best = static_cast<int>(d);
  return best;
}

}  // namespace

BaselineResult run_baseline(StrategyKind kind, const Application& app, const DeviceSet& devices,
                            std::uint64_t seed) {
  validate_devices(devices);
  BaselineResult r{kind, {}, {}};
  switch (kind) {
    case StrategyKind::RandomDevices: {
      Rng rng(seed);
      r.placement.device_of.resize(app.service_count());
      for (int& d : r.placement.device_of) d = static_cast<int>(rng.index(devices.size()));
      break;
    }
    case StrategyKind::AllInCloud:
      r.placement = uniform_placement(app, cloud_id(devices));
      break;
    case StrategyKind::GreedyEdge:
      // strict < in argmin keeps the lowest id on full ties
      r.placement = uniform_placement(
          app, argmin_device(devices, [](const Device& d) { return std::make_tuple(d.latency, d.cost); }));
      break;
    case StrategyKind::GreedyCost:
      r.placement = uniform_placement(
          app, argmin_device(devices, [](const Device& d) { return std::make_tuple(d.cost, d.latency); }));
      break;
  }
  r.point = evaluate(app, r.placement, devices);
  return r;
}

}  // namespace fogforge
