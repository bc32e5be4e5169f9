#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fogforge/model.hpp"

namespace fogforge {

enum class StrategyKind { RandomDevices, AllInCloud, GreedyEdge, GreedyCost };

std::string to_string(StrategyKind kind);
/// Accepts random, cloud, greedy-edge, greedy-cost. Throws ConfigError.
StrategyKind strategy_from_string(const std::string& name);
std::vector<StrategyKind> all_strategies();

struct BaselineResult {
  StrategyKind kind;
  Placement placement;
  ObjectivePoint point;
};

/// RandomDevices draws every service's host uniformly from the seed;
/// AllInCloud keeps everything on the cloud; GreedyEdge puts every service
/// on the lowest-latency device (ties on cost, then id); GreedyCost on the
/// cheapest device (ties on latency, then id). Only RandomDevices uses `seed`.
BaselineResult run_baseline(StrategyKind kind, const Application& app, const DeviceSet& devices,
                            std::uint64_t seed = 1);

}  // namespace fogforge
