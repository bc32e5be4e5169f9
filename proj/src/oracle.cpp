#include "fogforge/oracle.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace fogforge {
namespace {

std::uint64_t placement_count(std::size_t devices, std::size_t services, std::uint64_t cap) {
  std::uint64_t count = 1;
  for (std::size_t s = 0; s < services; ++s) {
    if (devices != 0 && count > cap / devices) return cap + 1;
    count *= devices;
  }
  return count;
}

}  // namespace

OracleResult brute_force_oracle(const Application& app, const DeviceSet& devices,
                                const std::vector<WeightVector>& weights, std::uint64_t cap) {
  validate_devices(devices);
  const std::size_t n = app.service_count();
  const std::size_t d = devices.size();
  const std::uint64_t total = placement_count(d, n, cap);
  if (total > cap)
    throw TooLargeInstance(std::to_string(d) + "^" + std::to_string(n) +
                           " placements exceed the enumeration cap of " + std::to_string(cap));

  const NormalizationBounds norms = default_bounds(app, devices);
  OracleResult result;
  result.optima.reserve(weights.size());
  for (const WeightVector& w : weights) {
    result.optima.push_back({w, {}, {}, std::numeric_limits<double>::infinity()});
  }

  // Front kept unsorted during enumeration; each entry carries its first
  // placement.
  std::vector<ObjectivePoint> front;
  std::vector<Placement> front_placements;

  Placement current{std::vector<int>(n, 0)};
  for (std::uint64_t iter = 0; iter < total; ++iter) {
    const ObjectivePoint p = evaluate(app, current, devices);
    ++result.enumerated;

    bool dominated_or_equal = false;
    for (const ObjectivePoint& q : front) {
      if (dominates(q, p) || q == p) {
        dominated_or_equal = true;
        break;
      }
    }
    if (!dominated_or_equal) {
      std::size_t keep = 0;
      for (std::size_t i = 0; i < front.size(); ++i) {
        if (dominates(p, front[i])) continue;
        if (keep != i) {
          front[keep] = front[i];
          front_placements[keep] = std::move(front_placements[i]);
        }
        ++keep;
      }
      front.resize(keep);
      front_placements.resize(keep);
      front.push_back(p);
      front_placements.push_back(current);
    }

    for (WeightedOptimum& opt : result.optima) {
      const double v = weighted_objective(p, opt.weights, norms);
      if (v < opt.value) {
        opt.value = v;
        opt.point = p;
        opt.placement = current;
      }
    }

    // Odometer increment, last service fastest.
    for (std::size_t s = n; s-- > 0;) {
      if (++current.device_of[s] < static_cast<int>(d)) break;
      current.device_of[s] = 0;
    }
  }

  std::vector<std::size_t> order(front.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return front[a].time < front[b].time || (front[a].time == front[b].time && front[a].cost < front[b].cost);
  });
  for (std::size_t i : order) {
    result.front.push_back(front[i]);
    result.front_placements.push_back(front_placements[i]);
  }
  return result;
}

}  // namespace fogforge
