#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fogforge/model.hpp"

namespace fogforge {

class TooLargeInstance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WeightedOptimum {
  WeightVector weights;
  Placement placement;
  ObjectivePoint point;
  double value = 0.0;
};

struct OracleResult {
  std::uint64_t enumerated = 0;
  /// Exact front, sorted by (time, cost); front_placements[i] is the first
  /// enumerated placement reaching front[i].
  std::vector<ObjectivePoint> front;
  std::vector<Placement> front_placements;
  /// One entry per requested weight vector; ties go to the first placement
  /// in enumeration order.
  std::vector<WeightedOptimum> optima;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Enumerates every total placement. Throws TooLargeInstance when
/// |devices|^services exceeds `cap`.
OracleResult brute_force_oracle(const Application& app, const DeviceSet& devices,
                                const std::vector<WeightVector>& weights = {},
                                std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace fogforge
