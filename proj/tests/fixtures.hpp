#pragma once

#include <vector>

#include "fogforge/model.hpp"
#include "fogforge/rng.hpp"
#include "oracles/reference_eval.hpp"

namespace fixtures {

using namespace fogforge;

inline Device dev(int id, double latency, double cost, bool cloud = false, double speed = 1.0) {
  return Device{id, speed, latency, cost, cloud};
}

/// 3x3 grid from the worked example: chains plus S11->S21, S12->S22,
/// S21->S31, S13->S32 (1-based names), zero operations.
inline Application fig1_app() {
  return Application::with_chains(3, 3, std::vector<double>(9, 0.0),
                                  {{{0, 0}, {1, 0}}, {{0, 1}, {1, 1}}, {{1, 0}, {2, 0}}, {{0, 2}, {2, 1}}});
}

/// Cloud plus devices with latency 2, 6, 10 and 3.
inline DeviceSet fig1_devices() {
  return {dev(0, 50, 20, true), dev(1, 2, 10), dev(2, 6, 10), dev(3, 10, 1), dev(4, 3, 30)};
}

/// Row 1 on latency 2, row 2 on latency 6, S31/S32 on latency 10, S33 on 3.
inline Placement fig1_placement() { return Placement{{1, 1, 1, 2, 2, 2, 3, 3, 4}}; }

/// One chain of three services; cloud latency 60 and devices A, B, D with
/// latency 15, 2 and 30.
inline Application table2_app() { return Application::with_chains(1, 3, {0.0, 0.0, 0.0}); }
inline DeviceSet table2_devices() {
  return {dev(0, 60, 20, true), dev(1, 15, 10), dev(2, 2, 30), dev(3, 30, 1)};
}

inline oracle::RefApp to_ref(const Application& app) {
  oracle::RefApp r{app.rows(), app.cols(), app.ops(), {}};
  const std::size_t n = app.service_count();
  r.deps.assign(n, std::vector<bool>(n, false));
  for (const Edge& e : app.edges()) r.deps[app.index(e.from)][app.index(e.to)] = true;
  return r;
}

inline std::vector<oracle::RefDevice> to_ref(const DeviceSet& devices) {
  std::vector<oracle::RefDevice> out;
  for (const Device& d : devices) out.push_back({d.id, d.speed, d.latency, d.cost});
  return out;
}

inline Placement random_placement(const Application& app, const DeviceSet& devices, Rng& rng) {
  Placement p;
  for (std::size_t s = 0; s < app.service_count(); ++s)
    p.device_of.push_back(static_cast<int>(rng.index(devices.size())));
  return p;
}

}  // namespace fixtures
