#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "fogforge/model.hpp"
#include "fogforge/rng.hpp"

namespace fogforge {

class ScenarioParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Generation parameters. Defaults follow the reference experiment setup
/// except for size, which is desk scale.
struct ScenarioConfig {
  int device_count = 20;
  int rows_per_app = 3;
  int cols_per_app = 0;  // 0 means square (cols == rows)
  int app_count = 1;
  std::vector<double> latency_choices{1, 10, 20, 30, 40, 50};
  std::vector<double> cost_choices{1, 10, 20, 30, 40};
  double extra_edge_prob = 0.2;
  double cloud_latency = 50;
  double cloud_cost = 20;
  double op_count = 1;
  double device_speed = 1;
  /// Overwrite one generated device with the minimum latency and cost
  /// choices so a device dominating all others exists.
  bool dominant_device = false;
  std::uint64_t seed = 1;

  int cols() const { return cols_per_app > 0 ? cols_per_app : rows_per_app; }

  /// Throws ConfigError on out-of-range values.
  void validate() const;

  std::string to_json() const;
  /// Keys absent from `text` keep the values in `base`; unknown keys are
  /// ignored.
  static ScenarioConfig from_json(const std::string& text, ScenarioConfig base);
  static ScenarioConfig from_json(const std::string& text);

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct Scenario {
  ScenarioConfig config;
  DeviceSet devices;
  std::vector<Application> applications;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Cloud is device 0; generated devices follow with ids 1..device_count.
DeviceSet generate_devices(const ScenarioConfig& cfg, Rng& rng);
DeviceSet generate_devices(const ScenarioConfig& cfg);

/// Row-major per-service extra-edge draws after the row chains.
Application generate_application(const ScenarioConfig& cfg, Rng& rng);
Application generate_application(const ScenarioConfig& cfg);

/// Devices first, then `app_count` applications, all from one stream.
Scenario generate_scenario(const ScenarioConfig& cfg);

std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& text, const std::string& origin = "<string>");

void save_scenario(const Scenario& scenario, const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace fogforge
