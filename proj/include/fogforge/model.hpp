#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fogforge {

class InvalidPlacement : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidApplication : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A fog node. Exactly one device of an infrastructure is the cloud.
struct Device {
  int id = 0;
  double speed = 1.0;    // operations per time unit
  double latency = 0.0;  // time units
  double cost = 0.0;     // abstract cost units
  bool is_cloud = false;

  friend bool operator==(const Device&, const Device&) = default;
};

/// Devices indexed by id: `devices[k].id == k`.
using DeviceSet = std::vector<Device>;

/// Throws ConfigError unless ids are dense, features are in range and
/// exactly one device is the cloud.
void validate_devices(const DeviceSet& devices);

/// Id of the cloud device.
int cloud_id(const DeviceSet& devices);

/// Zero-based grid position of a service.
struct ServiceId {
  int row = 0;
  int col = 0;

  friend bool operator==(const ServiceId&, const ServiceId&) = default;
  friend auto operator<=>(const ServiceId&, const ServiceId&) = default;
};

struct Edge {
  ServiceId from;
  ServiceId to;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Row chain edges S(i,0) -> S(i,1) -> ... for a rows x cols grid.
std::vector<Edge> chain_edges(int rows, int cols);

/// A JSSP-style grid of services. Rows are ordered service chains; extra
/// edges add cross-row dependencies. Services are addressed row-major.
class Application {
 public:
  Application() = default;

  /// `ops` is row-major with rows*cols entries. `edges` must contain every
  /// row-chain edge and form a DAG; throws InvalidApplication otherwise.
  Application(int rows, int cols, std::vector<double> ops, std::vector<Edge> edges);

  /// Chain edges are added automatically; `extra` may repeat them.
  static Application with_chains(int rows, int cols, std::vector<double> ops,
                                 const std::vector<Edge>& extra = {});

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t service_count() const { return ops_.size(); }
  std::size_t index(ServiceId s) const { return static_cast<std::size_t>(s.row * cols_ + s.col); }
  ServiceId service(std::size_t index) const;
  double ops(std::size_t index) const { return ops_[index]; }
  const std::vector<double>& ops() const { return ops_; }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Predecessor / successor lists by flat index.
  const std::vector<std::vector<std::size_t>>& predecessors() const { return preds_; }
  const std::vector<std::vector<std::size_t>>& successors() const { return succs_; }

  friend bool operator==(const Application& a, const Application& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.ops_ == b.ops_ && a.edges_ == b.edges_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> ops_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> preds_;
  std::vector<std::vector<std::size_t>> succs_;
};

/// Service -> device assignment, flat row-major index to device id.
struct Placement {
  std::vector<int> device_of;

  friend bool operator==(const Placement&, const Placement&) = default;
};

/// Every service on the given device.
Placement uniform_placement(const Application& app, int device);

struct ObjectivePoint {
  double time = 0.0;
  double cost = 0.0;

  friend bool operator==(const ObjectivePoint&, const ObjectivePoint&) = default;
};

struct WeightVector {
  double time = 0.5;
  double cost = 0.5;

  /// Throws ConfigError unless both are in [0,1] and sum to 1.
  static WeightVector make(double w_time, double w_cost);

  friend bool operator==(const WeightVector&, const WeightVector&) = default;
};

struct NormalizationBounds {
  double max_time = 1.0;
  double max_cost = 1.0;
};

/// Throws InvalidPlacement unless the placement is total and references
/// existing devices.
void validate_placement(const Application& app, const Placement& placement,
                        const DeviceSet& devices);

/// Application response time: execution time of every service on its host,
/// plus the access latency of each row head's host, plus for every edge that
/// crosses devices the latency of the edge target's host.
double response_time(const Application& app, const Placement& placement,
                     const DeviceSet& devices);

/// Per-service latency charged by inbound cross-device edges (row-head access
/// latency excluded). Flat row-major, same length as the placement.
std::vector<double> latency_contributions(const Application& app, const Placement& placement,
                                          const DeviceSet& devices);

/// Sum of hosting-device cost over services.
double placement_cost(const Placement& placement, const DeviceSet& devices);

ObjectivePoint evaluate(const Application& app, const Placement& placement,
                        const DeviceSet& devices);

/// Analytic upper bounds of both objectives for this app on this
/// infrastructure.
NormalizationBounds default_bounds(const Application& app, const DeviceSet& devices);

/// w_time * time / max_time + w_cost * cost / max_cost. Lower is better.
double weighted_objective(const ObjectivePoint& point, const WeightVector& weights,
                          const NormalizationBounds& norms);

/// a <= b in both objectives and < in at least one.
bool dominates(const ObjectivePoint& a, const ObjectivePoint& b);

/// Non-dominated subset sorted by (time, cost) with duplicates collapsed.
std::vector<ObjectivePoint> pareto_front(std::vector<ObjectivePoint> points);

/// Area dominated by `points` and bounded by `reference`. Points outside the
/// reference box contribute only their clipped part.
double hypervolume(const std::vector<ObjectivePoint>& points, const ObjectivePoint& reference);

}  // namespace fogforge
