#include "fogforge/model.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace fogforge {

void validate_devices(const DeviceSet& devices) {
  if (devices.empty()) throw ConfigError("infrastructure has no devices");
  int clouds = 0;
  for (std::size_t k = 0; k < devices.size(); ++k) {
    const Device& d = devices[k];
    if (d.id != static_cast<int>(k)) {
      std::ostringstream msg;
      msg << "device at position " << k << " has id " << d.id;
      throw ConfigError(msg.str());
    }
    if (!(d.speed > 0.0) || !(d.latency >= 0.0) || !(d.cost >= 0.0)) {
      std::ostringstream msg;
      msg << "device " << k << " has out-of-range features (speed " << d.speed << ", latency "
          << d.latency << ", cost " << d.cost << ")";
      throw ConfigError(msg.str());
    }
    clouds += d.is_cloud ? 1 : 0;
  }
  if (clouds != 1) throw ConfigError("expected exactly one cloud device, found " + std::to_string(clouds));
}

int cloud_id(const DeviceSet& devices) {
  for (const Device& d : devices)
    if (d.is_cloud) return d.id;
  throw ConfigError("infrastructure has no cloud device");
}

std::vector<Edge> chain_edges(int rows, int cols) {
  std::vector<Edge> edges;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j + 1 < cols; ++j) edges.push_back({{i, j}, {i, j + 1}});
  return edges;
}

Application::Application(int rows, int cols, std::vector<double> ops, std::vector<Edge> edges)
    : rows_(rows), cols_(cols), ops_(std::move(ops)), edges_(std::move(edges)) {
  if (rows_ < 0 || cols_ < 0 || (rows_ == 0) != (cols_ == 0))
    throw InvalidApplication("bad grid shape " + std::to_string(rows_) + "x" + std::to_string(cols_));
  const std::size_t n = static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_);
  if (ops_.size() != n)
    throw InvalidApplication("expected " + std::to_string(n) + " operation counts, got " +
                             std::to_string(ops_.size()));
  for (double o : ops_)
    if (!(o >= 0.0) || !std::isfinite(o)) throw InvalidApplication("operation counts must be finite and >= 0");

  preds_.assign(n, {});
  succs_.assign(n, {});
  auto in_grid = [&](ServiceId s) { return s.row >= 0 && s.row < rows_ && s.col >= 0 && s.col < cols_; };
  for (const Edge& e : edges_) {
    if (!in_grid(e.from) || !in_grid(e.to)) throw InvalidApplication("edge endpoint outside the grid");
    if (e.from == e.to) throw InvalidApplication("self edge");
    const std::size_t a = index(e.from), b = index(e.to);
    if (std::find(succs_[a].begin(), succs_[a].end(), b) != succs_[a].end())
      throw InvalidApplication("duplicate edge");
    succs_[a].push_back(b);
    preds_[b].push_back(a);
  }
  for (const Edge& c : chain_edges(rows_, cols_)) {
    const auto& s = succs_[index(c.from)];
    if (std::find(s.begin(), s.end(), index(c.to)) == s.end())
      throw InvalidApplication("missing row chain edge");
  }

  // Kahn's algorithm for acyclicity.
  std::vector<std::size_t> indeg(n);
  for (std::size_t v = 0; v < n; ++v) indeg[v] = preds_[v].size();
  std::queue<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (indeg[v] == 0) ready.push(v);
  std::size_t seen = 0;
  while (!ready.empty()) {
    const std::size_t v = ready.front();
    ready.pop();
    ++seen;
    for (std::size_t w : succs_[v])
      if (--indeg[w] == 0) ready.push(w);
  }
  if (seen != n) throw InvalidApplication("dependency graph has a cycle");
}

Application Application::with_chains(int rows, int cols, std::vector<double> ops,
                                     const std::vector<Edge>& extra) {
  std::vector<Edge> edges = chain_edges(rows, cols);
  for (const Edge& e : extra)
    if (std::find(edges.begin(), edges.end(), e) == edges.end()) edges.push_back(e);
  return Application(rows, cols, std::move(ops), std::move(edges));
}

ServiceId Application::service(std::size_t index) const {
  return {static_cast<int>(index / static_cast<std::size_t>(cols_)),
          static_cast<int>(index % static_cast<std::size_t>(cols_))};
}

Placement uniform_placement(const Application& app, int device) {
  return Placement{std::vector<int>(app.service_count(), device)};
}

WeightVector WeightVector::make(double w_time, double w_cost) {
  if (!(w_time >= 0.0 && w_time <= 1.0 && w_cost >= 0.0 && w_cost <= 1.0) ||
      std::abs(w_time + w_cost - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "weights must lie in [0,1] and sum to 1, got (" << w_time << ", " << w_cost << ")";
    throw ConfigError(msg.str());
  }
  return {w_time, w_cost};
}

void validate_placement(const Application& app, const Placement& placement,
                        const DeviceSet& devices) {
  if (placement.device_of.size() != app.service_count())
    throw InvalidPlacement("placement covers " + std::to_string(placement.device_of.size()) +
                           " services, application has " + std::to_string(app.service_count()));
  for (std::size_t s = 0; s < placement.device_of.size(); ++s) {
    const int k = placement.device_of[s];
    if (k < 0 || k >= static_cast<int>(devices.size()))
      throw InvalidPlacement("service " + std::to_string(s) + " placed on unknown device " +
                             std::to_string(k));
  }
}

std::vector<double> latency_contributions(const Application& app, const Placement& placement,
                                          const DeviceSet& devices) {
  validate_placement(app, placement, devices);
  std::vector<double> out(app.service_count(), 0.0);
  for (const Edge& e : app.edges()) {
    const std::size_t to = app.index(e.to);
    const int src_dev = placement.device_of[app.index(e.from)];
    const int dst_dev = placement.device_of[to];
    if (src_dev != dst_dev) out[to] += devices[static_cast<std::size_t>(dst_dev)].latency;
  }
  return out;
}

double response_time(const Application& app, const Placement& placement,
                     const DeviceSet& devices) {
  validate_placement(app, placement, devices);
  double total = 0.0;
  for (std::size_t s = 0; s < app.service_count(); ++s)
    total += app.ops(s) / devices[static_cast<std::size_t>(placement.device_of[s])].speed;
  for (int i = 0; i < app.rows(); ++i)
    total += devices[static_cast<std::size_t>(placement.device_of[app.index({i, 0})])].latency;
  for (const Edge& e : app.edges()) {
    const int src_dev = placement.device_of[app.index(e.from)];
    const int dst_dev = placement.device_of[app.index(e.to)];
    if (src_dev != dst_dev) total += devices[static_cast<std::size_t>(dst_dev)].latency;
  }
  return total;
}

double placement_cost(const Placement& placement, const DeviceSet& devices) {
  double total = 0.0;
  for (int k : placement.device_of) {
    if (k < 0 || k >= static_cast<int>(devices.size()))
      throw InvalidPlacement("unknown device " + std::to_string(k));
    total += devices[static_cast<std::size_t>(k)].cost;
  }
  return total;
}

ObjectivePoint evaluate(const Application& app, const Placement& placement,
                        const DeviceSet& devices) {
  return {response_time(app, placement, devices), placement_cost(placement, devices)};
}

NormalizationBounds default_bounds(const Application& app, const DeviceSet& devices) {
  if (devices.empty()) throw ConfigError("no devices");
  double min_speed = devices.front().speed, max_lat = 0.0, max_cost = 0.0;
  for (const Device& d : devices) {
    min_speed = std::min(min_speed, d.speed);
    max_lat = std::max(max_lat, d.latency);
    max_cost = std::max(max_cost, d.cost);
  }
  double ops = 0.0;
  for (double o : app.ops()) ops += o;
  NormalizationBounds b;
  b.max_time = ops / min_speed + static_cast<double>(app.rows() + static_cast<int>(app.edges().size())) * max_lat;
  b.max_cost = static_cast<double>(app.service_count()) * max_cost;
  // Degenerate infrastructures (all-zero latency or cost) still need a
  // positive scale.
  if (!(b.max_time > 0.0)) b.max_time = 1.0;
  if (!(b.max_cost > 0.0)) b.max_cost = 1.0;
  return b;
}

double weighted_objective(const ObjectivePoint& point, const WeightVector& weights,
                          const NormalizationBounds& norms) {
  if (!(norms.max_time > 0.0) || !(norms.max_cost > 0.0))
    throw ConfigError("normalization bounds must be positive");
  return weights.time * (point.time / norms.max_time) + weights.cost * (point.cost / norms.max_cost);
}

bool dominates(const ObjectivePoint& a, const ObjectivePoint& b) {
  return a.time <= b.time && a.cost <= b.cost && (a.time < b.time || a.cost < b.cost);
}

std::vector<ObjectivePoint> pareto_front(std::vector<ObjectivePoint> points) {
  std::sort(points.begin(), points.end(), [](const ObjectivePoint& a, const ObjectivePoint& b) {
    return a.time < b.time || (a.time == b.time && a.cost < b.cost);
  });
  // After sorting by (time, cost), a point survives iff its cost is strictly
  // below every cost seen so far.
  std::vector<ObjectivePoint> front;
  for (const ObjectivePoint& p : points) {
    if (front.empty() || p.cost < front.back().cost) front.push_back(p);
  }
  return front;
}

double hypervolume(const std::vector<ObjectivePoint>& points, const ObjectivePoint& reference) {
  std::vector<ObjectivePoint> inside;
  for (const ObjectivePoint& p : points)
    if (p.time < reference.time && p.cost < reference.cost) inside.push_back(p);
  const std::vector<ObjectivePoint> front = pareto_front(std::move(inside));
  double area = 0.0;
  for (std::size_t i = 0; i < front.size(); ++i) {
    const double next_time = i + 1 < front.size() ? front[i + 1].time : reference.time;
    area += (next_time - front[i].time) * (reference.cost - front[i].cost);
  }
  return area;
}

}  // namespace fogforge
