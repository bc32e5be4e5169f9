#include "fogforge/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fogforge {

using nlohmann::json;

void ScenarioConfig::validate() const {
  if (device_count < 0) throw ConfigError("device_count must be >= 0");
  if (rows_per_app < 1) throw ConfigError("rows_per_app must be >= 1");
  if (cols_per_app < 0) throw ConfigError("cols_per_app must be >= 0");
  if (app_count < 0) throw ConfigError("app_count must be >= 0");
  if (!(extra_edge_prob >= 0.0 && extra_edge_prob <= 1.0))
    throw ConfigError("extra_edge_prob must lie in [0,1]");
  if (latency_choices.empty() || cost_choices.empty())
    throw ConfigError("latency and cost choice lists must be non-empty");
  for (double v : latency_choices)
    if (!(v >= 0.0)) throw ConfigError("latency choices must be >= 0");
  for (double v : cost_choices)
    if (!(v >= 0.0)) throw ConfigError("cost choices must be >= 0");
  if (!(cloud_latency >= 0.0) || !(cloud_cost >= 0.0)) throw ConfigError("cloud features must be >= 0");
  if (!(op_count >= 0.0)) throw ConfigError("op_count must be >= 0");
  if (!(device_speed > 0.0)) throw ConfigError("device_speed must be > 0");
}

DeviceSet generate_devices(const ScenarioConfig& cfg, Rng& rng) {
  cfg.validate();
  DeviceSet devices;
  devices.reserve(static_cast<std::size_t>(cfg.device_count) + 1);
  devices.push_back({0, cfg.device_speed, cfg.cloud_latency, cfg.cloud_cost, true});
  for (int k = 1; k <= cfg.device_count; ++k) {
    const double lat = cfg.latency_choices[rng.index(cfg.latency_choices.size())];
    const double cost = cfg.cost_choices[rng.index(cfg.cost_choices.size())];
    devices.push_back({k, cfg.device_speed, lat, cost, false});
  }
  if (cfg.dominant_device && cfg.device_count > 0) {
    const auto k = 1 + rng.index(static_cast<std::uint64_t>(cfg.device_count));
    double min_lat = *std::min_element(cfg.latency_choices.begin(), cfg.latency_choices.end());
    double min_cost = *std::min_element(cfg.cost_choices.begin(), cfg.cost_choices.end());
    min_lat = std::min(min_lat, cfg.cloud_latency);
    min_cost = std::min(min_cost, cfg.cloud_cost);
    devices[k].latency = min_lat;
    devices[k].cost = min_cost;
  }
  return devices;
}

DeviceSet generate_devices(const ScenarioConfig& cfg) {
  Rng rng(cfg.seed);
  return generate_devices(cfg, rng);
}

Application generate_application(const ScenarioConfig& cfg, Rng& rng) {
  cfg.validate();
  const int rows = cfg.rows_per_app;
  const int cols = cfg.cols();
  const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  std::vector<Edge> edges = chain_edges(rows, cols);
  std::vector<std::vector<bool>> has_edge(n, std::vector<bool>(n, false));
  auto flat = [cols](ServiceId s) { return static_cast<std::size_t>(s.row * cols + s.col); };
  for (const Edge& e : edges) has_edge[flat(e.from)][flat(e.to)] = true;

  // Every service draws once, row-major. Predecessors are the services that
  // precede it in row-major order, which keeps the graph acyclic.
  for (std::size_t v = 0; v < n; ++v) {
    if (!rng.bernoulli(cfg.extra_edge_prob)) continue;
    std::vector<std::size_t> candidates;
    for (std::size_t u = 0; u < v; ++u)
      if (!has_edge[u][v]) candidates.push_back(u);
    if (candidates.empty()) continue;
    const std::size_t u = candidates[rng.index(candidates.size())];
    has_edge[u][v] = true;
    edges.push_back({{static_cast<int>(u) / cols, static_cast<int>(u) % cols},
                     {static_cast<int>(v) / cols, static_cast<int>(v) % cols}});
  }
  return Application(rows, cols, std::vector<double>(n, cfg.op_count), std::move(edges));
}

Application generate_application(const ScenarioConfig& cfg) {
  Rng rng(cfg.seed);
  return generate_application(cfg, rng);
}

Scenario generate_scenario(const ScenarioConfig& cfg) {
  Rng rng(cfg.seed);
  Scenario s;
  s.config = cfg;
  s.devices = generate_devices(cfg, rng);
  for (int a = 0; a < cfg.app_count; ++a) s.applications.push_back(generate_application(cfg, rng));
  return s;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json config_to_json(const ScenarioConfig& c) {
  return json{{"device_count", c.device_count},
              {"rows_per_app", c.rows_per_app},
              {"cols_per_app", c.cols_per_app},
              {"app_count", c.app_count},
              {"latency_choices", c.latency_choices},
              {"cost_choices", c.cost_choices},
              {"extra_edge_prob", c.extra_edge_prob},
              {"cloud_latency", c.cloud_latency},
              {"cloud_cost", c.cloud_cost},
              {"op_count", c.op_count},
              {"device_speed", c.device_speed},
              {"dominant_device", c.dominant_device},
              {"seed", c.seed}};
}

[[noreturn]] void field_error(const std::string& origin, const std::string& field, const std::string& what) {
  throw ScenarioParseError(origin + ": field '" + field + "': " + what);
}

const json& require(const json& obj, const char* key, const std::string& origin, const std::string& path) {
  if (!obj.is_object()) field_error(origin, path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) field_error(origin, path + "." + key, "missing");
  return *it;
}

template <typename T>
T as(const json& j, const std::string& origin, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    field_error(origin, path, e.what());
  }
}

void read_config(const json& cfg, ScenarioConfig& c, const std::string& origin) {
  if (!cfg.is_object()) field_error(origin, "config", "expected an object");
  auto opt = [&](const char* key, auto& target) {
    if (auto it = cfg.find(key); it != cfg.end())
      target = as<std::decay_t<decltype(target)>>(*it, origin, std::string("config.") + key);
  };
  opt("device_count", c.device_count);
  opt("rows_per_app", c.rows_per_app);
  opt("cols_per_app", c.cols_per_app);
  opt("app_count", c.app_count);
  opt("latency_choices", c.latency_choices);
  opt("cost_choices", c.cost_choices);
  opt("extra_edge_prob", c.extra_edge_prob);
  opt("cloud_latency", c.cloud_latency);
  opt("cloud_cost", c.cloud_cost);
  opt("op_count", c.op_count);
  opt("device_speed", c.device_speed);
  opt("dominant_device", c.dominant_device);
  opt("seed", c.seed);
}

}  // namespace

std::string ScenarioConfig::to_json() const { return config_to_json(*this).dump(); }

ScenarioConfig ScenarioConfig::from_json(const std::string& text, ScenarioConfig base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioParseError(std::string("scenario config: ") + e.what());
  }
  read_config(j, base, "scenario config");
  return base;
}

std::string scenario_to_json(const Scenario& scenario) {
  json devices = json::array();
  for (const Device& d : scenario.devices)
    devices.push_back({{"id", d.id}, {"speed", d.speed}, {"latency", d.latency}, {"cost", d.cost}, {"is_cloud", d.is_cloud}});
  json apps = json::array();
  for (const Application& a : scenario.applications) {
    json ops = json::array();
    for (int i = 0; i < a.rows(); ++i) {
      json row = json::array();
      for (int j = 0; j < a.cols(); ++j) row.push_back(a.ops(a.index({i, j})));
      ops.push_back(std::move(row));
    }
    json edges = json::array();
    for (const Edge& e : a.edges()) edges.push_back({e.from.row, e.from.col, e.to.row, e.to.col});
    apps.push_back({{"rows", a.rows()}, {"cols", a.cols()}, {"ops", std::move(ops)}, {"edges", std::move(edges)}});
  }
  json doc{{"config", config_to_json(scenario.config)}, {"devices", std::move(devices)}, {"applications", std::move(apps)}};
  return doc.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ScenarioParseError(origin + ":" + std::to_string(line) + ": " + e.what());
  }

  Scenario s;
  // Config keys are optional individually so older files keep loading;
  // unknown keys are ignored.
  read_config(require(doc, "config", origin, "$"), s.config, origin);

  const json& devices = require(doc, "devices", origin, "$");
  if (!devices.is_array()) field_error(origin, "devices", "expected an array");
  for (std::size_t k = 0; k < devices.size(); ++k) {
    const std::string p = "devices[" + std::to_string(k) + "]";
    const json& d = devices[k];
    Device dev;
    dev.id = as<int>(require(d, "id", origin, p), origin, p + ".id");
    dev.speed = as<double>(require(d, "speed", origin, p), origin, p + ".speed");
    dev.latency = as<double>(require(d, "latency", origin, p), origin, p + ".latency");
    dev.cost = as<double>(require(d, "cost", origin, p), origin, p + ".cost");
    dev.is_cloud = as<bool>(require(d, "is_cloud", origin, p), origin, p + ".is_cloud");
    s.devices.push_back(dev);
  }
  try {
    validate_devices(s.devices);
  } catch (const ConfigError& e) {
    field_error(origin, "devices", e.what());
  }

  const json& apps = require(doc, "applications", origin, "$");
  if (!apps.is_array()) field_error(origin, "applications", "expected an array");
  for (std::size_t a = 0; a < apps.size(); ++a) {
    const std::string p = "applications[" + std::to_string(a) + "]";
    const json& app = apps[a];
    const int rows = as<int>(require(app, "rows", origin, p), origin, p + ".rows");
    int cols = rows;
    if (auto it = app.find("cols"); it != app.end()) cols = as<int>(*it, origin, p + ".cols");
    const auto grid = as<std::vector<std::vector<double>>>(require(app, "ops", origin, p), origin, p + ".ops");
    if (static_cast<int>(grid.size()) != rows) field_error(origin, p + ".ops", "row count mismatch");
    std::vector<double> ops;
    for (const auto& row : grid) {
      if (static_cast<int>(row.size()) != cols) field_error(origin, p + ".ops", "column count mismatch");
      ops.insert(ops.end(), row.begin(), row.end());
    }
    const auto raw = as<std::vector<std::vector<int>>>(require(app, "edges", origin, p), origin, p + ".edges");
    std::vector<Edge> edges;
    for (std::size_t e = 0; e < raw.size(); ++e) {
      if (raw[e].size() != 4) field_error(origin, p + ".edges[" + std::to_string(e) + "]", "expected [i,j,a,b]");
      edges.push_back({{raw[e][0], raw[e][1]}, {raw[e][2], raw[e][3]}});
    }
    try {
      s.applications.emplace_back(rows, cols, std::move(ops), std::move(edges));
    } catch (const InvalidApplication& e) {
      field_error(origin, p, e.what());
    }
  }
  return s;
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << scenario_to_json(scenario);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str(), path.string());
}

ScenarioConfig ScenarioConfig::from_json(const std::string& text) { return from_json(text, ScenarioConfig{}); }

}  // namespace fogforge
