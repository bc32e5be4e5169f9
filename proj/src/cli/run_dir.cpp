#include "cli/run_dir.hpp"

#include <charconv>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace fogforge::cli {

using nlohmann::json;

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string join_placement(const Placement& p) {
  std::string s;
  for (std::size_t i = 0; i < p.device_of.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(p.device_of[i]);
  }
  return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw InputError(where + ": bad number '" + s + "'");
  return v;
}

int parse_int(const std::string& s, const std::string& where) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw InputError(where + ": bad integer '" + s + "'");
  return v;
}

std::string iso_time(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void write_solutions(const std::filesystem::path& path, std::vector<SolutionRow> rows) {
  for (SolutionRow& r : rows) {
    r.dominated = false;
    for (const SolutionRow& o : rows)
      if (o.app == r.app && dominates(o.point, r.point)) r.dominated = true;
  }
  std::string text = std::string(kSolutionsHeader) + "\n";
  for (const SolutionRow& r : rows) {
    text += (r.weights ? format_number(r.weights->time) : "") + ',';
    text += (r.weights ? format_number(r.weights->cost) : "") + ',';
    text += format_number(r.point.time) + ',' + format_number(r.point.cost) + ',';
    text += r.dominated ? "1," : "0,";
    text += r.method + ',' + std::to_string(r.app) + ',' + join_placement(r.placement) + '\n';
  }
  write_text(path, text);
}

std::vector<SolutionRow> read_solutions(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  const std::string name = path.string();
  std::string line;
  if (!std::getline(in, line) || line != kSolutionsHeader)
    throw InputError(name + ": header must be '" + kSolutionsHeader + "'");
  std::vector<SolutionRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = name + ":" + std::to_string(lineno);
    const auto f = split(line, ',');
    if (f.size() != 8) throw InputError(where + ": expected 8 fields, got " + std::to_string(f.size()));
    SolutionRow r;
    if (f[0].empty() != f[1].empty()) throw InputError(where + ": w_time and w_cost must both be set or empty");
    if (!f[0].empty()) r.weights = WeightVector{parse_double(f[0], where), parse_double(f[1], where)};
    r.point = {parse_double(f[2], where), parse_double(f[3], where)};
    if (f[4] != "0" && f[4] != "1") throw InputError(where + ": dominated_flag must be 0 or 1");
    r.dominated = f[4] == "1";
    r.method = f[5];
    r.app = parse_int(f[6], where);
    if (!f[7].empty())
      for (const std::string& g : split(f[7], ' ')) r.placement.device_of.push_back(parse_int(g, where));
    rows.push_back(std::move(r));
  }
  return rows;
}

RunDir::RunDir(std::filesystem::path root, std::string command, std::vector<std::string> argv)
    : root_(std::move(root)),
      command_(std::move(command)),
      argv_(std::move(argv)),
      started_(std::chrono::system_clock::now()),
      started_steady_(std::chrono::steady_clock::now()) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec) throw InputError("cannot create run directory " + root_.string() + ": " + ec.message());
}

std::filesystem::path RunDir::checkpoint(const std::string& name) const {
  std::filesystem::create_directories(root_ / "checkpoints");
  return root_ / "checkpoints" / name;
}

void RunDir::write_config(const std::string& json_text) {
  config_json_ = json_text;
  write_text(path("config.json"), json::parse(json_text).dump(2) + "\n");
}

void RunDir::set_status(std::string status, std::string diagnostic) {
  status_ = std::move(status);
  diagnostic_ = std::move(diagnostic);
}

void RunDir::finish() {
  const auto wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_steady_).count();
  json m{{"command", command_},
         {"argv", argv_},
         {"config", json::parse(config_json_)},
         {"seed", seed_},
         {"tool_version", kToolVersion},
         {"started_at", iso_time(started_)},
         {"finished_at", iso_time(std::chrono::system_clock::now())},
         {"wall_seconds", wall},
         {"status", status_},
         {"outputs", outputs_}};
  if (!diagnostic_.empty()) m["diagnostic"] = diagnostic_;
  write_text(path("manifest.json"), m.dump(2) + "\n");
}

}  // namespace fogforge::cli
