#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fogforge/model.hpp"

namespace fogforge::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Missing or malformed input files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One row of solutions.csv. Producers that emit a whole front leave the
/// weights empty.
struct SolutionRow {
  std::string method;
  int app = 0;
  std::optional<WeightVector> weights;
  ObjectivePoint point;
  bool dominated = false;
  Placement placement;
};

inline constexpr const char* kSolutionsHeader = "w_time,w_cost,time,cost,dominated_flag,method,app,placement";

/// Shortest round-trip decimal form.
std::string format_number(double v);

/// Recomputes dominated flags within each app, then writes the file.
void write_solutions(const std::filesystem::path& path, std::vector<SolutionRow> rows);
/// Throws InputError naming the file on any schema problem.
std::vector<SolutionRow> read_solutions(const std::filesystem::path& path);

/// Output directory of one command invocation.
class RunDir {
 public:
  RunDir(std::filesystem::path root, std::string command, std::vector<std::string> argv);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path path(const std::string& name) const { return root_ / name; }
  std::filesystem::path checkpoint(const std::string& name) const;

  void write_config(const std::string& json_text);
  void add_output(const std::string& name) { outputs_.push_back(name); }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void set_status(std::string status, std::string diagnostic = {});
  /// Writes manifest.json; call once when the command finishes.
  void finish();

 private:
  std::filesystem::path root_;
  std::string command_;
  std::vector<std::string> argv_;
  std::string config_json_ = "{}";
  std::vector<std::string> outputs_;
  std::uint64_t seed_ = 0;
  std::string status_ = "ok";
  std::string diagnostic_;
  std::chrono::system_clock::time_point started_;
  std::chrono::steady_clock::time_point started_steady_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace fogforge::cli
