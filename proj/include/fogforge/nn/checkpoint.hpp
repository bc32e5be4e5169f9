#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include "fogforge/nn/matrix.hpp"

namespace fogforge::nn {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kCheckpointVersion = 1;

/// Named tensors plus an opaque JSON object describing the architecture.
/// Stored as JSON with shortest round-trip decimal doubles, so values are
/// restored bit-exactly.
struct Checkpoint {
  std::string meta_json = "{}";
  std::map<std::string, Matrix> tensors;
};

std::string checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const std::string& text, const std::string& origin = "<string>");

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace fogforge::nn
