#include "fogforge/nn/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fogforge::nn {

using nlohmann::json;

std::string checkpoint_to_json(const Checkpoint& ckpt) {
  json tensors = json::array();
  for (const auto& [name, m] : ckpt.tensors) {
    if (!m.allFinite()) throw CheckpointError("tensor '" + name + "' holds non-finite values");
    std::vector<double> data(m.data(), m.data() + m.size());
    tensors.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}});
  }
  json doc{{"format", "fogforge.checkpoint"},
           {"version", kCheckpointVersion},
           {"meta", json::parse(ckpt.meta_json)},
           {"tensors", std::move(tensors)}};
  return doc.dump() + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text, const std::string& origin) {
  Checkpoint out;
  try {
    const json doc = json::parse(text);
    if (doc.at("format").get<std::string>() != "fogforge.checkpoint")
      throw CheckpointError(origin + ": not a checkpoint file");
    const int version = doc.at("version").get<int>();
    if (version != kCheckpointVersion)
      throw CheckpointError(origin + ": unsupported checkpoint version " + std::to_string(version));
    out.meta_json = doc.at("meta").dump();
    for (const json& t : doc.at("tensors")) {
      const auto name = t.at("name").get<std::string>();
      const auto rows = t.at("rows").get<Eigen::Index>();
      const auto cols = t.at("cols").get<Eigen::Index>();
      const auto data = t.at("data").get<std::vector<double>>();
      if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size())
        throw CheckpointError(origin + ": tensor '" + name + "' has inconsistent shape");
      Matrix m(rows, cols);
      std::copy(data.begin(), data.end(), m.data());
      if (!out.tensors.emplace(name, std::move(m)).second)
        throw CheckpointError(origin + ": duplicate tensor '" + name + "'");
    }
  } catch (const json::exception& e) {
    throw CheckpointError(origin + ": " + e.what());
  }
  return out;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const std::string text = checkpoint_to_json(ckpt);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write " + path.string());
  out << text;
  if (!out) throw CheckpointError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_json(buf.str(), path.string());
}

}  // namespace fogforge::nn
