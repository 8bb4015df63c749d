#include "manifest.hpp"

#include <fstream>

#include "capreward/error.hpp"

namespace capreward::cli {

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j{{"command", command},   {"argv", argv},       {"inputs", inputs},
                   {"config", config},     {"backend", backend}, {"tool_version", tool_version}};
  j["rng_seed"] = rng_seed ? nlohmann::json(*rng_seed) : nlohmann::json(nullptr);
  return j;
}

std::filesystem::path sidecar_path(const std::filesystem::path& artifact) {
  return std::filesystem::path(artifact.string() + ".manifest.json");
}

void RunManifest::write_sidecar(const std::filesystem::path& artifact) const {
  std::ofstream out(sidecar_path(artifact));
  if (!out) throw InputError("cannot write " + sidecar_path(artifact).string());
  out << to_json().dump(2) << "\n";
}

}  // namespace capreward::cli
