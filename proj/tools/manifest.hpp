#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace capreward::cli {

inline constexpr const char* kToolVersion = "0.3.0";

// What produced an output artifact. JSON outputs embed it under
// "manifest"; JSONL and CSV outputs get a <path>.manifest.json sidecar.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::vector<std::string> inputs;
  std::map<std::string, std::string> config;
  std::string backend;
  std::optional<std::uint64_t> rng_seed;
  std::string tool_version = kToolVersion;

  nlohmann::json to_json() const;
  void write_sidecar(const std::filesystem::path& artifact) const;
};

std::filesystem::path sidecar_path(const std::filesystem::path& artifact);

}  // namespace capreward::cli
