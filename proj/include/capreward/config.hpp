#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "capreward/metrics.hpp"
#include "capreward/reward.hpp"
#include "capreward/scene_graph.hpp"
#include "capreward/sim_rl.hpp"

namespace capreward {

/// Every tunable the tools read. Loaded from a flat `key = value` file
/// (TOML-style: '#' comments, optional quotes, `[section]` headers ignored)
/// whose keys are the field names, e.g. `tau_add_soft = 0.5`,
/// `category_weights = [1, 1, 1]`, `kl_estimator = "closed_form"`.
struct Settings {
  RewardConfig reward;
  TrainConfig train;
  ParserOptions parser;
  AggregateWeights aggregate_weights;

  // Throws ConfigError for an unknown key or an unparsable value.
  void set(std::string_view key, std::string_view value);
  // "key=value"
  void set_assignment(std::string_view assignment);
  void load_file(const std::filesystem::path& path);
  void validate() const;

  // Effective values as key -> value text, for run manifests.
  std::map<std::string, std::string> snapshot() const;
  // The same content in the config file format; loading it reproduces *this.
  std::string to_config_text() const;

  static std::vector<std::string> known_keys();
};

}  // namespace capreward
