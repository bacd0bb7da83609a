#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "explore/env.hpp"
#include "explore/finetune.hpp"
#include "explore/pretrain.hpp"

namespace explore {

// Everything needed to reproduce a run. Serialised as flat `key = value`
// lines grouped under [run], [env], [pretrain] and [finetune] tables; key
// names are unique across tables, so the table headers are informational.
struct RunConfig {
  std::uint64_t seed = 0;
  std::string out = "run";
  int workers = 1;
  int checkpoint_every = 50;  // 0 disables periodic checkpoints
  int heatmap_resolution = 50;
  int heatmap_episodes = 20;

  EnvParams env;
  PretrainConfig pretrain;
  FinetuneConfig finetune;

  // Sets one key from its textual value. Throws ConfigError naming the key.
  void set(const std::string& key, const std::string& value);
  // Copies run-level fields (seed, workers) into the component configs and validates.
  void resolve();

  // (table, key, value) in canonical order; values round-trip through set().
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> tables() const;
  void write(std::ostream& out) const;
};

bool is_boolean_key(const std::string& key);

// Parses `key = value` lines, `[table]` headers and `#` comments.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in);

RunConfig load_config(const std::string& path);
void apply_key_values(RunConfig& config, const std::vector<std::pair<std::string, std::string>>& kv);

}  // namespace explore
