#include "explore/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "explore/errors.hpp"

namespace explore {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const char* first = v.data();
  const char* last = v.data() + v.size();
  if constexpr (std::is_floating_point_v<T>) {
    try {
      std::size_t used = 0;
      out = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
    } catch (const std::exception&) {
      throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
  } else {
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<int>(key, trim(item)));
  if (out.empty()) throw ConfigError(key + ": expected a comma-separated list");
  return out;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

bool is_boolean_key(const std::string& key) { return key == "dynamic_alpha"; }

void RunConfig::set(const std::string& raw_key, const std::string& raw_value) {
  std::string key = raw_key;
  std::replace(key.begin(), key.end(), '-', '_');
  const std::string v = unquote(trim(raw_value));
  auto d = [&] { return parse_number<double>(key, v); };
  auto i = [&] { return parse_number<int>(key, v); };

  // run
  if (key == "seed") seed = parse_number<std::uint64_t>(key, v);
  else if (key == "out") out = v;
  else if (key == "workers") workers = i();
  else if (key == "checkpoint_every") checkpoint_every = i();
  else if (key == "heatmap_resolution") heatmap_resolution = i();
  else if (key == "heatmap_episodes") heatmap_episodes = i();
  // env
  else if (key == "map_size") env.geometry.map_size = d();
  else if (key == "room_side") env.geometry.room_side = d();
  else if (key == "hallway_width") env.geometry.hallway_width = d();
  else if (key == "wall_inset") env.geometry.wall_inset = d();
  else if (key == "horizon") env.horizon = i();
  else if (key == "max_step") env.max_step = d();
  else if (key == "slope_magnitude") env.slope_magnitude = d();
  else if (key == "slopes") {
    env.slopes.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) env.slopes.push_back(parse_slope(trim(item)));
  }
  // pretrain
  else if (key == "epochs") pretrain.epochs = i();
  else if (key == "batch") pretrain.batch_size = i();
  else if (key == "strategy") pretrain.strategy = parse_strategy(v);
  else if (key == "alpha_percentile") pretrain.alpha_percentile = i();
  else if (key == "dynamic_alpha") pretrain.dynamic_alpha = parse_bool(key, v);
  else if (key == "kl_threshold") pretrain.kl_threshold = d();
  else if (key == "curiosity") {
    const double eta = d();
    if (!(eta >= 0)) throw ConfigError("curiosity: weight must be non-negative");
    pretrain.curiosity_enabled = eta > 0;
    pretrain.curiosity_weight = eta;
  }
  else if (key == "learning_rate") pretrain.learning_rate = d();
  else if (key == "max_inner_steps") pretrain.max_inner_steps = i();
  else if (key == "knn_k") pretrain.knn_k = i();
  else if (key == "softmax_temperature") pretrain.softmax_temperature = d();
  else if (key == "hidden") pretrain.hidden = parse_int_list(key, v);
  else if (key == "initial_log_std") pretrain.initial_log_std = d();
  else if (key == "curiosity_learning_rate") pretrain.forward_model.learning_rate = d();
  else if (key == "curiosity_passes") pretrain.forward_model.inner_passes = i();
  else if (key == "curiosity_minibatch") pretrain.forward_model.minibatch = i();
  else if (key == "curiosity_hidden") pretrain.forward_model.hidden = parse_int_list(key, v);
  // finetune
  else if (key == "goals") finetune.goals = i();
  else if (key == "finetune_epochs") finetune.epochs_total = i();
  else if (key == "episodes_per_epoch") finetune.episodes_per_epoch = i();
  else if (key == "eval_episodes") finetune.eval_episodes = i();
  else if (key == "finetune_kl_threshold") finetune.kl_threshold = d();
  else if (key == "finetune_learning_rate") finetune.learning_rate = d();
  else if (key == "finetune_max_inner_steps") finetune.max_inner_steps = i();
  else if (key == "goal_radius") finetune.goal_radius = d();
  else if (key == "discount") finetune.discount = d();
  else throw ConfigError(key + ": unknown configuration key");
}

void RunConfig::resolve() {
  if (out.empty()) throw ConfigError("out: output directory must be set");
  if (workers < 1) throw ConfigError("workers: must be >= 1");
  if (checkpoint_every < 0) throw ConfigError("checkpoint_every: must be >= 0");
  if (heatmap_resolution < 1) throw ConfigError("heatmap_resolution: must be >= 1");
  if (heatmap_episodes < 1) throw ConfigError("heatmap_episodes: must be >= 1");
  if (env.slopes.empty()) throw ConfigError("slopes: environment class is empty");
  pretrain.seed = seed;
  pretrain.workers = workers;
  finetune.seed = seed;
  finetune.workers = workers;
  pretrain.validate();
  finetune.validate();
  make_gridworld_class(env);  // geometry validation
}

std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> RunConfig::tables() const {
  std::string slopes;
  for (std::size_t k = 0; k < env.slopes.size(); ++k) slopes += (k ? "," : "") + to_string(env.slopes[k]);
  const double eta = pretrain.curiosity_enabled ? pretrain.curiosity_weight : 0.0;
  return {
      {"run",
       {{"seed", std::to_string(seed)},
        {"out", "\"" + out + "\""},
        {"workers", std::to_string(workers)},
        {"checkpoint_every", std::to_string(checkpoint_every)},
        {"heatmap_resolution", std::to_string(heatmap_resolution)},
        {"heatmap_episodes", std::to_string(heatmap_episodes)}}},
      {"env",
       {{"map_size", fmt_double(env.geometry.map_size)},
        {"room_side", fmt_double(env.geometry.room_side)},
        {"hallway_width", fmt_double(env.geometry.hallway_width)},
        {"wall_inset", fmt_double(env.geometry.wall_inset)},
        {"horizon", std::to_string(env.horizon)},
        {"max_step", fmt_double(env.max_step)},
        {"slope_magnitude", fmt_double(env.slope_magnitude)},
        {"slopes", "\"" + slopes + "\""}}},
      {"pretrain",
       {{"epochs", std::to_string(pretrain.epochs)},
        {"batch", std::to_string(pretrain.batch_size)},
        {"strategy", "\"" + to_string(pretrain.strategy) + "\""},
        {"alpha_percentile", std::to_string(pretrain.alpha_percentile)},
        {"dynamic_alpha", pretrain.dynamic_alpha ? "true" : "false"},
        {"kl_threshold", fmt_double(pretrain.kl_threshold)},
        {"curiosity", fmt_double(eta)},
        {"learning_rate", fmt_double(pretrain.learning_rate)},
        {"max_inner_steps", std::to_string(pretrain.max_inner_steps)},
        {"knn_k", std::to_string(pretrain.knn_k)},
        {"softmax_temperature", fmt_double(pretrain.softmax_temperature)},
        {"hidden", "\"" + join_ints(pretrain.hidden) + "\""},
        {"initial_log_std", fmt_double(pretrain.initial_log_std)},
        {"curiosity_learning_rate", fmt_double(pretrain.forward_model.learning_rate)},
        {"curiosity_passes", std::to_string(pretrain.forward_model.inner_passes)},
        {"curiosity_minibatch", std::to_string(pretrain.forward_model.minibatch)},
        {"curiosity_hidden", "\"" + join_ints(pretrain.forward_model.hidden) + "\""}}},
      {"finetune",
       {{"goals", std::to_string(finetune.goals)},
        {"finetune_epochs", std::to_string(finetune.epochs_total)},
        {"episodes_per_epoch", std::to_string(finetune.episodes_per_epoch)},
        {"eval_episodes", std::to_string(finetune.eval_episodes)},
        {"finetune_kl_threshold", fmt_double(finetune.kl_threshold)},
        {"finetune_learning_rate", fmt_double(finetune.learning_rate)},
        {"finetune_max_inner_steps", std::to_string(finetune.max_inner_steps)},
        {"goal_radius", fmt_double(finetune.goal_radius)},
        {"discount", fmt_double(finetune.discount)}}},
  };
}

void RunConfig::write(std::ostream& os) const {
  bool first = true;
  for (const auto& [table, entries] : tables()) {
    if (!first) os << '\n';
    first = false;
    os << '[' << table << "]\n";
    for (const auto& [k, v] : entries) os << k << " = " << v << '\n';
  }
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Strip comments outside quotes.
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
      if (line[k] == '"') quoted = !quoted;
      if (line[k] == '#' && !quoted) {
        line.resize(k);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config line " + std::to_string(lineno) + ": malformed table header");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

void apply_key_values(RunConfig& config, const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [k, v] : kv) config.set(k, v);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  RunConfig config;
  apply_key_values(config, parse_key_values(in));
  return config;
}

}  // namespace explore
