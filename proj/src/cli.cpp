#include "explore/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "explore/config.hpp"
#include "explore/errors.hpp"
#include "explore/finetune.hpp"
#include "explore/metrics.hpp"
#include "explore/pretrain.hpp"

namespace fs = std::filesystem;

namespace explore {

namespace {

// `--key value`, `--key=value`, and bare `--flag` for boolean keys.
std::vector<std::pair<std::string, std::string>> parse_overrides(const std::vector<std::string>& args) {
  std::vector<std::pair<std::string, std::string>> kv;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& tok = args[i];
    if (tok.rfind("--", 0) != 0 || tok.size() <= 2) throw ConfigError("unexpected argument '" + tok + "'");
    std::string key = tok.substr(2);
    std::replace(key.begin(), key.end(), '-', '_');
    if (const auto eq = key.find('='); eq != std::string::npos) {
      kv.emplace_back(key.substr(0, eq), key.substr(eq + 1));
      continue;
    }
    if (is_boolean_key(key)) {
      if (i + 1 < args.size() && (args[i + 1] == "true" || args[i + 1] == "false")) {
        kv.emplace_back(key, args[++i]);
      } else {
        kv.emplace_back(key, "true");
      }
      continue;
    }
    if (i + 1 >= args.size()) throw ConfigError(key + ": missing value");
    kv.emplace_back(key, args[++i]);
  }
  return kv;
}

RunConfig build_config(const std::string& path, const std::vector<std::string>& extras) {
  RunConfig config = path.empty() ? RunConfig{} : load_config(path);
  apply_key_values(config, parse_overrides(extras));
  config.resolve();
  return config;
}

std::ofstream open_out(const fs::path& p, bool binary = false) {
  std::ofstream f(p, binary ? std::ios::binary : std::ios::out);
  if (!f) throw InputError("cannot write " + p.string());
  return f;
}

void write_resolved(const fs::path& p, const RunConfig& config) {
  auto f = open_out(p);
  config.write(f);
}

int cmd_pretrain(const std::string& config_path, const std::vector<std::string>& extras, std::ostream& out) {
  const RunConfig config = build_config(config_path, extras);
  const fs::path dir(config.out);
  fs::create_directories(dir);
  write_resolved(dir / "config.resolved.toml", config);

  const EnvClass cls = make_gridworld_class(config.env);
  Pretrainer trainer(cls, config.pretrain);
  if (config.checkpoint_every > 0) fs::create_directories(dir / "checkpoints");
  const auto log = trainer.run([&](const BatchStats& s) {
    if (config.checkpoint_every > 0 && (s.epoch + 1) % config.checkpoint_every == 0) {
      std::ostringstream name;
      name << "policy_epoch_" << std::setw(5) << std::setfill('0') << s.epoch + 1 << ".ckpt";
      trainer.policy().save((dir / "checkpoints" / name.str()).string());
    }
  });

  {
    auto f = open_out(dir / "pretrain_log.csv");
    write_pretrain_log(f, log);
  }
  trainer.policy().save((dir / "policy.ckpt").string());
  if (trainer.forward_model()) save_checkpoint((dir / "forward_model.ckpt").string(), trainer.forward_model()->net());

  const PolicyEvaluation eval = evaluate_policy(trainer.policy(), cls, config.heatmap_episodes, config.seed,
                                                config.pretrain.knn_k, config.heatmap_resolution, config.workers);
  {
    auto f = open_out(dir / "heatmap.csv");
    write_heatmap_csv(f, eval.grid);
  }
  {
    auto f = open_out(dir / "heatmap.pgm", true);
    write_heatmap_pgm(f, eval.grid);
  }
  {
    auto f = open_out(dir / "summary.csv");
    f << std::setprecision(12) << "mean_entropy,coverage\n" << eval.mean_entropy << ',' << eval.coverage << '\n';
  }
  out << "pretrain: " << log.size() << " epochs, final mean entropy " << log.back().mean_entropy << ", coverage "
      << eval.coverage << ", outputs in " << dir.string() << '\n';
  return kExitOk;
}

int cmd_finetune(const std::string& config_path, const std::string& checkpoint, const std::vector<std::string>& extras,
                 std::ostream& out) {
  const RunConfig config = build_config(config_path, extras);
  const fs::path dir(config.out);
  fs::create_directories(dir);
  write_resolved(dir / "finetune.resolved.toml", config);

  const EnvClass cls = make_gridworld_class(config.env);
  const GaussianPolicy policy = GaussianPolicy::load(checkpoint);
  const FinetuneLog log = finetune_run(policy, cls, config.finetune);
  {
    auto f = open_out(dir / "finetune_log.csv");
    write_finetune_log(f, log);
  }
  {
    auto f = open_out(dir / "goals.csv");
    f << std::setprecision(12) << "goal_index,x,y,radius,first_epoch\n";
    for (std::size_t g = 0; g < log.goals.size(); ++g) {
      f << g << ',' << log.goals[g].goal.x() << ',' << log.goals[g].goal.y() << ',' << log.goals[g].radius << ','
        << static_cast<int>(g) * config.finetune.epochs_per_goal() << '\n';
    }
  }
  double last = 0;
  if (!log.records.empty()) last = log.records.back().average_return;
  out << "finetune: " << log.records.size() << " epochs over " << log.goals.size() << " goals, final average return "
      << last << ", outputs in " << dir.string() << '\n';
  return kExitOk;
}

int cmd_eval(const std::string& config_path, const std::string& checkpoint, int episodes,
             const std::vector<std::string>& extras, std::ostream& out) {
  const RunConfig config = build_config(config_path, extras);
  if (episodes < 1) throw ConfigError("episodes: must be >= 1");
  const EnvClass cls = make_gridworld_class(config.env);
  const GaussianPolicy policy = GaussianPolicy::load(checkpoint);
  const PolicyEvaluation eval = evaluate_policy(policy, cls, episodes, config.seed, config.pretrain.knn_k,
                                                config.heatmap_resolution, config.workers);
  out << std::setprecision(12) << eval.mean_entropy << ',' << eval.coverage << '\n';
  return kExitOk;
}

int cmd_compare(const std::vector<std::string>& dirs, const std::string& output, std::ostream& out) {
  if (dirs.empty()) throw ConfigError("compare: at least one run directory required");
  std::vector<std::vector<EpochRecord>> logs;
  std::size_t rows = 0;
  for (const auto& d : dirs) {
    const fs::path p = fs::path(d) / "pretrain_log.csv";
    std::ifstream f(p);
    if (!f) throw InputError("compare: cannot read " + p.string());
    logs.push_back(read_pretrain_log(f));
    rows = std::max(rows, logs.back().size());
  }
  std::ostringstream csv;
  csv << "epoch";
  for (const auto& d : dirs) {
    std::string label = fs::path(d).lexically_normal().filename().string();
    if (label.empty()) label = fs::path(d).lexically_normal().parent_path().filename().string();
    csv << ',' << label;
  }
  csv << '\n' << std::setprecision(12);
  for (std::size_t r = 0; r < rows; ++r) {
    csv << r;
    for (const auto& log : logs) {
      csv << ',';
      if (r < log.size()) csv << entropy_curve(log)[r];
    }
    csv << '\n';
  }
  if (output.empty()) {
    out << csv.str();
  } else {
    auto f = open_out(output);
    f << csv.str();
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exploration pretraining over a class of sloped four-room gridworlds"};
  app.require_subcommand(1);

  std::string config_path, checkpoint, compare_out;
  int episodes = 20;
  std::vector<std::string> run_dirs;

  auto* pretrain = app.add_subcommand("pretrain", "Unsupervised exploration pretraining");
  pretrain->add_option("-c,--config", config_path, "Run config file");
  pretrain->allow_extras();
  pretrain->footer("Any config key can be overridden with --key value, e.g. --strategy pdf --dynamic-alpha "
                   "--kl-threshold 100 --curiosity 0.1 --alpha-percentile 4 --epochs 150 --batch 20 --seed 1 --out DIR");

  auto* finetune = app.add_subcommand("finetune", "Goal-reaching fine-tuning of a pretrained policy");
  finetune->add_option("-c,--config", config_path, "Run config file");
  finetune->add_option("--checkpoint", checkpoint, "Policy checkpoint from pretrain")->required();
  finetune->allow_extras();

  auto* eval = app.add_subcommand("eval", "Print mean batch entropy and coverage of a policy as one CSV row");
  eval->add_option("-c,--config", config_path, "Run config file");
  eval->add_option("--checkpoint", checkpoint, "Policy checkpoint")->required();
  eval->add_option("--episodes", episodes, "Evaluation episodes");
  eval->allow_extras();

  auto* compare = app.add_subcommand("compare", "Merge per-epoch mean entropies of several runs into one CSV");
  compare->add_option("runs", run_dirs, "Run directories")->required();
  compare->add_option("-o,--output", compare_out, "Output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*pretrain) return cmd_pretrain(config_path, pretrain->remaining(), out);
    if (*finetune) return cmd_finetune(config_path, checkpoint, finetune->remaining(), out);
    if (*eval) return cmd_eval(config_path, checkpoint, episodes, eval->remaining(), out);
    if (*compare) return cmd_compare(run_dirs, compare_out, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace explore
