#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "explore/curiosity.hpp"
#include "explore/env.hpp"
#include "explore/nn.hpp"
#include "explore/policy.hpp"
#include "explore/selection.hpp"
#include "explore/trajectory.hpp"

namespace explore {

enum class Strategy { CvarPercentile, PdfSoftmax, CuriosityPercentile };

std::string to_string(Strategy s);
// Accepts "cvar", "pdf", "curiosity-percentile"; throws ConfigError naming the field otherwise.
Strategy parse_strategy(const std::string& s);

struct PretrainConfig {
  int epochs = 150;
  int batch_size = 20;  // trajectories per epoch
  Strategy strategy = Strategy::CvarPercentile;
  int alpha_percentile = 4;  // input percentile P0; alpha = percentile / batch_size
  bool dynamic_alpha = false;
  double kl_threshold = 15.0;
  bool curiosity_enabled = false;
  double curiosity_weight = 0.1;
  double learning_rate = 3e-5;
  int max_inner_steps = 30;
  std::uint64_t seed = 0;

  int knn_k = 4;
  double softmax_temperature = 1.0;
  std::vector<int> hidden = {64, 64};
  double initial_log_std = -0.5;
  ForwardModelParams forward_model;
  int workers = 1;

  // Forward model is trained and scored when the curiosity term or curiosity selection is active.
  bool needs_forward_model() const { return curiosity_enabled || strategy == Strategy::CuriosityPercentile; }
  void validate() const;
};

struct BatchStats {
  int epoch = 0;
  Vector entropies;
  Vector curiosity;               // per-trajectory scores; empty without a forward model
  std::vector<int> selection;     // indices into the batch, may repeat for PdfSoftmax
  std::vector<bool> mask;         // selection membership per trajectory
  Vector probabilities;           // PdfSoftmax only
  int percentile = 0;
  double alpha = 0;
  double mean_entropy = 0;
  double cvar_entropy = 0;
  double kl_at_stop = 0;
  int inner_steps = 0;
  double mean_curiosity = 0;
  bool aborted = false;
};

// One row of pretrain_log.csv.
struct EpochRecord {
  int epoch = 0;
  double mean_entropy = 0;
  double cvar_entropy = 0;
  double alpha = 0;
  int percentile = 0;
  double kl_at_stop = 0;
  int inner_steps = 0;
  double mean_curiosity = 0;
};

EpochRecord to_record(const BatchStats& stats);

void write_pretrain_log(std::ostream& out, const std::vector<EpochRecord>& log);
std::vector<EpochRecord> read_pretrain_log(std::istream& in);

// Objective weights of the selected trajectories: entropy deviation from the
// selected-set mean, plus eta times the curiosity deviation when enabled.
Vector selection_weights(const Vector& entropies, const Vector& curiosity, const std::vector<int>& selection,
                         double curiosity_weight);

class Pretrainer {
 public:
  Pretrainer(EnvClass env_class, PretrainConfig config);
  Pretrainer(EnvClass env_class, PretrainConfig config, GaussianPolicy initial_policy);

  // Collect, score, select, update, advance the schedule.
  BatchStats run_epoch();
  // Runs the remaining epochs; `on_epoch` sees every epoch's stats.
  std::vector<EpochRecord> run(const std::function<void(const BatchStats&)>& on_epoch = {});

  const GaussianPolicy& policy() const { return policy_; }
  const ScheduleState& schedule() const { return schedule_; }
  const std::optional<ForwardModel>& forward_model() const { return forward_model_; }
  const std::vector<Trajectory>& last_batch() const { return last_batch_; }
  const PretrainConfig& config() const { return config_; }
  const EnvClass& env_class() const { return env_class_; }
  const std::string& schedule_warning() const { return schedule_warning_; }

 private:
  EnvClass env_class_;
  PretrainConfig config_;
  GaussianPolicy policy_;
  Adam optimizer_;
  std::optional<ForwardModel> forward_model_;
  ScheduleState schedule_;
  std::string schedule_warning_;
  std::vector<Trajectory> last_batch_;
};

}  // namespace explore
