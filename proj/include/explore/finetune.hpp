#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "explore/env.hpp"
#include "explore/policy.hpp"
#include "explore/rollout.hpp"

namespace explore {

struct FinetuneConfig {
  int goals = 5;
  int epochs_total = 400;
  int episodes_per_epoch = 20;
  int eval_episodes = 10;
  double kl_threshold = 15.0;
  double learning_rate = 1e-3;
  int max_inner_steps = 30;
  double goal_radius = 0.5;
  double discount = 0.99;
  std::uint64_t seed = 0;
  int workers = 1;

  int epochs_per_goal() const { return goals > 0 ? epochs_total / goals : 0; }
  void validate() const;
};

// Goals uniform over the free region (rejection sampling).
std::vector<GoalTask> generate_goals(const EnvClass& cls, int count, Rng& rng, double radius = 0.5,
                                     double discount = 0.99);

// Mean undiscounted return over `episodes` rollouts.
double average_return(const GaussianPolicy& policy, const EnvClass& cls, const GoalTask& task, int episodes, Rng& rng);

// One row of finetune_log.csv.
struct FinetuneRecord {
  int epoch = 0;
  int goal_index = 0;
  double average_return = 0;
  double kl_at_stop = 0;
};

struct FinetuneLog {
  std::vector<GoalTask> goals;
  std::vector<FinetuneRecord> records;
  std::vector<int> goal_change_epochs;  // first epoch of every goal after the first
};

// Sequential goals, epochs_total / goals policy-gradient epochs each; the
// policy carries over from one goal to the next.
FinetuneLog finetune_run(const GaussianPolicy& pretrained, const EnvClass& cls, const FinetuneConfig& config);

void write_finetune_log(std::ostream& out, const FinetuneLog& log);

}  // namespace explore
