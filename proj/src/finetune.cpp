#include "explore/finetune.hpp"

#include <iomanip>
#include <iostream>
#include <ostream>

#include "explore/errors.hpp"
#include "explore/policy_update.hpp"

namespace explore {

void FinetuneConfig::validate() const {
  if (goals < 1) throw ConfigError("goals: must be >= 1");
  if (epochs_total < 1 || epochs_total % goals != 0)
    throw ConfigError("finetune_epochs: must be a positive multiple of goals");
  if (episodes_per_epoch < 1) throw ConfigError("episodes_per_epoch: must be >= 1");
  if (eval_episodes < 1) throw ConfigError("eval_episodes: must be >= 1");
  if (!(kl_threshold >= 0)) throw ConfigError("finetune_kl_threshold: must be non-negative");
  if (!(learning_rate > 0)) throw ConfigError("finetune_learning_rate: must be positive");
  if (!(goal_radius > 0)) throw ConfigError("goal_radius: must be positive");
  if (!(discount > 0) || discount > 1) throw ConfigError("discount: must lie in (0, 1]");
  if (workers < 1) throw ConfigError("workers: must be >= 1");
}

std::vector<GoalTask> generate_goals(const EnvClass& cls, int count, Rng& rng, double radius, double discount) {
  const RoomMap& map = cls.geometry();
  std::uniform_real_distribution<double> coord(0.0, map.size());
  std::vector<GoalTask> goals;
  while (static_cast<int>(goals.size()) < count) {
    const double x = coord(rng);
    const double y = coord(rng);
    const Vec2 p(x, y);
    if (map.is_free(p)) goals.push_back(GoalTask{p, radius, discount});
  }
  return goals;
}

double average_return(const GaussianPolicy& policy, const EnvClass& cls, const GoalTask& task, int episodes, Rng& rng) {
  if (episodes < 1) throw InputError("average_return: need at least one episode");
  double total = 0;
  for (int i = 0; i < episodes; ++i) total += rollout(policy, cls, rng, &task).rewards.sum();
  return total / episodes;
}

FinetuneLog finetune_run(const GaussianPolicy& pretrained, const EnvClass& cls, const FinetuneConfig& config) {
  config.validate();
  FinetuneLog log;
  Rng goal_rng = make_rng(config.seed, {tag(Stream::Goals)});
  log.goals = generate_goals(cls, config.goals, goal_rng, config.goal_radius, config.discount);

  GaussianPolicy policy = pretrained;
  Adam optimizer(policy.parameter_count(), AdamParams{config.learning_rate});
  const int per_goal = config.epochs_per_goal();
  int epoch = 0;
  for (int g = 0; g < config.goals; ++g) {
    const GoalTask& task = log.goals[static_cast<std::size_t>(g)];
    if (g > 0) log.goal_change_epochs.push_back(epoch);
    for (int e = 0; e < per_goal; ++e, ++epoch) {
      const auto epoch_tag = static_cast<std::uint64_t>(epoch);
      Rng eval_rng = make_rng(config.seed, {tag(Stream::Evaluation), epoch_tag});
      FinetuneRecord rec;
      rec.epoch = epoch;
      rec.goal_index = g;
      rec.average_return = average_return(policy, cls, task, config.eval_episodes, eval_rng);

      // Separate rollout stream from the pretraining epochs.
      const auto batch = rollout_batch(policy, cls, config.episodes_per_epoch, config.seed,
                                       (1ULL << 32) | epoch_tag, config.workers, &task);
      const SurrogateBatch surrogate = return_weighted_batch(batch, task.discount);
      const TrustRegionResult update = kl_bounded_ascent(policy, optimizer, surrogate, stack_states(batch),
                                                         config.kl_threshold, config.max_inner_steps);
      if (update.aborted) std::cerr << "warning: finetune epoch " << epoch << ": non-finite surrogate, policy restored\n";
      rec.kl_at_stop = update.kl;
      log.records.push_back(rec);
    }
  }
  return log;
}

void write_finetune_log(std::ostream& out, const FinetuneLog& log) {
  out << "epoch,goal_index,average_return,kl_at_stop\n";
  out << std::setprecision(12);
  for (const auto& r : log.records) out << r.epoch << ',' << r.goal_index << ',' << r.average_return << ',' << r.kl_at_stop << '\n';
}

}  // namespace explore
