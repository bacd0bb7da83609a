#pragma once

#include <cstdint>
#include <vector>

#include "explore/env.hpp"
#include "explore/policy.hpp"
#include "explore/trajectory.hpp"

namespace explore {

// Sparse goal-reaching task: reward 1 on entering the goal disc, which ends the episode.
struct GoalTask {
  Vec2 goal = Vec2::Zero();
  double radius = 0.5;
  double discount = 0.99;
};

// One episode in a uniformly sampled class member. Without a task the episode
// runs the full horizon and carries no rewards.
Trajectory rollout(const GaussianPolicy& policy, const EnvClass& cls, Rng& rng, const GoalTask* task = nullptr);

// `count` episodes; episode i draws from make_rng(seed, {Rollout, stream, i}),
// so the result does not depend on `workers`.
std::vector<Trajectory> rollout_batch(const GaussianPolicy& policy, const EnvClass& cls, int count, std::uint64_t seed,
                                      std::uint64_t stream, int workers = 1, const GoalTask* task = nullptr);

}  // namespace explore
