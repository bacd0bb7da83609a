#include "explore/rollout.hpp"

#include <algorithm>
#include <exception>
#include <thread>

#include "explore/errors.hpp"

namespace explore {

Trajectory rollout(const GaussianPolicy& policy, const EnvClass& cls, Rng& rng, const GoalTask* task) {
  Trajectory traj;
  traj.env_id = sample_env(cls, rng);
  const EnvSpec& spec = cls[traj.env_id];
  const int horizon = spec.horizon;
  const Eigen::Index sd = 2, ad = policy.action_dim();
  if (policy.state_dim() != sd || ad != 2) throw InputError("rollout: policy must map 2D states to 2D actions");

  traj.states.resize(sd, horizon + 1);
  traj.actions.resize(ad, horizon);
  traj.logp_behavioral.resize(horizon);
  if (task) traj.rewards.resize(horizon);

  EnvState state = reset(spec);
  traj.states.col(0) = state.position;
  int t = 0;
  for (bool done = false; !done;) {
    const ActionSample a = policy.sample_action(state.position, rng);
    auto [next, at_horizon] = step(spec, state, a.action);
    traj.actions.col(t) = a.action;
    traj.logp_behavioral[t] = a.logp;
    traj.states.col(t + 1) = next.position;
    done = at_horizon;
    if (task) {
      const bool reached = (next.position - task->goal).norm() <= task->radius;
      traj.rewards[t] = reached ? 1.0 : 0.0;
      done = done || reached;
    }
    state = next;
    ++t;
  }
  if (t < horizon) {
    traj.states.conservativeResize(Eigen::NoChange, t + 1);
    traj.actions.conservativeResize(Eigen::NoChange, t);
    traj.logp_behavioral.conservativeResize(t);
    if (task) traj.rewards.conservativeResize(t);
  }
  return traj;
}

std::vector<Trajectory> rollout_batch(const GaussianPolicy& policy, const EnvClass& cls, int count, std::uint64_t seed,
                                      std::uint64_t stream, int workers, const GoalTask* task) {
  std::vector<Trajectory> out(static_cast<std::size_t>(std::max(0, count)));
  auto run = [&](int begin, int step_by) {
    for (int i = begin; i < count; i += step_by) {
      Rng rng = make_rng(seed, {tag(Stream::Rollout), stream, static_cast<std::uint64_t>(i)});
      out[static_cast<std::size_t>(i)] = rollout(policy, cls, rng, task);
    }
  };
  workers = std::clamp(workers, 1, std::max(1, count));
  if (workers == 1) {
    run(0, 1);
    return out;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          run(w, workers);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace explore
