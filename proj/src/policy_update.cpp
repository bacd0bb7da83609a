#include "explore/policy_update.hpp"

#include <cmath>

#include "explore/errors.hpp"

namespace explore {

LossAndGradient importance_surrogate(const GaussianPolicy& policy, const SurrogateBatch& batch) {
  LossAndGradient out;
  if (batch.size() == 0) {
    out.gradient = Vector::Zero(static_cast<Eigen::Index>(policy.parameter_count()));
    return out;
  }
  const Vector logp = policy.log_prob_batch(batch.states, batch.actions);
  const Vector ratio = (logp - batch.behavioral_logp).array().exp().matrix();
  out.value = batch.step_weights.dot(ratio);
  // d ratio = ratio * d logp
  out.gradient = policy.log_prob_gradient(batch.states, batch.actions, batch.step_weights.cwiseProduct(ratio));
  return out;
}

SurrogateBatch trajectory_weighted_batch(const std::vector<Trajectory>& batch, const std::vector<int>& selection,
                                         const Vector& weights) {
  if (weights.size() != static_cast<Eigen::Index>(selection.size()))
    throw InputError("trajectory_weighted_batch: one weight per selected trajectory required");
  Eigen::Index total = 0;
  for (int idx : selection) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= batch.size())
      throw InputError("trajectory_weighted_batch: selection index out of range");
    total += batch[static_cast<std::size_t>(idx)].steps();
  }
  SurrogateBatch out;
  if (selection.empty()) return out;
  const auto& first = batch[static_cast<std::size_t>(selection.front())];
  out.states.resize(first.states.rows(), total);
  out.actions.resize(first.actions.rows(), total);
  out.behavioral_logp.resize(total);
  out.step_weights.resize(total);
  const double count = static_cast<double>(selection.size());
  Eigen::Index col = 0;
  for (std::size_t k = 0; k < selection.size(); ++k) {
    const Trajectory& t = batch[static_cast<std::size_t>(selection[k])];
    const Eigen::Index n = t.steps();
    if (n == 0) continue;
    out.states.middleCols(col, n) = t.states.leftCols(n);
    out.actions.middleCols(col, n) = t.actions;
    out.behavioral_logp.segment(col, n) = t.logp_behavioral;
    out.step_weights.segment(col, n).setConstant(weights[static_cast<Eigen::Index>(k)] / (static_cast<double>(n) * count));
    col += n;
  }
  return out;
}

SurrogateBatch return_weighted_batch(const std::vector<Trajectory>& batch, double discount) {
  Eigen::Index total = 0;
  for (const auto& t : batch) {
    if (t.rewards.size() != t.steps()) throw InputError("return_weighted_batch: trajectory without rewards");
    total += t.steps();
  }
  SurrogateBatch out;
  if (total == 0) return out;
  const auto& first = batch.front();
  out.states.resize(first.states.rows(), total);
  out.actions.resize(first.actions.rows(), total);
  out.behavioral_logp.resize(total);
  out.step_weights.resize(total);
  Eigen::Index col = 0;
  for (const auto& t : batch) {
    const Eigen::Index n = t.steps();
    out.states.middleCols(col, n) = t.states.leftCols(n);
    out.actions.middleCols(col, n) = t.actions;
    out.behavioral_logp.segment(col, n) = t.logp_behavioral;
    double g = 0;
    for (Eigen::Index i = n; i-- > 0;) {
      g = t.rewards[i] + discount * g;
      out.step_weights[col + i] = g;
    }
    col += n;
  }
  const double baseline = out.step_weights.mean();
  out.step_weights = (out.step_weights.array() - baseline) / static_cast<double>(total);
  return out;
}

Matrix stack_states(const std::vector<Trajectory>& batch) {
  Eigen::Index total = 0;
  for (const auto& t : batch) total += t.steps();
  if (batch.empty()) return Matrix(0, 0);
  Matrix out(batch.front().states.rows(), total);
  Eigen::Index col = 0;
  for (const auto& t : batch) {
    out.middleCols(col, t.steps()) = t.decision_states();
    col += t.steps();
  }
  return out;
}

TrustRegionResult kl_bounded_ascent(GaussianPolicy& policy, Adam& optimizer, const SurrogateBatch& batch,
                                    const Matrix& kl_states, double kl_threshold, int max_steps) {
  TrustRegionResult result;
  if (max_steps <= 0 || batch.size() == 0) return result;
  if (kl_states.cols() == 0) throw InputError("kl_bounded_ascent: empty KL state sample");

  const GaussianPolicy behavioral = policy;
  const Adam initial_optimizer = optimizer;
  const Matrix behavioral_means = behavioral.mean_net().forward_batch(kl_states);

  Vector params = policy.parameters();
  for (int step = 0; step < max_steps; ++step) {
    const LossAndGradient s = importance_surrogate(policy, batch);
    result.surrogate = s.value;
    const Vector accepted = params;
    const Adam accepted_optimizer = optimizer;
    double kl = 0;
    try {
      if (!std::isfinite(s.value)) throw NumericError("surrogate is not finite");
      optimizer.step(params, -s.gradient);
      policy.set_parameters(params);
      kl = kl_estimate(behavioral_means, behavioral.log_std(), policy, kl_states);
      if (!std::isfinite(kl)) throw NumericError("KL estimate is not finite");
    } catch (const NumericError&) {
      policy = behavioral;
      optimizer = initial_optimizer;
      result.accepted_steps = 0;
      result.kl = 0;
      result.aborted = true;
      return result;
    }
    if (kl > kl_threshold) {
      params = accepted;
      optimizer = accepted_optimizer;
      policy.set_parameters(params);
      break;
    }
    result.kl = kl;
    ++result.accepted_steps;
  }
  return result;
}

}  // namespace explore
