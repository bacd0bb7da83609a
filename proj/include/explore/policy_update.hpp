#pragma once

#include <vector>

#include "explore/curiosity.hpp"
#include "explore/nn.hpp"
#include "explore/policy.hpp"
#include "explore/trajectory.hpp"

namespace explore {

// Steps entering an importance-sampled surrogate, with their stop-gradient weights.
struct SurrogateBatch {
  Matrix states;
  Matrix actions;
  Vector behavioral_logp;
  Vector step_weights;

  Eigen::Index size() const { return states.cols(); }
};

// value = sum_i w_i * exp(log pi(a_i|s_i) - log b(a_i|s_i)); gradient w.r.t. the policy parameters.
LossAndGradient importance_surrogate(const GaussianPolicy& policy, const SurrogateBatch& batch);

// Per-trajectory weights spread over each selected trajectory's steps:
// w_step = weight[k] / (steps * |selection|). `selection` may repeat indices;
// `weights` is indexed like `selection`.
SurrogateBatch trajectory_weighted_batch(const std::vector<Trajectory>& batch, const std::vector<int>& selection,
                                         const Vector& weights);

// Discounted returns-to-go with a batch-mean baseline, normalised by the total step count.
SurrogateBatch return_weighted_batch(const std::vector<Trajectory>& batch, double discount);

// Decision states of every trajectory, stacked column-wise.
Matrix stack_states(const std::vector<Trajectory>& batch);

struct TrustRegionResult {
  int accepted_steps = 0;
  double kl = 0;            // KL of the accepted policy against the behavioral snapshot
  double surrogate = 0;     // surrogate value at the last evaluated point
  bool aborted = false;     // non-finite surrogate or KL; policy and optimizer restored
};

// Repeated Adam ascent on the surrogate. Stops at `max_steps` or when the mean
// KL(behavioral || target) over `kl_states` exceeds `kl_threshold`; the step that
// crossed the threshold is undone, so the returned policy satisfies the bound.
TrustRegionResult kl_bounded_ascent(GaussianPolicy& policy, Adam& optimizer, const SurrogateBatch& batch,
                                    const Matrix& kl_states, double kl_threshold, int max_steps);

}  // namespace explore
