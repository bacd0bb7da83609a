#pragma once

#include <vector>

#include "explore/nn.hpp"
#include "explore/random.hpp"
#include "explore/trajectory.hpp"

namespace explore {

struct ForwardModelParams {
  std::vector<int> hidden = {64, 64};
  double learning_rate = 1e-3;
  int inner_passes = 8;
  int minibatch = 256;
};

// Predicts the next state from (state, action).
class ForwardModel {
 public:
  ForwardModel() = default;
  ForwardModel(int state_dim, int action_dim, const ForwardModelParams& params, std::uint64_t seed);
  ForwardModel(Mlp net, int state_dim, const ForwardModelParams& params);

  int state_dim() const { return state_dim_; }
  int action_dim() const { return net_.input_size() - state_dim_; }
  const ForwardModelParams& params() const { return params_; }

  Vector predict(const Vector& state, const Vector& action) const;
  Matrix predict_batch(const Matrix& states, const Matrix& actions) const;

  const Mlp& net() const { return net_; }
  Mlp& net() { return net_; }
  Adam& optimizer() { return adam_; }

 private:
  int state_dim_ = 0;
  ForwardModelParams params_;
  Mlp net_;
  Adam adam_;
};

struct CuriosityScore {
  Vector step_errors;
  double trajectory_score = 0;  // mean of step_errors
};

struct LossAndGradient {
  double value = 0;
  Vector gradient;
};

// 1/2 ||predict(s, a) - s_next||^2. A constant signal for the policy.
double curiosity_reward(const ForwardModel& model, const Vector& state, const Vector& action, const Vector& next_state);

// Mean over columns of 1/2 ||net(input) - target||^2 and its parameter gradient.
LossAndGradient curiosity_loss(const Mlp& net, const Matrix& inputs, const Matrix& targets);

// Stacks every transition of the batch: inputs are (s ++ a) columns, targets s_next.
void gather_transitions(const std::vector<Trajectory>& batch, Matrix& inputs, Matrix& targets);

struct ForwardModelTraining {
  std::vector<double> loss_curve;  // full-batch loss before training, then after each pass
  bool aborted = false;            // non-finite loss; parameters were restored
};

ForwardModelTraining train_forward_model(ForwardModel& model, const std::vector<Trajectory>& batch, int passes,
                                         Rng& rng);

std::vector<CuriosityScore> score_trajectories(const ForwardModel& model, const std::vector<Trajectory>& batch);

}  // namespace explore
