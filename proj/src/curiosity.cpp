#include "explore/curiosity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "explore/errors.hpp"

namespace explore {

namespace {

std::vector<int> model_widths(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> w{in};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(out);
  return w;
}

}  // namespace

ForwardModel::ForwardModel(int state_dim, int action_dim, const ForwardModelParams& params, std::uint64_t seed)
    : ForwardModel(Mlp::initialized(model_widths(state_dim + action_dim, params.hidden, state_dim), seed, 1.0),
                   state_dim, params) {}

ForwardModel::ForwardModel(Mlp net, int state_dim, const ForwardModelParams& params)
    : state_dim_(state_dim), params_(params), net_(std::move(net)),
      adam_(net_.parameter_count(), AdamParams{params.learning_rate}) {
  if (net_.output_size() != state_dim || net_.input_size() <= state_dim)
    throw InputError("ForwardModel: network must map state+action to state");
}

Vector ForwardModel::predict(const Vector& state, const Vector& action) const {
  if (state.size() != state_dim_ || action.size() != action_dim()) throw InputError("ForwardModel::predict: shape mismatch");
  Vector in(state.size() + action.size());
  in << state, action;
  return net_.forward(in);
}

Matrix ForwardModel::predict_batch(const Matrix& states, const Matrix& actions) const {
  Matrix in(states.rows() + actions.rows(), states.cols());
  in << states, actions;
  return net_.forward_batch(in);
}

double curiosity_reward(const ForwardModel& model, const Vector& state, const Vector& action, const Vector& next_state) {
  return 0.5 * (model.predict(state, action) - next_state).squaredNorm();
}

LossAndGradient curiosity_loss(const Mlp& net, const Matrix& inputs, const Matrix& targets) {
  if (inputs.cols() == 0) throw InputError("curiosity_loss: empty batch");
  GradTape tape;
  const Matrix diff = net.forward_batch(inputs, &tape) - targets;
  const double n = static_cast<double>(inputs.cols());
  LossAndGradient out;
  out.value = 0.5 * diff.squaredNorm() / n;
  out.gradient = Vector::Zero(static_cast<Eigen::Index>(net.parameter_count()));
  net.backward(tape, diff / n, out.gradient);
  return out;
}

void gather_transitions(const std::vector<Trajectory>& batch, Matrix& inputs, Matrix& targets) {
  Eigen::Index total = 0;
  for (const auto& t : batch) total += t.steps();
  if (batch.empty()) {
    inputs.resize(0, 0);
    targets.resize(0, 0);
    return;
  }
  const Eigen::Index sd = batch.front().states.rows();
  const Eigen::Index ad = batch.front().actions.rows();
  inputs.resize(sd + ad, total);
  targets.resize(sd, total);
  Eigen::Index col = 0;
  for (const auto& t : batch) {
    const Eigen::Index n = t.steps();
    inputs.block(0, col, sd, n) = t.states.leftCols(n);
    inputs.block(sd, col, ad, n) = t.actions;
    targets.middleCols(col, n) = t.states.middleCols(1, n);
    col += n;
  }
}

ForwardModelTraining train_forward_model(ForwardModel& model, const std::vector<Trajectory>& batch, int passes,
                                         Rng& rng) {
  Matrix inputs, targets;
  gather_transitions(batch, inputs, targets);
  if (inputs.cols() == 0) throw InputError("train_forward_model: batch has no transitions");

  const Mlp saved_net = model.net();
  const Adam saved_adam = model.optimizer();
  auto full_loss = [&] { return 0.5 * (model.net().forward_batch(inputs) - targets).squaredNorm() / inputs.cols(); };

  ForwardModelTraining out;
  out.loss_curve.push_back(full_loss());
  const Eigen::Index n = inputs.cols();
  const Eigen::Index mb = std::max(1, model.params().minibatch);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  Matrix mb_in, mb_tg;
  Vector params = model.net().parameters();
  for (int pass = 0; pass < passes; ++pass) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index start = 0; start < n; start += mb) {
      const Eigen::Index len = std::min(mb, n - start);
      mb_in.resize(inputs.rows(), len);
      mb_tg.resize(targets.rows(), len);
      for (Eigen::Index j = 0; j < len; ++j) {
        mb_in.col(j) = inputs.col(order[static_cast<std::size_t>(start + j)]);
        mb_tg.col(j) = targets.col(order[static_cast<std::size_t>(start + j)]);
      }
      const LossAndGradient lg = curiosity_loss(model.net(), mb_in, mb_tg);
      try {
        if (!std::isfinite(lg.value)) throw NumericError("forward model loss is not finite");
        model.optimizer().step(params, lg.gradient);
      } catch (const NumericError&) {
        model.net() = saved_net;
        model.optimizer() = saved_adam;
        out.aborted = true;
        return out;
      }
      model.net().set_parameters(params);
    }
    out.loss_curve.push_back(full_loss());
  }
  return out;
}

std::vector<CuriosityScore> score_trajectories(const ForwardModel& model, const std::vector<Trajectory>& batch) {
  std::vector<CuriosityScore> scores;
  scores.reserve(batch.size());
  for (const auto& t : batch) {
    CuriosityScore s;
    const Eigen::Index n = t.steps();
    if (n > 0) {
      const Matrix pred = model.predict_batch(t.states.leftCols(n), t.actions);
      s.step_errors = 0.5 * (pred - t.states.middleCols(1, n)).colwise().squaredNorm().transpose();
      s.trajectory_score = s.step_errors.mean();
    }
    scores.push_back(std::move(s));
  }
  return scores;
}

}  // namespace explore
