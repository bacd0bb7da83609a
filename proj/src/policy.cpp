#include "explore/policy.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "explore/errors.hpp"

namespace explore {

namespace {

const double kLogTwoPi = std::log(2 * std::numbers::pi);

}  // namespace

GaussianPolicy::GaussianPolicy(Mlp mean_net, Vector log_std) : mean_net_(std::move(mean_net)), log_std_(std::move(log_std)) {
  if (log_std_.size() != mean_net_.output_size()) throw InputError("GaussianPolicy: log_std size must equal action dim");
  if (!log_std_.allFinite()) throw InputError("GaussianPolicy: non-finite log_std");
}

GaussianPolicy GaussianPolicy::create(int state_dim, int action_dim, const std::vector<int>& hidden, std::uint64_t seed,
                                      double initial_log_std) {
  std::vector<int> widths{state_dim};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(action_dim);
  return GaussianPolicy(Mlp::initialized(widths, seed), Vector::Constant(action_dim, initial_log_std));
}

ActionSample GaussianPolicy::sample_action(const Vector& state, Rng& rng) const {
  if (!state.allFinite()) throw InputError("sample_action: non-finite state");
  const Vector mu = mean(state);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector noise(mu.size());
  for (Eigen::Index i = 0; i < noise.size(); ++i) noise[i] = normal(rng);
  ActionSample s;
  s.action = mu + log_std_.array().exp().matrix().cwiseProduct(noise);
  s.logp = -log_std_.sum() - 0.5 * static_cast<double>(mu.size()) * kLogTwoPi - 0.5 * noise.squaredNorm();
  return s;
}

double GaussianPolicy::log_prob(const Vector& state, const Vector& action) const {
  if (action.size() != action_dim()) throw InputError("log_prob: action size mismatch");
  const Vector z = (action - mean(state)).array() * (-log_std_).array().exp();
  return -log_std_.sum() - 0.5 * static_cast<double>(action.size()) * kLogTwoPi - 0.5 * z.squaredNorm();
}

Vector GaussianPolicy::log_prob_batch(const Matrix& states, const Matrix& actions, GradTape* tape, Matrix* means) const {
  if (states.cols() != actions.cols() || actions.rows() != action_dim())
    throw InputError("log_prob_batch: shape mismatch");
  Matrix mu = mean_net_.forward_batch(states, tape);
  const Eigen::ArrayXd inv_std = (-log_std_).array().exp();
  const Matrix z = ((actions - mu).array().colwise() * inv_std).matrix();
  const double constant = -log_std_.sum() - 0.5 * static_cast<double>(action_dim()) * kLogTwoPi;
  Vector out = (-0.5 * z.colwise().squaredNorm().array() + constant).matrix().transpose();
  if (means) *means = std::move(mu);
  return out;
}

Vector GaussianPolicy::log_prob_gradient(const Matrix& states, const Matrix& actions, const Vector& coeffs) const {
  if (coeffs.size() != states.cols()) throw InputError("log_prob_gradient: coefficient count mismatch");
  GradTape tape;
  Matrix mu;
  log_prob_batch(states, actions, &tape, &mu);
  const Eigen::ArrayXd inv_var = (-2.0 * log_std_).array().exp();
  // d logp / d mu = (a - mu) / sigma^2 ; d logp / d log_std = z^2 - 1
  Matrix diff = actions - mu;
  Matrix dmu = (diff.array().colwise() * inv_var).matrix();
  dmu.array().rowwise() *= coeffs.transpose().array();

  Vector grad = Vector::Zero(static_cast<Eigen::Index>(parameter_count()));
  const Eigen::Index net_size = static_cast<Eigen::Index>(mean_net_.parameter_count());
  mean_net_.backward(tape, dmu, grad.head(net_size));
  const Matrix z2 = (diff.array().square().colwise() * inv_var).matrix();
  grad.tail(log_std_.size()) = (z2.array() - 1.0).matrix() * coeffs;
  return grad;
}

Vector GaussianPolicy::parameters() const {
  Vector p(static_cast<Eigen::Index>(parameter_count()));
  p << mean_net_.parameters(), log_std_;
  return p;
}

void GaussianPolicy::set_parameters(const Eigen::Ref<const Vector>& params) {
  if (params.size() != static_cast<Eigen::Index>(parameter_count()))
    throw InputError("GaussianPolicy::set_parameters: size mismatch");
  const Eigen::Index net_size = static_cast<Eigen::Index>(mean_net_.parameter_count());
  mean_net_.set_parameters(params.head(net_size));
  log_std_ = params.tail(log_std_.size());
}

void GaussianPolicy::save(const std::string& path) const { save_checkpoint(path, mean_net_, log_std_); }

GaussianPolicy GaussianPolicy::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open policy checkpoint: " + path);
  Mlp net = read_checkpoint(in);
  Vector log_std(net.output_size());
  for (Eigen::Index i = 0; i < log_std.size(); ++i) {
    if (!in.read(reinterpret_cast<char*>(&log_std[i]), sizeof(double)))
      throw InputError("policy checkpoint: missing log_std");
  }
  return GaussianPolicy(std::move(net), std::move(log_std));
}

double kl_estimate(const Matrix& behavioral_means, const Vector& behavioral_log_std, const GaussianPolicy& target,
                   const Matrix& states) {
  if (states.cols() == 0) throw InputError("kl_estimate: empty state sample");
  if (behavioral_means.cols() != states.cols()) throw InputError("kl_estimate: mean/state count mismatch");
  const Matrix target_means = target.mean_net().forward_batch(states);
  const Eigen::ArrayXd lb = behavioral_log_std.array();
  const Eigen::ArrayXd lt = target.log_std().array();
  const Eigen::ArrayXd inv_var_t = (-2.0 * lt).exp();
  // Per-dimension: log(s_t/s_b) + (s_b^2 + (m_b - m_t)^2) / (2 s_t^2) - 1/2
  const double state_free = ((lt - lb) + 0.5 * (2.0 * (lb - lt)).exp() - 0.5).sum();
  const Eigen::ArrayXXd d2 = (behavioral_means - target_means).array().square();
  const double mean_term = 0.5 * (d2.colwise() * inv_var_t).sum() / static_cast<double>(states.cols());
  return std::max(0.0, state_free + mean_term);
}

double kl_estimate(const GaussianPolicy& behavioral, const GaussianPolicy& target, const Matrix& states) {
  if (states.cols() == 0) throw InputError("kl_estimate: empty state sample");
  return kl_estimate(behavioral.mean_net().forward_batch(states), behavioral.log_std(), target, states);
}

}  // namespace explore
