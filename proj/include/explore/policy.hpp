#pragma once

#include <string>
#include <vector>

#include "explore/nn.hpp"
#include "explore/random.hpp"

namespace explore {

struct ActionSample {
  Vector action;
  double logp = 0;
};

// Diagonal Gaussian over actions; the mean comes from an Mlp, the log standard
// deviation is a state-independent learnable vector.
class GaussianPolicy {
 public:
  GaussianPolicy() = default;
  GaussianPolicy(Mlp mean_net, Vector log_std);

  static GaussianPolicy create(int state_dim, int action_dim, const std::vector<int>& hidden, std::uint64_t seed,
                               double initial_log_std = -0.5);

  const Mlp& mean_net() const { return mean_net_; }
  const Vector& log_std() const { return log_std_; }
  int state_dim() const { return mean_net_.input_size(); }
  int action_dim() const { return mean_net_.output_size(); }

  Vector mean(const Vector& state) const { return mean_net_.forward(state); }
  ActionSample sample_action(const Vector& state, Rng& rng) const;
  double log_prob(const Vector& state, const Vector& action) const;

  // One sample per column. When `tape` is given it records the mean network
  // pass and `means` receives the means.
  Vector log_prob_batch(const Matrix& states, const Matrix& actions, GradTape* tape = nullptr,
                        Matrix* means = nullptr) const;

  // d/dθ Σ_i coeff_i · log π_θ(a_i | s_i), flat layout of parameters().
  Vector log_prob_gradient(const Matrix& states, const Matrix& actions, const Vector& coeffs) const;

  // Mean-network parameters followed by log_std.
  std::size_t parameter_count() const { return mean_net_.parameter_count() + static_cast<std::size_t>(log_std_.size()); }
  Vector parameters() const;
  void set_parameters(const Eigen::Ref<const Vector>& params);

  // nn checkpoint of the mean network with log_std appended.
  void save(const std::string& path) const;
  static GaussianPolicy load(const std::string& path);

 private:
  Mlp mean_net_;
  Vector log_std_;
};

// Mean over the columns of `states` of KL(behavioral(.|s) || target(.|s)).
double kl_estimate(const GaussianPolicy& behavioral, const GaussianPolicy& target, const Matrix& states);

// Same, with the behavioral means at `states` precomputed.
double kl_estimate(const Matrix& behavioral_means, const Vector& behavioral_log_std, const GaussianPolicy& target,
                   const Matrix& states);

}  // namespace explore
