#include <doctest.h>

#include "explore/env.hpp"
#include "explore/policy_update.hpp"
#include "explore/rollout.hpp"
#include "oracles.hpp"

using namespace explore;

namespace {

std::vector<Trajectory> small_batch(const GaussianPolicy& pol, int count, std::uint64_t seed, const GoalTask* task = nullptr) {
  EnvParams p;
  p.horizon = 12;
  return rollout_batch(pol, make_gridworld_class(p), count, seed, 0, 1, task);
}

}  // namespace

TEST_CASE("rollout") {
  const GaussianPolicy pol = GaussianPolicy::create(2, 2, {8, 8}, 1);
  const EnvClass cls = make_gridworld_class();

  SUBCASE("shapes and behavioral log-densities") {
    Rng rng(3);
    const Trajectory t = rollout(pol, cls, rng);
    CHECK(t.states.cols() == 151);
    CHECK(t.actions.cols() == 150);
    CHECK(t.logp_behavioral.size() == 150);
    CHECK(t.rewards.size() == 0);
    CHECK(t.states.col(0) == cls.geometry().start());
    for (int i = 0; i < 150; i += 17) CHECK(t.logp_behavioral[i] == doctest::Approx(pol.log_prob(t.states.col(i), t.actions.col(i))));
  }
  SUBCASE("worker count does not change the batch") {
    const auto a = rollout_batch(pol, cls, 7, 5, 2, 1);
    const auto b = rollout_batch(pol, cls, 7, 5, 2, 3);
    for (std::size_t i = 0; i < 7; ++i) {
      CHECK(a[i].states == b[i].states);
      CHECK(a[i].env_id == b[i].env_id);
    }
  }
  SUBCASE("goal episodes stop on arrival") {
    const GoalTask task{cls.geometry().start(), 0.5, 0.99};
    Rng rng(1);
    const Trajectory t = rollout(pol, cls, rng, &task);
    CHECK(t.steps() == 1);
    CHECK(t.rewards.size() == 1);
    CHECK(t.rewards[0] == 1.0);
  }
}

TEST_CASE("importance surrogate") {
  const GaussianPolicy pol = GaussianPolicy::create(2, 2, {6, 6}, 2);
  const auto batch = small_batch(pol, 4, 9);
  Vector w(3);
  w << 0.7, -0.2, -0.5;
  const SurrogateBatch sb = trajectory_weighted_batch(batch, {0, 2, 3}, w);

  SUBCASE("step weights spread each trajectory weight over its steps") {
    CHECK(sb.size() == 36);
    CHECK(sb.step_weights[0] == doctest::Approx(0.7 / (12 * 3)));
    CHECK(sb.step_weights.sum() == doctest::Approx(0.0).epsilon(1e-14));
  }
  SUBCASE("at the behavioral policy ratios are one and the gradient is on-policy") {
    const auto s = importance_surrogate(pol, sb);
    CHECK(s.value == doctest::Approx(sb.step_weights.sum()));
    const Vector on_policy = pol.log_prob_gradient(sb.states, sb.actions, sb.step_weights);
    CHECK((s.gradient - on_policy).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, on_policy.cwiseAbs().maxCoeff()));
  }
  SUBCASE("gradient matches finite differences away from the behavioral policy") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      GaussianPolicy moved = pol;
      Rng rng(seed);
      std::normal_distribution<double> g(0, 0.05);
      Vector th = moved.parameters();
      for (auto& x : th) x += g(rng);
      moved.set_parameters(th);
      const auto s = importance_surrogate(moved, sb);
      auto f = [&](const Eigen::VectorXd& t) {
        GaussianPolicy p = pol;
        p.set_parameters(t);
        return importance_surrogate(p, sb).value;
      };
      CHECK(oracle::max_relative_error(s.gradient, oracle::finite_difference(f, th), 1e-7) < 1e-4);
    }
  }
}

TEST_CASE("return weighted batch") {
  const GaussianPolicy pol = GaussianPolicy::create(2, 2, {6}, 3);
  auto batch = small_batch(pol, 2, 4);
  batch[0].rewards = Vector::Zero(12);
  batch[0].rewards[11] = 1;
  batch[1].rewards = Vector::Zero(12);
  const SurrogateBatch sb = return_weighted_batch(batch, 0.5);
  // Returns-to-go of trajectory 0 are 0.5^(11 - t); the rest are zero.
  double mean = 0;
  for (int t = 0; t < 12; ++t) mean += std::pow(0.5, 11 - t);
  mean /= 24;
  CHECK(sb.step_weights[11] == doctest::Approx((1.0 - mean) / 24));
  CHECK(sb.step_weights[10] == doctest::Approx((0.5 - mean) / 24));
  CHECK(sb.step_weights[12] == doctest::Approx(-mean / 24));
  CHECK(sb.step_weights.sum() == doctest::Approx(0).epsilon(1e-14));
}

TEST_CASE("KL-bounded ascent") {
  const GaussianPolicy start = GaussianPolicy::create(2, 2, {8, 8}, 4);
  const auto batch = small_batch(start, 6, 10);
  Vector w = Vector::LinSpaced(6, -1, 1);
  const SurrogateBatch sb = trajectory_weighted_batch(batch, {0, 1, 2, 3, 4, 5}, w);
  const Matrix states = stack_states(batch);

  SUBCASE("zero threshold accepts nothing") {
    GaussianPolicy pol = start;
    Adam adam(pol.parameter_count(), AdamParams{1e-2});
    const auto r = kl_bounded_ascent(pol, adam, sb, states, 0.0, 30);
    CHECK(r.accepted_steps == 0);
    CHECK(pol.parameters() == start.parameters());
    CHECK(adam.steps() == 0);
  }
  SUBCASE("zero max steps leaves the policy alone") {
    GaussianPolicy pol = start;
    Adam adam(pol.parameter_count(), AdamParams{1e-2});
    const auto r = kl_bounded_ascent(pol, adam, sb, states, 15.0, 0);
    CHECK(r.accepted_steps == 0);
    CHECK(pol.parameters() == start.parameters());
  }
  SUBCASE("the crossing step is undone") {
    GaussianPolicy pol = start;
    Adam adam(pol.parameter_count(), AdamParams{1e-3});
    const auto r = kl_bounded_ascent(pol, adam, sb, states, 1e-3, 500);
    INFO("steps ", r.accepted_steps, " kl ", r.kl);
    CHECK(r.accepted_steps > 0);
    CHECK(r.accepted_steps < 500);
    CHECK(r.kl <= 1e-3);
    CHECK(kl_estimate(start, pol, states) == doctest::Approx(r.kl).epsilon(1e-12));
    CHECK(adam.steps() == r.accepted_steps);
  }
  SUBCASE("ascent raises the surrogate") {
    GaussianPolicy pol = start;
    Adam adam(pol.parameter_count(), AdamParams{1e-2});
    const double before = importance_surrogate(pol, sb).value;
    kl_bounded_ascent(pol, adam, sb, states, 15.0, 20);
    CHECK(importance_surrogate(pol, sb).value > before);
  }
  SUBCASE("non-finite surrogate restores the policy") {
    SurrogateBatch bad = sb;
    bad.step_weights[3] = std::nan("");
    GaussianPolicy pol = start;
    Adam adam(pol.parameter_count(), AdamParams{1e-2});
    const auto r = kl_bounded_ascent(pol, adam, bad, states, 15.0, 5);
    CHECK(r.aborted);
    CHECK(pol.parameters() == start.parameters());
  }
}
