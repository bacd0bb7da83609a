#include <doctest.h>

#include <sstream>

#include "explore/errors.hpp"
#include "explore/finetune.hpp"
#include "oracles.hpp"

using namespace explore;

TEST_CASE("generate_goals") {
  const EnvClass cls = make_gridworld_class();
  Rng rng(1);
  CHECK(generate_goals(cls, 0, rng).empty());
  const auto goals = generate_goals(cls, 10000, rng);
  CHECK(goals.size() == 10000);
  int outside = 0;
  for (const auto& g : goals) outside += !oracle::in_default_free_region(g.goal.x(), g.goal.y(), 0.0);
  CHECK(outside == 0);
  Rng a(5), b(5);
  const auto ga = generate_goals(cls, 20, a), gb = generate_goals(cls, 20, b);
  for (std::size_t i = 0; i < 20; ++i) CHECK(ga[i].goal == gb[i].goal);
}

TEST_CASE("average_return") {
  const EnvClass cls = make_gridworld_class();
  const GaussianPolicy pol = GaussianPolicy::create(2, 2, {16, 16}, 2);
  SUBCASE("a goal disc covering the map is reached at once") {
    Rng rng(1);
    CHECK(average_return(pol, cls, GoalTask{Vec2(5, 5), 20.0, 0.99}, 10, rng) == 1.0);
  }
  SUBCASE("a vanishing goal in the far corner is not reached") {
    Rng rng(2);
    CHECK(average_return(pol, cls, GoalTask{Vec2(9.69, 0.31), 1e-9, 0.99}, 100, rng) == doctest::Approx(0.0).epsilon(0.01));
  }
  SUBCASE("always within [0, 1]") {
    Rng rng(3);
    Rng grng(4);
    for (const auto& g : generate_goals(cls, 10, grng, 1.5)) {
      const double r = average_return(pol, cls, g, 5, rng);
      CHECK(r >= 0);
      CHECK(r <= 1);
    }
  }
}

TEST_CASE("finetune_run") {
  EnvParams ep;
  ep.horizon = 30;
  const EnvClass cls = make_gridworld_class(ep);
  const GaussianPolicy pol = GaussianPolicy::create(2, 2, {8, 8}, 3);
  FinetuneConfig c;
  c.goals = 3;
  c.epochs_total = 6;
  c.episodes_per_epoch = 4;
  c.eval_episodes = 3;
  c.max_inner_steps = 3;
  c.seed = 9;

  const FinetuneLog log = finetune_run(pol, cls, c);
  CHECK(log.records.size() == 6);
  CHECK(log.goals.size() == 3);
  CHECK(log.goal_change_epochs == std::vector<int>{2, 4});
  for (const auto& r : log.records) {
    CHECK(r.goal_index == r.epoch / 2);
    CHECK(r.kl_at_stop <= c.kl_threshold);
  }
  std::ostringstream a, b;
  write_finetune_log(a, log);
  write_finetune_log(b, finetune_run(pol, cls, c));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("epoch,goal_index,average_return,kl_at_stop\n", 0) == 0);

  c.epochs_total = 7;
  CHECK_THROWS_AS(finetune_run(pol, cls, c), ConfigError);
}
