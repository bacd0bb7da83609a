#pragma once

#include <cstddef>

#include "explore/nn.hpp"

namespace explore {

// One episode: states has one more column than actions.
struct Trajectory {
  Matrix states;          // state_dim x (steps + 1)
  Matrix actions;         // action_dim x steps
  Vector logp_behavioral;  // steps
  Vector rewards;         // steps; empty for reward-free rollouts
  std::size_t env_id = 0;

  Eigen::Index steps() const { return actions.cols(); }
  // States at which an action was taken.
  auto decision_states() const { return states.leftCols(actions.cols()); }
};

}  // namespace explore
