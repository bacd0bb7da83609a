#pragma once

#include <vector>

#include "explore/nn.hpp"
#include "explore/trajectory.hpp"

namespace explore {

struct EntropyEstimate {
  double value = 0;  // nats
  int k = 0;
  int n = 0;
};

// Kozachenko-Leonenko k-nearest-neighbour estimate of differential entropy.
// `points` holds one d-dimensional point per column:
//   H = (d/n) sum_i log(R_i + eps) + log V_d + log(n - 1) - digamma(k)
// with R_i the distance from point i to its k-th nearest other point.
EntropyEstimate knn_entropy(const Matrix& points, int k);

// Per-trajectory entropies of the visited states, in batch order.
Vector batch_entropies(const std::vector<Trajectory>& batch, int k);

}  // namespace explore
