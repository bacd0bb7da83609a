#include "explore/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "explore/errors.hpp"

namespace explore {

namespace {

constexpr double kDistanceFloor = 1e-12;
constexpr double kEulerGamma = 0.57721566490153286061;

double digamma_int(int k) {
  double h = 0;
  for (int j = 1; j < k; ++j) h += 1.0 / j;
  return -kEulerGamma + h;
}

double log_unit_ball_volume(int d) {
  return 0.5 * d * std::log(std::numbers::pi) - std::lgamma(0.5 * d + 1.0);
}

}  // namespace

EntropyEstimate knn_entropy(const Matrix& points, int k) {
  const int n = static_cast<int>(points.cols());
  const int d = static_cast<int>(points.rows());
  if (k < 1) throw InputError("knn_entropy: k must be >= 1");
  if (n <= k) throw InputError("knn_entropy: need more points than k");
  if (d < 1) throw InputError("knn_entropy: zero-dimensional points");

  // Exact O(n^2) neighbour search on squared distances.
  Matrix sq(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      const double v = (points.col(i) - points.col(j)).squaredNorm();
      sq(i, j) = v;
      sq(j, i) = v;
    }
  }
  std::vector<double> row(static_cast<std::size_t>(n - 1));
  std::vector<double> logs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::size_t m = 0;
    for (int j = 0; j < n; ++j)
      if (j != i) row[m++] = sq(j, i);
    std::nth_element(row.begin(), row.begin() + (k - 1), row.end());
    logs[static_cast<std::size_t>(i)] = std::log(std::sqrt(row[static_cast<std::size_t>(k - 1)]) + kDistanceFloor);
  }
  // Summing in sorted order makes the result independent of point order.
  std::sort(logs.begin(), logs.end());
  double log_sum = 0;
  for (double v : logs) log_sum += v;
  EntropyEstimate e;
  e.k = k;
  e.n = n;
  e.value = static_cast<double>(d) / n * log_sum + log_unit_ball_volume(d) + std::log(n - 1.0) - digamma_int(k);
  return e;
}

Vector batch_entropies(const std::vector<Trajectory>& batch, int k) {
  Vector e(static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) e[static_cast<Eigen::Index>(i)] = knn_entropy(batch[i].states, k).value;
  return e;
}

}  // namespace explore
