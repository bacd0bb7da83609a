#pragma once

// Test-only reference implementations, written independently of src/.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "explore/nn.hpp"

namespace oracle {

// Straight-line MLP evaluation with explicit loops and std::tanh.
inline std::vector<double> mlp_forward(const explore::Mlp& net, const std::vector<double>& input) {
  std::vector<double> h = input;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const auto& W = net.weight(l);
    const auto& b = net.bias(l);
    std::vector<double> z(static_cast<std::size_t>(W.rows()));
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      double acc = b[i];
      for (Eigen::Index j = 0; j < W.cols(); ++j) acc += W(i, j) * h[static_cast<std::size_t>(j)];
      z[static_cast<std::size_t>(i)] = l + 1 < net.num_layers() ? std::tanh(acc) : acc;
    }
    h = std::move(z);
  }
  return h;
}

// Central differences of f at x.
inline Eigen::VectorXd finite_difference(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x,
                                         double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    const double fp = f(x);
    x[i] = xi - h;
    const double fm = f(x);
    x[i] = xi;
    g[i] = (fp - fm) / (2 * h);
  }
  return g;
}

// Worst per-coordinate relative error, with an absolute floor for tiny entries.
inline double max_relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double floor = 1e-6) {
  double worst = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

// Free region of the default 10x10 map written out by hand: four 4.4-wide rooms
// centred on the quadrants and four 1.0-wide gaps at the quadrant-boundary midpoints.
struct Box {
  double x0, x1, y0, y1;
};
inline const std::vector<Box>& default_free_boxes() {
  static const std::vector<Box> boxes = {
      {0.3, 4.7, 5.3, 9.7}, {5.3, 9.7, 5.3, 9.7}, {5.3, 9.7, 0.3, 4.7}, {0.3, 4.7, 0.3, 4.7},
      {4.7, 5.3, 7.0, 8.0}, {7.0, 8.0, 4.7, 5.3}, {4.7, 5.3, 2.0, 3.0}, {2.0, 3.0, 4.7, 5.3},
  };
  return boxes;
}
inline bool in_default_free_region(double x, double y, double tol = 1e-12) {
  for (const auto& b : default_free_boxes())
    if (x >= b.x0 - tol && x <= b.x1 + tol && y >= b.y0 - tol && y <= b.y1 + tol) return true;
  return false;
}

// Parameter t in [0,1] at which segment p->q first meets segment a-b, if it does.
inline std::optional<double> segment_hit(Eigen::Vector2d p, Eigen::Vector2d q, Eigen::Vector2d a, Eigen::Vector2d b) {
  const Eigen::Vector2d r = q - p, s = b - a;
  const double denom = r.x() * s.y() - r.y() * s.x();
  if (denom == 0) return std::nullopt;
  const Eigen::Vector2d ap = a - p;
  const double t = (ap.x() * s.y() - ap.y() * s.x()) / denom;
  const double u = (ap.x() * r.y() - ap.y() * r.x()) / denom;
  if (t < 0 || t > 1 || u < 0 || u > 1) return std::nullopt;
  return t;
}

// alpha = tenths / 10; the order statistic index is ceil(tenths * n / 10) in integer arithmetic.
inline int ceil_count(int tenths, int n) { return (tenths * n + 9) / 10; }

inline double var_by_sort(std::vector<double> v, int tenths) {
  std::sort(v.begin(), v.end());
  return v[static_cast<std::size_t>(ceil_count(tenths, static_cast<int>(v.size())) - 1)];
}

inline double cvar_by_sort(std::vector<double> v, int tenths) {
  const double var = var_by_sort(v, tenths);
  std::sort(v.begin(), v.end());
  double sum = 0;
  int count = 0;
  for (double x : v)
    if (x <= var) {
      sum += x;
      ++count;
    }
  return sum / count;
}

// p_i = exp(-e_i) / sum_j exp(-e_j), no shift, long double accumulation.
inline std::vector<double> softmax_direct(const std::vector<double>& e) {
  long double z = 0;
  for (double x : e) z += std::exp(-static_cast<long double>(x));
  std::vector<double> p;
  for (double x : e) p.push_back(static_cast<double>(std::exp(-static_cast<long double>(x)) / z));
  return p;
}

}  // namespace oracle
