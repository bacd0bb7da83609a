#include "explore/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "explore/errors.hpp"

namespace explore {

Vector softmax_probs(const Vector& entropies, double temperature) {
  if (entropies.size() == 0) throw InputError("softmax_probs: empty entropy vector");
  if (!entropies.allFinite()) throw InputError("softmax_probs: non-finite entropy");
  if (!(temperature > 0)) throw InputError("softmax_probs: temperature must be positive");
  const Vector logits = -entropies / temperature;
  const double m = logits.maxCoeff();
  Vector p = (logits.array() - m).exp().matrix();
  return p / p.sum();
}

std::vector<int> select_pdf(const Vector& entropies, int m, Rng& rng, double temperature) {
  if (m < 0) throw InputError("select_pdf: negative sample count");
  std::vector<int> out;
  if (m == 0) return out;
  const Vector p = softmax_probs(entropies, temperature);
  std::discrete_distribution<int> pick(p.data(), p.data() + p.size());
  out.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) out.push_back(pick(rng));
  return out;
}

int percentile_count(double alpha, Eigen::Index n) {
  if (!(alpha > 0) || alpha > 1) throw InputError("alpha must lie in (0, 1]");
  if (n <= 0) throw InputError("empty entropy vector");
  // Relative slack absorbs products such as 0.3 * 10 = 3.0000000000000004.
  const double k = std::ceil(alpha * static_cast<double>(n) * (1 - 1e-12));
  return static_cast<int>(std::clamp<double>(k, 1, static_cast<double>(n)));
}

double var_threshold(const Vector& entropies, double alpha) {
  const int k = percentile_count(alpha, entropies.size());
  std::vector<double> v(entropies.data(), entropies.data() + entropies.size());
  std::nth_element(v.begin(), v.begin() + (k - 1), v.end());
  return v[static_cast<std::size_t>(k - 1)];
}

double cvar(const Vector& entropies, double alpha) {
  const double var = var_threshold(entropies, alpha);
  std::vector<double> v(entropies.data(), entropies.data() + entropies.size());
  std::sort(v.begin(), v.end());
  double sum = 0;
  std::size_t count = 0;
  for (double x : v) {
    if (x > var) break;
    sum += x;
    ++count;
  }
  return sum / static_cast<double>(count);
}

namespace {

template <typename Before>
std::vector<int> select_by(const Vector& values, int percentile, Before before) {
  if (percentile < 0) throw InputError("selection size must be non-negative");
  std::vector<int> idx(static_cast<std::size_t>(values.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return before(values[a], values[b]); });
  idx.resize(std::min(idx.size(), static_cast<std::size_t>(percentile)));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

std::vector<int> select_cvar(const Vector& entropies, int percentile) {
  return select_by(entropies, percentile, std::less<double>{});
}

std::vector<int> select_curious(const Vector& scores, int percentile) {
  return select_by(scores, percentile, std::greater<double>{});
}

ScheduleState make_schedule(int initial_percentile, int batch_size, int epochs, bool dynamic_alpha,
                            std::string* warning) {
  ScheduleState s;
  s.initial_percentile = initial_percentile;
  s.current_percentile = initial_percentile;
  if (!dynamic_alpha) return s;
  if (batch_size <= initial_percentile) {
    if (warning) *warning = "dynamic alpha disabled: batch size must exceed the input percentile";
    return s;
  }
  const int interval = epochs / (batch_size - initial_percentile);
  if (interval < 1) {
    if (warning) *warning = "dynamic alpha disabled: fewer epochs than batch_size - percentile";
    return s;
  }
  s.decrement_interval = interval;
  s.dynamic = true;
  return s;
}

ScheduleState alpha_schedule(const ScheduleState& state) {
  ScheduleState next = state;
  ++next.epoch;
  if (next.dynamic) {
    next.current_percentile = std::max(1, next.initial_percentile - next.epoch / next.decrement_interval);
  }
  return next;
}

}  // namespace explore
