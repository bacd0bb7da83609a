#pragma once

#include <string>
#include <vector>

#include "explore/nn.hpp"
#include "explore/random.hpp"

namespace explore {

// p_i = softmax(-e_i / temperature), computed with max-shift.
Vector softmax_probs(const Vector& entropies, double temperature = 1.0);

// m draws with replacement from softmax_probs(entropies).
std::vector<int> select_pdf(const Vector& entropies, int m, Rng& rng, double temperature = 1.0);

// Number of order statistics kept at level alpha: ceil(alpha * n), at least 1.
int percentile_count(double alpha, Eigen::Index n);

// The ceil(alpha * n)-th smallest entropy.
double var_threshold(const Vector& entropies, double alpha);

// Mean of all entropies <= var_threshold(entropies, alpha).
double cvar(const Vector& entropies, double alpha);

// Indices of the `percentile` smallest values (ties to the lower index), ascending index order.
std::vector<int> select_cvar(const Vector& entropies, int percentile);

// Indices of the `percentile` largest values (ties to the lower index), ascending index order.
std::vector<int> select_curious(const Vector& scores, int percentile);

// Percentile decrement schedule: the percentile drops by one every
// floor(epochs / (batch_size - initial_percentile)) epochs, floored at 1,
// and alpha = percentile / batch_size.
struct ScheduleState {
  int initial_percentile = 1;
  int current_percentile = 1;
  int decrement_interval = 0;  // 0 when the schedule is static
  int epoch = 0;
  bool dynamic = false;
};

// When dynamic_alpha is requested but the interval is undefined or < 1, the
// schedule is static and `warning` (if given) describes why.
ScheduleState make_schedule(int initial_percentile, int batch_size, int epochs, bool dynamic_alpha,
                            std::string* warning = nullptr);

// State for the next epoch.
ScheduleState alpha_schedule(const ScheduleState& state);

inline double schedule_alpha(const ScheduleState& s, int batch_size) {
  return static_cast<double>(s.current_percentile) / batch_size;
}

}  // namespace explore
