#include "explore/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "explore/errors.hpp"

namespace explore {

VisitGrid::VisitGrid(int resolution, double map_size)
    : resolution_(resolution), map_size_(map_size), counts_(static_cast<std::size_t>(resolution) * resolution, 0) {
  if (resolution < 1) throw InputError("VisitGrid: resolution must be >= 1");
  if (!(map_size > 0)) throw InputError("VisitGrid: map size must be positive");
}

std::int64_t VisitGrid::max_count() const {
  return counts_.empty() ? 0 : *std::max_element(counts_.begin(), counts_.end());
}

std::pair<int, int> VisitGrid::cell_of(const Vec2& p) const {
  auto bin = [this](double v) {
    const double scaled = std::floor(v / map_size_ * resolution_);
    return static_cast<int>(std::clamp(scaled, 0.0, static_cast<double>(resolution_ - 1)));
  };
  return {bin(p.y()), bin(p.x())};
}

Vec2 VisitGrid::cell_center(int row, int col) const {
  const double h = map_size_ / resolution_;
  return Vec2((col + 0.5) * h, (row + 0.5) * h);
}

void VisitGrid::merge(const VisitGrid& other) {
  if (other.resolution_ != resolution_ || other.map_size_ != map_size_) throw InputError("VisitGrid::merge: shape mismatch");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  total_ += other.total_;
}

void accumulate(VisitGrid& grid, const Matrix& states) {
  if (states.cols() > 0 && states.rows() != 2) throw InputError("accumulate: states must be 2D");
  for (Eigen::Index j = 0; j < states.cols(); ++j) {
    if (!states.col(j).allFinite()) throw InputError("accumulate: non-finite state");
    const auto [row, col] = grid.cell_of(states.col(j));
    ++grid.counts_[grid.index(row, col)];
    ++grid.total_;
  }
}

void accumulate(VisitGrid& grid, const std::vector<Trajectory>& batch) {
  for (const auto& t : batch) accumulate(grid, t.states);
}

double coverage(const VisitGrid& grid, const RoomMap& map) {
  int free_cells = 0, visited = 0;
  for (int r = 0; r < grid.resolution(); ++r) {
    for (int c = 0; c < grid.resolution(); ++c) {
      if (!map.is_free(grid.cell_center(r, c))) continue;
      ++free_cells;
      if (grid.count(r, c) > 0) ++visited;
    }
  }
  return free_cells == 0 ? 0.0 : static_cast<double>(visited) / free_cells;
}

std::vector<double> entropy_curve(const std::vector<EpochRecord>& log) {
  std::vector<double> out;
  out.reserve(log.size());
  for (const auto& r : log) out.push_back(r.mean_entropy);
  return out;
}

void write_heatmap_csv(std::ostream& out, const VisitGrid& grid) {
  for (int r = 0; r < grid.resolution(); ++r) {
    for (int c = 0; c < grid.resolution(); ++c) {
      if (c) out << ',';
      out << grid.count(r, c);
    }
    out << '\n';
  }
}

void write_heatmap_pgm(std::ostream& out, const VisitGrid& grid) {
  const int g = grid.resolution();
  out << "P5\n" << g << ' ' << g << "\n255\n";
  const double peak = static_cast<double>(grid.max_count());
  for (int r = g - 1; r >= 0; --r) {
    for (int c = 0; c < g; ++c) {
      const double level = peak > 0 ? static_cast<double>(grid.count(r, c)) / peak : 0.0;
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * (1.0 - level)))));
    }
  }
}

}  // namespace explore

#include "explore/entropy.hpp"
#include "explore/rollout.hpp"

namespace explore {

PolicyEvaluation evaluate_policy(const GaussianPolicy& policy, const EnvClass& cls, int episodes, std::uint64_t seed,
                                 int knn_k, int resolution, int workers) {
  if (episodes < 1) throw InputError("evaluate_policy: need at least one episode");
  const auto batch = rollout_batch(policy, cls, episodes, seed, tag(Stream::Heatmap) << 32, workers);
  PolicyEvaluation out{0, 0, VisitGrid(resolution, cls.geometry().size())};
  out.mean_entropy = batch_entropies(batch, knn_k).mean();
  accumulate(out.grid, batch);
  out.coverage = coverage(out.grid, cls.geometry());
  return out;
}

}  // namespace explore
