#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "explore/env.hpp"
#include "explore/nn.hpp"
#include "explore/pretrain.hpp"
#include "explore/trajectory.hpp"

namespace explore {

// G x G visit counts over [0, size]^2; cell (row, col) covers y-bin row, x-bin col.
class VisitGrid {
 public:
  explicit VisitGrid(int resolution = 50, double map_size = 10.0);

  int resolution() const { return resolution_; }
  double map_size() const { return map_size_; }
  std::int64_t total() const { return total_; }
  std::int64_t count(int row, int col) const { return counts_[index(row, col)]; }
  std::int64_t max_count() const;

  // Floor binning; coordinates on or beyond the upper boundary fall in the last cell.
  std::pair<int, int> cell_of(const Vec2& p) const;
  Vec2 cell_center(int row, int col) const;

  // Associative, order-insensitive merge of another grid of the same shape.
  void merge(const VisitGrid& other);

  friend void accumulate(VisitGrid& grid, const Matrix& states);

 private:
  std::size_t index(int row, int col) const { return static_cast<std::size_t>(row) * resolution_ + col; }

  int resolution_;
  double map_size_;
  std::vector<std::int64_t> counts_;
  std::int64_t total_ = 0;
};

// One increment per state column.
void accumulate(VisitGrid& grid, const Matrix& states);
void accumulate(VisitGrid& grid, const std::vector<Trajectory>& batch);

// Fraction of cells whose center lies in the free region that were visited.
double coverage(const VisitGrid& grid, const RoomMap& map);

// Per-epoch mean batch entropy.
std::vector<double> entropy_curve(const std::vector<EpochRecord>& log);

// G rows of G comma-separated counts, row 0 first (southmost y-bin).
void write_heatmap_csv(std::ostream& out, const VisitGrid& grid);
// Binary P5, counts scaled to 0..255 by the maximum count; darker is more visited
// and rows are written north-up.
void write_heatmap_pgm(std::ostream& out, const VisitGrid& grid);

}  // namespace explore

namespace explore {

struct PolicyEvaluation {
  double mean_entropy = 0;
  double coverage = 0;
  VisitGrid grid;
};

// Rolls out `episodes` reward-free episodes from a dedicated seed stream and
// summarises them: mean per-trajectory entropy, visitation grid and coverage.
PolicyEvaluation evaluate_policy(const GaussianPolicy& policy, const EnvClass& cls, int episodes, std::uint64_t seed,
                                 int knn_k = 4, int resolution = 50, int workers = 1);

}  // namespace explore
