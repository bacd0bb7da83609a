#pragma once

#include <Eigen/Core>

#include <string>
#include <utility>
#include <vector>

#include "explore/random.hpp"

namespace explore {

using Vec2 = Eigen::Vector2d;

struct Rect {
  double x0, x1, y0, y1;
  bool contains(const Vec2& p) const { return p.x() >= x0 && p.x() <= x1 && p.y() >= y0 && p.y() <= y1; }
  double area() const { return (x1 - x0) * (y1 - y0); }
};

// Axis-aligned wall segment from `a` to `b` (either a.x == b.x or a.y == b.y).
struct Segment {
  Vec2 a, b;
  bool vertical() const { return a.x() == b.x(); }
};

struct GeometryParams {
  double map_size = 10.0;
  double room_side = 4.4;
  double hallway_width = 1.0;
  double wall_inset = 1e-3;
};

// Four square rooms, one per quadrant, joined into a 4-cycle by hallway gaps
// at the midpoint of each shared quadrant boundary.
class RoomMap {
 public:
  explicit RoomMap(const GeometryParams& params = {});

  const GeometryParams& params() const { return params_; }
  double size() const { return params_.map_size; }
  const std::vector<Rect>& rooms() const { return rooms_; }
  const std::vector<Rect>& hallways() const { return hallways_; }
  const std::vector<Segment>& walls() const { return walls_; }

  bool is_free(const Vec2& p) const;
  double free_area() const;
  // Center of the north-west room.
  Vec2 start() const;

 private:
  GeometryParams params_;
  std::vector<Rect> rooms_;     // NW, NE, SE, SW
  std::vector<Rect> hallways_;  // NW-NE, NE-SE, SE-SW, SW-NW
  std::vector<Segment> walls_;
};

enum class SlopeDirection { North, South };

std::string to_string(SlopeDirection d);
SlopeDirection parse_slope(const std::string& s);

struct EnvSpec {
  SlopeDirection slope_direction = SlopeDirection::North;
  double slope_magnitude = 0.05;
  int horizon = 150;
  double max_step = 0.25;
  RoomMap geometry;

  double slope_dy() const { return slope_direction == SlopeDirection::North ? slope_magnitude : -slope_magnitude; }
};

struct EnvState {
  Vec2 position = Vec2::Zero();
  int steps_elapsed = 0;

  bool operator==(const EnvState&) const = default;
};

// Members share state/action spaces, horizon and geometry; they differ only in slope.
class EnvClass {
 public:
  explicit EnvClass(std::vector<EnvSpec> members);

  const std::vector<EnvSpec>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  const EnvSpec& operator[](std::size_t i) const { return members_[i]; }
  const RoomMap& geometry() const { return members_.front().geometry; }
  int horizon() const { return members_.front().horizon; }

 private:
  std::vector<EnvSpec> members_;
};

struct EnvParams {
  GeometryParams geometry;
  int horizon = 150;
  double max_step = 0.25;
  double slope_magnitude = 0.05;
  std::vector<SlopeDirection> slopes = {SlopeDirection::North, SlopeDirection::South};
};

EnvClass make_gridworld_class(const EnvParams& params = {});

// Uniform draw of a member index.
std::size_t sample_env(const EnvClass& cls, Rng& rng);

EnvState reset(const EnvSpec& spec);

// Pure transition. Returns the next state and whether the horizon was reached.
std::pair<EnvState, bool> step(const EnvSpec& spec, const EnvState& state, const Vec2& action);

}  // namespace explore
