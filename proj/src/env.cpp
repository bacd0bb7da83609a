#include "explore/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "explore/errors.hpp"

namespace explore {

namespace {

// Subtracts the open intervals in `gaps` from [lo, hi].
std::vector<std::pair<double, double>> cut(double lo, double hi, std::vector<std::pair<double, double>> gaps) {
  std::sort(gaps.begin(), gaps.end());
  std::vector<std::pair<double, double>> out;
  double cursor = lo;
  for (const auto& [g0, g1] : gaps) {
    if (g0 > cursor) out.emplace_back(cursor, g0);
    cursor = std::max(cursor, g1);
  }
  if (cursor < hi) out.emplace_back(cursor, hi);
  return out;
}

}  // namespace

RoomMap::RoomMap(const GeometryParams& params) : params_(params) {
  const double L = params.map_size;
  const double s = params.room_side;
  const double w = params.hallway_width;
  if (!(L > 0) || !(s > 0) || s > L / 2 || !(w > 0) || w >= s || !(params.wall_inset >= 0)) {
    throw ConfigError("invalid room geometry");
  }
  const double lo = L / 4, hi = 3 * L / 4;
  auto room = [s](double cx, double cy) { return Rect{cx - s / 2, cx + s / 2, cy - s / 2, cy + s / 2}; };
  rooms_ = {room(lo, hi), room(hi, hi), room(hi, lo), room(lo, lo)};

  const double inner_lo = lo + s / 2;  // right edge of the west rooms
  const double inner_hi = hi - s / 2;  // left edge of the east rooms
  hallways_ = {
      Rect{inner_lo, inner_hi, hi - w / 2, hi + w / 2},  // NW-NE
      Rect{hi - w / 2, hi + w / 2, inner_lo, inner_hi},  // NE-SE
      Rect{inner_lo, inner_hi, lo - w / 2, lo + w / 2},  // SE-SW
      Rect{lo - w / 2, lo + w / 2, inner_lo, inner_hi},  // SW-NW
  };

  auto add_h = [this](double y, double x0, double x1) { walls_.push_back({Vec2(x0, y), Vec2(x1, y)}); };
  auto add_v = [this](double x, double y0, double y1) { walls_.push_back({Vec2(x, y0), Vec2(x, y1)}); };

  for (const Rect& r : rooms_) {
    std::vector<std::pair<double, double>> left, right, bottom, top;
    for (const Rect& h : hallways_) {
      const bool spans_y = h.y0 >= r.y0 && h.y1 <= r.y1;
      const bool spans_x = h.x0 >= r.x0 && h.x1 <= r.x1;
      if (spans_y && h.x1 == r.x0) left.emplace_back(h.y0, h.y1);
      if (spans_y && h.x0 == r.x1) right.emplace_back(h.y0, h.y1);
      if (spans_x && h.y1 == r.y0) bottom.emplace_back(h.x0, h.x1);
      if (spans_x && h.y0 == r.y1) top.emplace_back(h.x0, h.x1);
    }
    for (auto [a, b] : cut(r.y0, r.y1, left)) add_v(r.x0, a, b);
    for (auto [a, b] : cut(r.y0, r.y1, right)) add_v(r.x1, a, b);
    for (auto [a, b] : cut(r.x0, r.x1, bottom)) add_h(r.y0, a, b);
    for (auto [a, b] : cut(r.x0, r.x1, top)) add_h(r.y1, a, b);
  }
  // Passage side walls: NW-NE and SE-SW run east-west, NE-SE and SW-NW north-south.
  for (std::size_t i = 0; i < hallways_.size(); ++i) {
    const Rect& h = hallways_[i];
    if (i % 2 == 0) {
      add_h(h.y0, h.x0, h.x1);
      add_h(h.y1, h.x0, h.x1);
    } else {
      add_v(h.x0, h.y0, h.y1);
      add_v(h.x1, h.y0, h.y1);
    }
  }
}

bool RoomMap::is_free(const Vec2& p) const {
  for (const Rect& r : rooms_)
    if (r.contains(p)) return true;
  for (const Rect& h : hallways_)
    if (h.contains(p)) return true;
  return false;
}

double RoomMap::free_area() const {
  double a = 0;
  for (const Rect& r : rooms_) a += r.area();
  for (const Rect& h : hallways_) a += h.area();
  return a;
}

Vec2 RoomMap::start() const {
  const Rect& nw = rooms_.front();
  return Vec2((nw.x0 + nw.x1) / 2, (nw.y0 + nw.y1) / 2);
}

std::string to_string(SlopeDirection d) { return d == SlopeDirection::North ? "north" : "south"; }

SlopeDirection parse_slope(const std::string& s) {
  if (s == "north") return SlopeDirection::North;
  if (s == "south") return SlopeDirection::South;
  throw ConfigError("slopes: unknown slope direction '" + s + "'");
}

EnvClass::EnvClass(std::vector<EnvSpec> members) : members_(std::move(members)) {
  if (members_.empty()) throw ConfigError("environment class is empty");
  const EnvSpec& first = members_.front();
  for (const EnvSpec& m : members_) {
    if (m.horizon < 1) throw ConfigError("horizon must be >= 1");
    if (!(m.slope_magnitude >= 0)) throw ConfigError("slope_magnitude must be >= 0");
    if (!(m.max_step > 0)) throw ConfigError("max_step must be > 0");
    const auto& g = m.geometry.params();
    const auto& g0 = first.geometry.params();
    if (m.horizon != first.horizon || g.map_size != g0.map_size || g.room_side != g0.room_side ||
        g.hallway_width != g0.hallway_width) {
      throw ConfigError("environment class members must share horizon and geometry");
    }
  }
}

EnvClass make_gridworld_class(const EnvParams& params) {
  RoomMap map(params.geometry);
  std::vector<EnvSpec> members;
  for (SlopeDirection d : params.slopes) {
    members.push_back(EnvSpec{d, params.slope_magnitude, params.horizon, params.max_step, map});
  }
  return EnvClass(std::move(members));
}

std::size_t sample_env(const EnvClass& cls, Rng& rng) {
  if (cls.size() == 0) throw ConfigError("environment class is empty");
  std::uniform_int_distribution<std::size_t> pick(0, cls.size() - 1);
  return pick(rng);
}

EnvState reset(const EnvSpec& spec) { return EnvState{spec.geometry.start(), 0}; }

std::pair<EnvState, bool> step(const EnvSpec& spec, const EnvState& state, const Vec2& action) {
  if (!std::isfinite(action.x()) || !std::isfinite(action.y())) throw InputError("step: non-finite action");

  const Vec2 clipped = action.cwiseMax(-spec.max_step).cwiseMin(spec.max_step);
  const Vec2 from = state.position;
  const Vec2 delta = clipped + Vec2(0.0, spec.slope_dy());
  const double inset = spec.geometry.params().wall_inset;

  // Smallest admissible fraction of the move; each wall crossed caps it so the
  // stop point keeps `inset` perpendicular clearance from that wall.
  double t_stop = 1.0;
  for (const Segment& w : spec.geometry.walls()) {
    const int axis = w.vertical() ? 0 : 1;  // coordinate fixed along the wall
    const int along = 1 - axis;
    const double d = delta[axis];
    if (d == 0.0) continue;
    const double c = w.a[axis];
    const double t = (c - from[axis]) / d;
    if (t < 0.0 || t > 1.0) continue;
    const double hit = from[along] + t * delta[along];
    const double lo = std::min(w.a[along], w.b[along]);
    const double hi = std::max(w.a[along], w.b[along]);
    if (hit < lo || hit > hi) continue;
    t_stop = std::min(t_stop, std::max(0.0, t - inset / std::abs(d)));
  }

  EnvState next{from + t_stop * delta, state.steps_elapsed + 1};
  if (!spec.geometry.is_free(next.position)) next.position = from;
  return {next, next.steps_elapsed >= spec.horizon};
}

}  // namespace explore
