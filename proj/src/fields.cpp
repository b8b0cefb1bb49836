#include "sheat/fields.hpp"

#include "sheat/error.hpp"

#include <cmath>
#include <string>

namespace sheat {

void SpaceGrid::validate() const {
  if (points < 8 || (points & (points - 1)) != 0) {
    throw ConfigurationError("grid points per axis must be a power of two >= 8, got " +
                             std::to_string(points));
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw ConfigurationError("grid half-width must be positive");
  }
  if (!center.allFinite()) throw ConfigurationError("grid center must be finite");
}

SpaceGrid make_space_grid(int points, double half_width, const Vec2& center) {
  SpaceGrid grid{half_width, points, center};
  grid.validate();
  return grid;
}

void TimeGrid::validate() const {
  if (steps < 1) throw ConfigurationError("time grid needs at least one step");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ConfigurationError("time horizon must be positive");
  }
}

TimeGrid make_time_grid(int steps, double horizon) {
  TimeGrid grid{steps, horizon};
  grid.validate();
  return grid;
}

Field sample_field(const SpaceGrid& grid,
                   const std::function<double(const Vec2&)>& fn) {
  Field out(grid);
  for (int j = 0; j < grid.points; ++j)
    for (int i = 0; i < grid.points; ++i) out.values(i, j) = fn(grid.node(i, j));
  return out;
}

double mass(const Field& field) {
  return field.values.sum() * field.grid.cell_measure();
}

bool SpaceTimeField::all_finite() const {
  for (const auto& s : slices)
    if (!s.isFinite().all()) return false;
  return true;
}

SpaceTimeField sample_space_time(
    const SpaceGrid& grid, const TimeGrid& time,
    const std::function<double(double, const Vec2&)>& fn) {
  SpaceTimeField out(grid, time);
  for (int m = 0; m < time.nodes(); ++m) {
    const double t = time.time(m);
    for (int j = 0; j < grid.points; ++j)
      for (int i = 0; i < grid.points; ++i)
        out.slices[m](i, j) = fn(t, grid.node(i, j));
  }
  return out;
}

SpaceTimeField constant_in_time(const Field& field, const TimeGrid& time) {
  SpaceTimeField out;
  out.grid = field.grid;
  out.time = time;
  out.slices.assign(time.nodes(), field.values);
  return out;
}

void require_same_grids(const SpaceTimeField& a, const SpaceTimeField& b,
                        const char* what) {
  if (!(a.grid == b.grid) || !(a.time == b.time)) {
    throw ValidationError(std::string("grid mismatch: ") + what);
  }
}

}  // namespace sheat
