#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace sheat {

using Vec2 = Eigen::Vector2d;
using Grid2d = Eigen::ArrayXXd;

/// Periodic box center + [-L, L)^2 sampled by N points per axis.
///
/// Node (i, j) sits at center + (-L + i h, -L + j h) with h = 2L / N.
/// Row index i runs along x1, column index j along x2.
struct SpaceGrid {
  static constexpr int dim = 2;

  double half_width = 1.0;
  int points = 64;
  Vec2 center = Vec2::Zero();

  double spacing() const { return 2.0 * half_width / points; }
  double cell_measure() const { return spacing() * spacing(); }
  double coord(int axis, int index) const {
    return center[axis] - half_width + index * spacing();
  }
  Vec2 node(int i, int j) const { return {coord(0, i), coord(1, j)}; }

  /// Throws ConfigurationError unless N >= 8 is a power of two and L > 0.
  void validate() const;

  bool operator==(const SpaceGrid& other) const {
    return half_width == other.half_width && points == other.points &&
           center == other.center;
  }
};

SpaceGrid make_space_grid(int points, double half_width,
                          const Vec2& center = Vec2::Zero());

/// Uniform partition 0 = t_0 < ... < t_M = T.
struct TimeGrid {
  int steps = 1;
  double horizon = 1.0;

  double dt() const { return horizon / steps; }
  double time(int m) const { return horizon * m / steps; }
  int nodes() const { return steps + 1; }

  void validate() const;

  bool operator==(const TimeGrid& other) const {
    return steps == other.steps && horizon == other.horizon;
  }
};

TimeGrid make_time_grid(int steps, double horizon);

/// Real samples on a SpaceGrid.
struct Field {
  SpaceGrid grid;
  Grid2d values;

  Field() = default;
  explicit Field(const SpaceGrid& g)
      : grid(g), values(Grid2d::Zero(g.points, g.points)) {}
  Field(const SpaceGrid& g, Grid2d v) : grid(g), values(std::move(v)) {}

  bool all_finite() const { return values.isFinite().all(); }
};

Field sample_field(const SpaceGrid& grid,
                   const std::function<double(const Vec2&)>& fn);

/// Riemann sum of the samples times h^n.
double mass(const Field& field);

/// Samples on SpaceGrid x TimeGrid; slices[m] holds t_m.
struct SpaceTimeField {
  SpaceGrid grid;
  TimeGrid time;
  std::vector<Grid2d> slices;

  SpaceTimeField() = default;
  SpaceTimeField(const SpaceGrid& g, const TimeGrid& t)
      : grid(g), time(t),
        slices(t.nodes(), Grid2d::Zero(g.points, g.points)) {}

  Field slice(int m) const { return Field(grid, slices[m]); }
  bool all_finite() const;
};

SpaceTimeField sample_space_time(
    const SpaceGrid& grid, const TimeGrid& time,
    const std::function<double(double, const Vec2&)>& fn);

/// Field equal to `field` in every time slice.
SpaceTimeField constant_in_time(const Field& field, const TimeGrid& time);

void require_same_grids(const SpaceTimeField& a, const SpaceTimeField& b,
                        const char* what);

}  // namespace sheat
