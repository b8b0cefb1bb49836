#include "sheat/mild_solution.hpp"

#include "sheat/error.hpp"
#include "sheat/fft.hpp"
#include "sheat/kernels.hpp"

namespace sheat {

SpaceTimeField compute_v1(const Field& u0_ext, const TimeGrid& time) {
  time.validate();
  u0_ext.grid.validate();
  SpaceTimeField out(u0_ext.grid, time);
  const auto fg = fourier_grid(u0_ext.grid);
  const Spectrum hat = fg->forward(u0_ext.values);
  out.slices[0] = u0_ext.values;
  for (int m = 1; m <= time.steps; ++m)
    out.slices[m] = fg->inverse(hat * heat_symbol(*fg, time.time(m)));
  return out;
}

SpaceTimeField compute_v2(const SpaceTimeField& f_ext, const TimeGrid& time) {
  if (!(f_ext.time == time)) throw ValidationError("compute_v2: time grid mismatch");
  SpaceTimeField out(f_ext.grid, time);
  const auto fg = fourier_grid(f_ext.grid);
  const double dt = time.dt();
  const Grid2d step = heat_symbol(*fg, dt);
  const Grid2d half = heat_symbol(*fg, 0.5 * dt) * dt;
  Spectrum acc = Spectrum::Zero(fg->rows(), fg->points());
  for (int m = 1; m <= time.steps; ++m) {
    acc = acc * step + fg->forward(f_ext.slices[m - 1]) * half;
    out.slices[m] = fg->inverse(acc);
  }
  return out;
}

SpaceTimeField compute_v3(const SpaceTimeField& g_ext, const BrownianDriver& driver) {
  if (!(g_ext.time == driver.time) || driver.increments.size() != driver.time.steps)
    throw ValidationError("compute_v3: driver and integrand use different time grids");
  SpaceTimeField out(g_ext.grid, g_ext.time);
  const auto fg = fourier_grid(g_ext.grid);
  const Grid2d step = heat_symbol(*fg, g_ext.time.dt());
  Spectrum acc = Spectrum::Zero(fg->rows(), fg->points());
  for (int m = 1; m <= g_ext.time.steps; ++m) {
    acc = (acc + fg->forward(g_ext.slices[m - 1]) * driver.increments(m - 1)) * step;
    out.slices[m] = fg->inverse(acc);
  }
  return out;
}

Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> closure_mask(const SpaceGrid& grid,
                                                               const PolygonDomain& domain) {
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask(grid.points, grid.points);
  for (int j = 0; j < grid.points; ++j)
    for (int i = 0; i < grid.points; ++i) {
      const Vec2 x = grid.node(i, j);
      mask(i, j) = contains(domain, x) || on_boundary(domain, x);
    }
  return mask;
}

SpaceTimeField assemble_u(const SpaceTimeField& v1, const SpaceTimeField& v2,
                          const SpaceTimeField& v3, const SpaceTimeField& h,
                          const PolygonDomain& domain) {
  require_same_grids(v1, v2, "assemble_u");
  require_same_grids(v1, v3, "assemble_u");
  require_same_grids(v1, h, "assemble_u");
  const auto mask = closure_mask(v1.grid, domain);
  SpaceTimeField u(v1.grid, v1.time);
  for (int m = 0; m < v1.time.nodes(); ++m) {
    const Grid2d sum = v1.slices[m] + v2.slices[m] + v3.slices[m] + h.slices[m];
    u.slices[m] = mask.select(sum, 0.0);
  }
  return u;
}

}  // namespace sheat
