#include "sheat/kernels.hpp"

#include "sheat/error.hpp"

#include <cmath>

namespace sheat {

double bessel_normalization(double l, int n) {
  if (!(l > 0.0)) throw UnsupportedError("parabolic Bessel potential needs order l > 0");
  return std::pow(4.0 * std::numbers::pi, -0.5 * n) / std::tgamma(0.5 * l);
}

double parabolic_bessel(double l, double t, double r2, int n) {
  const double c = bessel_normalization(l, n);
  if (!(t > 0.0)) return 0.0;
  return c * std::pow(t, 0.5 * (l - n - 2)) * std::exp(-t - r2 / (4.0 * t));
}

Grid2d heat_symbol(const FourierGrid& fg, double t) {
  return (-t * fg.xi_squared()).exp();
}

Grid2d heat_convolve(const Grid2d& values, const SpaceGrid& grid, double t) {
  if (t < 0.0) throw ValidationError("heat_convolve: negative time");
  if (t == 0.0) return values;
  const auto fg = fourier_grid(grid);
  return fg->apply_symbol(values, heat_symbol(*fg, t));
}

Field heat_convolve(const Field& field, double t) {
  return Field(field.grid, heat_convolve(field.values, field.grid, t));
}

Field spectral_laplacian(const Field& field) {
  const auto fg = fourier_grid(field.grid);
  return Field(field.grid, fg->apply_symbol(field.values, -fg->xi_squared()));
}

}  // namespace sheat
