#pragma once

#include "sheat/fft.hpp"
#include "sheat/fields.hpp"

#include <cmath>
#include <numbers>

namespace sheat {

/// Gaussian heat kernel (4 pi t)^{-n/2} exp(-|x|^2 / 4t), zero for t <= 0.
template <typename Scalar>
Scalar heat_kernel(Scalar t, Scalar r2, int n) {
  using std::exp;
  using std::pow;
  if (!(t > Scalar(0))) return Scalar(0);
  const Scalar four_pi_t = Scalar(4) * Scalar(std::numbers::pi) * t;
  return pow(four_pi_t, -Scalar(n) / 2) * exp(-r2 / (Scalar(4) * t));
}

inline double heat_kernel(double t, const Vec2& x) {
  return heat_kernel<double>(t, x.squaredNorm(), 2);
}

/// c_l = (4 pi)^{-n/2} / Gamma(l/2). With this choice the space-time Fourier
/// transform of the potential is exactly (1 + i tau + |xi|^2)^{-l/2}.
double bessel_normalization(double l, int n);

/// c_l t^{(l-n-2)/2} e^{-t} e^{-|x|^2/4t} for t > 0, else 0.
/// Throws UnsupportedError for l <= 0.
double parabolic_bessel(double l, double t, double r2, int n);

inline double parabolic_bessel(double l, double t, const Vec2& x) {
  return parabolic_bessel(l, t, x.squaredNorm(), 2);
}

/// Band-limited heat semigroup: multiplies the DFT by exp(-t |xi|^2).
Field heat_convolve(const Field& field, double t);
Grid2d heat_convolve(const Grid2d& values, const SpaceGrid& grid, double t);

/// exp(-t |xi|^2) on the half-spectrum lattice.
Grid2d heat_symbol(const FourierGrid& fg, double t);

/// Spectral Laplacian (symbol -|xi|^2).
Field spectral_laplacian(const Field& field);

/// Closed-form Laplacian of Gamma(a, x - xc) in two dimensions.
inline double heat_kernel_laplacian(double a, const Vec2& x) {
  const double r2 = x.squaredNorm();
  return heat_kernel(a, x) * (r2 / (4 * a * a) - 1.0 / a);
}

}  // namespace sheat
