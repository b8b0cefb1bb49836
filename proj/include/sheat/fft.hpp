#pragma once

#include "sheat/fields.hpp"

#include <complex>
#include <memory>

namespace sheat {

using Spectrum = Eigen::ArrayXXcd;

/// Real-to-complex transforms on an N x N periodic grid. The half spectrum is
/// (N/2+1) x N: row kx in [0, N/2], column ky wrapped to [-N/2, N/2).
/// Lattice frequencies are xi = (pi / L) * (kx, ky).
class FourierGrid {
 public:
  explicit FourierGrid(const SpaceGrid& grid);

  int points() const { return n_; }
  double half_width() const { return half_width_; }
  int rows() const { return n_ / 2 + 1; }

  /// Unnormalized forward DFT.
  Spectrum forward(const Grid2d& values) const;
  /// Inverse DFT including the 1/N^2 factor, so inverse(forward(f)) == f.
  Grid2d inverse(const Spectrum& spectrum) const;

  /// Multiplies the spectrum of `values` by `symbol` (same half-spectrum shape).
  Grid2d apply_symbol(const Grid2d& values, const Grid2d& symbol) const;

  const Grid2d& xi_squared() const { return xi2_; }
  const Grid2d& xi_norm() const { return xi_; }
  double xi_component(int axis, int row, int col) const;

  /// Columns kx in (0, N/2) stand for two conjugate modes of the full spectrum.
  double multiplicity(int row) const { return (row == 0 || 2 * row == n_) ? 1.0 : 2.0; }

 private:
  int n_;
  double half_width_;
  Grid2d xi2_;
  Grid2d xi_;
};

/// Shared, immutable FourierGrid for a space grid (cached by N and L).
std::shared_ptr<const FourierGrid> fourier_grid(const SpaceGrid& grid);

/// 3-D transforms on an (T x N x N) real block stored slice-major.
/// Used for space-time symbols; T is arbitrary (not necessarily a power of 2).
class SpaceTimeFourier {
 public:
  SpaceTimeFourier(int time_points, int space_points);

  int time_points() const { return t_; }
  int space_points() const { return n_; }
  /// Complex output has t * n * (n/2+1) entries, index ((it * n) + jy) * (n/2+1) + kx.
  std::size_t spectrum_size() const {
    return static_cast<std::size_t>(t_) * n_ * (n_ / 2 + 1);
  }

  void forward(const double* in, std::complex<double>* out) const;
  /// Unnormalized inverse; destroys `in`.
  void inverse(std::complex<double>* in, double* out) const;

 private:
  int t_;
  int n_;
};

}  // namespace sheat
