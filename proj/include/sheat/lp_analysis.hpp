#pragma once

#include "sheat/fft.hpp"
#include "sheat/fields.hpp"

#include <limits>
#include <memory>
#include <vector>

namespace sheat {

/// Block index for the low-frequency piece psi.
inline constexpr int kLowBlock = std::numeric_limits<int>::min();

/// C-infinity bump exp(1 - 1/(1 - ((4r-5)/3)^2)) on (1/2, 2), zero elsewhere.
double lp_bump(double r);

/// Radial profile phi_hat(r) = eta(r) / sum_j eta(2^-j r); sums to one over
/// dyadic dilations for every r > 0.
double lp_profile(double r);

/// Dyadic blocks phi_hat_j(xi) = phi_hat(2^-j xi) for j = 1..j_max on the
/// lattice of `grid`, with psi_hat = 1 - sum_{j>=1} phi_hat_j.
struct LPFamily {
  SpaceGrid grid;
  int j_min = 1;
  int j_max = 1;
  Grid2d psi_hat;
  std::vector<Grid2d> phi_hat;  // phi_hat[j - j_min]

  int block_count() const { return j_max - j_min + 1; }
  bool has_block(int j) const { return j == kLowBlock || (j >= j_min && j <= j_max); }
  /// Symbol for block j (or psi for kLowBlock). Throws ValidationError when out of range.
  const Grid2d& symbol(int j) const;
};

/// Throws ConfigurationError if fewer than 3 shells fit on the lattice.
LPFamily build_lp_family(const SpaceGrid& grid);

Field lp_project(const Field& field, int j, const LPFamily& family);

/// L^p norm on the periodic box using the h^n Riemann sum.
double lp_norm(const Grid2d& values, const SpaceGrid& grid, double p);

struct BesovParts {
  double low = 0.0;                // ||psi * f||_p
  std::vector<double> block_norms; // ||phi_j * f||_p, j = j_min..j_max
  double value = 0.0;
};

/// ||psi*f||_p + (sum_j (2^{kj} ||phi_j*f||_p)^p)^{1/p}; k may be negative.
double besov_norm_rn(const Field& field, double k, double p, const LPFamily& family);
BesovParts besov_parts(const Field& field, const LPFamily& family, double p);
double besov_combine(const BesovParts& parts, double k, double p, int j_min);

/// Young bound ||F^-1[Phi exp(-s |xi|^2)]||_1 for s = t 4^j with
/// Phi = phi_hat(xi/2) + phi_hat(xi) + phi_hat(2 xi). Evaluated on a fixed
/// reference lattice so the result depends on t and j only through s.
double multiplier_norm_bound(double t, int j, const LPFamily& family);
double multiplier_norm_bound_scaled(double s);

}  // namespace sheat
