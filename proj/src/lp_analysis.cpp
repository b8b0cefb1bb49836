#include "sheat/lp_analysis.hpp"

#include "sheat/error.hpp"
#include "sheat/numerics.hpp"

#include <cmath>
#include <mutex>

namespace sheat {

double lp_bump(double r) {
  if (!(r > 0.5 && r < 2.0)) return 0.0;
  const double z = (4.0 * r - 5.0) / 3.0;
  const double d = 1.0 - z * z;
  if (d <= 0.0) return 0.0;
  return std::exp(1.0 - 1.0 / d);
}

double lp_profile(double r) {
  const double top = lp_bump(r);
  if (top == 0.0) return 0.0;
  double denom = 0.0;
  for (int j = -2; j <= 2; ++j) denom += lp_bump(std::ldexp(r, -j));
  return top / denom;
}

const Grid2d& LPFamily::symbol(int j) const {
  if (j == kLowBlock) return psi_hat;
  if (j < j_min || j > j_max)
    throw ValidationError("LP block " + std::to_string(j) + " outside [" +
                          std::to_string(j_min) + ", " + std::to_string(j_max) + "]");
  return phi_hat[j - j_min];
}

LPFamily build_lp_family(const SpaceGrid& grid) {
  grid.validate();
  const auto fg = fourier_grid(grid);
  const Grid2d& xi = fg->xi_norm();
  const double xi_max = xi.maxCoeff();

  LPFamily fam;
  fam.grid = grid;
  fam.j_min = 1;
  // Largest j whose shell 2^{j-1} < |xi| < 2^{j+1} meets the lattice.
  int j_max = 0;
  while (std::ldexp(1.0, j_max) < xi_max) ++j_max;
  fam.j_max = j_max;
  if (fam.block_count() < 3)
    throw ConfigurationError("grid too coarse for three dyadic shells (max |xi| = " +
                             std::to_string(xi_max) + ")");

  fam.psi_hat = Grid2d::Ones(xi.rows(), xi.cols());
  for (int j = fam.j_min; j <= fam.j_max; ++j) {
    Grid2d s = xi.unaryExpr([j](double r) { return lp_profile(std::ldexp(r, -j)); });
    fam.psi_hat -= s;
    fam.phi_hat.push_back(std::move(s));
  }
  return fam;
}

Field lp_project(const Field& field, int j, const LPFamily& family) {
  if (field.grid.points != family.grid.points ||
      field.grid.half_width != family.grid.half_width)
    throw ValidationError("lp_project: field and family grids differ");
  const auto fg = fourier_grid(field.grid);
  return Field(field.grid, fg->apply_symbol(field.values, family.symbol(j)));
}

double lp_norm(const Grid2d& values, const SpaceGrid& grid, double p) {
  if (!(p >= 1.0)) throw ValidationError("L^p norm needs p >= 1");
  return std::pow(pow_abs(values, p).sum() * grid.cell_measure(), 1.0 / p);
}

BesovParts besov_parts(const Field& field, const LPFamily& family, double p) {
  if (!(p >= 1.0)) throw ValidationError("Besov norm needs p >= 1");
  const auto fg = fourier_grid(field.grid);
  const Spectrum spec = fg->forward(field.values);
  BesovParts parts;
  parts.low = lp_norm(fg->inverse(spec * family.psi_hat.cast<std::complex<double>>()),
                      field.grid, p);
  for (const auto& s : family.phi_hat) {
    parts.block_norms.push_back(
        lp_norm(fg->inverse(spec * s.cast<std::complex<double>>()), field.grid, p));
  }
  return parts;
}

double besov_combine(const BesovParts& parts, double k, double p, int j_min) {
  double acc = 0.0;
  for (std::size_t b = 0; b < parts.block_norms.size(); ++b) {
    const int j = j_min + static_cast<int>(b);
    acc += pow_abs(std::exp2(k * j) * parts.block_norms[b], p);
  }
  return parts.low + std::pow(acc, 1.0 / p);
}

double besov_norm_rn(const Field& field, double k, double p, const LPFamily& family) {
  auto parts = besov_parts(field, family, p);
  return besov_combine(parts, k, p, family.j_min);
}

namespace {

struct MultiplierReference {
  SpaceGrid grid;
  Grid2d phi_sum;
  Grid2d xi2;
};

const MultiplierReference& multiplier_reference() {
  static std::once_flag once;
  static MultiplierReference ref;
  std::call_once(once, [] {
    ref.grid = make_space_grid(1024, 128.0);
    const auto fg = fourier_grid(ref.grid);
    ref.xi2 = fg->xi_squared();
    ref.phi_sum = fg->xi_norm().unaryExpr([](double r) {
      return lp_profile(0.5 * r) + lp_profile(r) + lp_profile(2.0 * r);
    });
  });
  return ref;
}

}  // namespace

double multiplier_norm_bound_scaled(double s) {
  if (!(s >= 0.0)) throw ValidationError("multiplier bound needs s >= 0");
  const auto& ref = multiplier_reference();
  const auto fg = fourier_grid(ref.grid);
  const Grid2d symbol = ref.phi_sum * (-s * ref.xi2).exp();
  // The normalized inverse DFT already carries the h^2 quadrature weight.
  const Grid2d kernel = fg->inverse(symbol.cast<std::complex<double>>());
  return kernel.abs().sum();
}

double multiplier_norm_bound(double t, int j, const LPFamily& /*family*/) {
  if (!(t > 0.0)) throw ValidationError("multiplier bound needs t > 0");
  return multiplier_norm_bound_scaled(std::ldexp(t, 2 * j));
}

}  // namespace sheat
