#pragma once

#include "sheat/fields.hpp"
#include "sheat/function_spaces.hpp"
#include "sheat/geometry.hpp"

#include <Eigen/Sparse>

#include <memory>
#include <string>
#include <vector>

namespace sheat {

/// Implicit Euler with the 5-point Laplacian for h_t = Delta h in D, h = b on
/// the lateral boundary, h(0) = 0. The factorization is built once in the
/// constructor; solve() is const and may run concurrently.
///
/// The domain must have axis-parallel edges and vertices on grid nodes.
class HeatIbvpSolver {
 public:
  HeatIbvpSolver(const PolygonDomain& domain, const SpaceGrid& grid, const TimeGrid& time);
  ~HeatIbvpSolver();
  HeatIbvpSolver(HeatIbvpSolver&&) noexcept;

  /// Throws ValidationError when bdata uses another time grid or domain.
  SpaceTimeField solve(const BoundaryTrace& bdata) const;

  /// Dirichlet values on the boundary lattice at one time row of bdata.
  Eigen::VectorXd boundary_values(const BoundaryTrace& bdata, int row) const;

  const InteriorMask& mask() const { return mask_; }
  int interior_count() const { return static_cast<int>(interior_.size()); }
  int boundary_count() const { return static_cast<int>(boundary_.size()); }

 private:
  struct Factor;

  PolygonDomain domain_;
  SpaceGrid grid_;
  TimeGrid time_;
  InteriorMask mask_;
  std::vector<std::pair<int, int>> interior_;  // grid indices of unknowns
  std::vector<std::pair<int, int>> boundary_;  // grid indices of Dirichlet nodes
  std::vector<double> boundary_arclength_;
  std::vector<int> corner_;                    // vertex index or -1
  Eigen::SparseMatrix<double> coupling_;      // interior x boundary, dt / h^2 entries
  std::unique_ptr<Factor> factor_;
};

/// One-shot convenience wrapper around HeatIbvpSolver.
SpaceTimeField solve_deterministic_ibvp(const PolygonDomain& domain, const BoundaryTrace& bdata,
                                       const SpaceGrid& grid, const TimeGrid& time);

struct CompatibilityReport {
  bool checked = false;          // 3/p < k < 1 + 1/p
  bool passed = true;
  double max_mismatch = 0.0;     // over boundary quadrature nodes
  bool zero_initial_trace = false;  // k > 2/p: b'(0) is set to zero before solving
  std::string note;
};

/// Compares u0 (bilinear interpolation of its samples) with b(0) on the
/// boundary nodes when the order is high enough to require it.
CompatibilityReport validate_compatibility(const Field& u0, const BoundaryTrace& b, double p,
                                           double k, const PolygonDomain& domain,
                                           double tolerance = 1e-8);

/// Sets row 0 of the trace to zero when k > 2/p. Returns whether it did.
bool zero_initial_trace(BoundaryTrace& trace, double p, double k);

}  // namespace sheat
