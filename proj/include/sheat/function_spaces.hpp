#pragma once

#include "sheat/fields.hpp"
#include "sheat/geometry.hpp"

#include <functional>
#include <span>

namespace sheat {

/// Values of a space-time function on boundary quadrature nodes.
/// values(m, q) is the value at time t_m and node q.
struct BoundaryTrace {
  BoundaryQuadrature quad;
  TimeGrid time;
  Eigen::MatrixXd values;

  void validate() const;
};

BoundaryTrace sample_boundary_trace(const BoundaryQuadrature& quad, const TimeGrid& time,
                                    const std::function<double(double, const Vec2&)>& fn);

/// Grid nodes strictly inside the domain, with a bounding index window.
struct InteriorMask {
  int i0 = 0, j0 = 0, rows = 0, cols = 0;  // window into the grid
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> inside;  // rows x cols
  int count = 0;

  bool contains_node(int i, int j) const {
    const int a = i - i0, b = j - j0;
    return a >= 0 && b >= 0 && a < rows && b < cols && inside(a, b);
  }
};

InteriorMask interior_mask(const SpaceGrid& grid, const PolygonDomain& domain);

/// (sum_{x != y in D} |f(x) - f(y)|^p / |x - y|^{n + pk} h^{2n})^{1/p}, 0 < k < 1.
double gagliardo_seminorm_domain(const Field& field, const PolygonDomain& domain, double k,
                                 double p);
double gagliardo_seminorm_domain(const Grid2d& values, const SpaceGrid& grid,
                                 const InteriorMask& mask, double k, double p);

/// L^p(D) norm over interior nodes.
double lp_norm_domain(const Grid2d& values, const SpaceGrid& grid, const InteriorMask& mask,
                      double p);

/// B^k_p(D): L^p part plus the Gagliardo seminorm for 0 < k < 1. For
/// 1 <= k < 2 the first central differences are added, and for k > 1 their
/// (k-1) seminorm; k = 1 gives the W^{1,p} norm.
double besov_norm_domain(const Field& field, const PolygonDomain& domain, double k, double p);
double besov_norm_domain(const Grid2d& values, const SpaceGrid& grid, const InteriorMask& mask,
                         double k, double p);

/// L^p(0,T) norm plus the one-dimensional Gagliardo seminorm of order theta,
/// trapezoid weights, diagonal excluded.
double besov_norm_time(std::span<const double> signal, const TimeGrid& time, double theta,
                       double p);

/// Per-row time norms of a (points x time) matrix, same formula as besov_norm_time.
Eigen::ArrayXd besov_norm_time_rows(const Eigen::MatrixXd& signals, const TimeGrid& time,
                                    double theta, double p);

struct CylinderNorm {
  double space = 0.0;  // (int_0^T ||f(t)||^p_{B^k_p(D)} dt)^{1/p}
  double time = 0.0;   // (int_D ||f(., x)||^p_{B^{k/2}_p(0,T)} dx)^{1/p}
  double value = 0.0;  // space + time
};

/// Anisotropic B^{k,k/2}_p(D_T) norm for 0 < k < 2.
CylinderNorm anisotropic_norm_cylinder(const SpaceTimeField& field,
                                       const PolygonDomain& domain, double k, double p);

/// (int_0^T ||f(t)||^p_{B^k_p(D)} dt)^{1/p}, the space-only norm used for k >= 1.
double spatial_mode_norm(const SpaceTimeField& field, const PolygonDomain& domain, double k,
                         double p);

/// B^{k,k/2}_p on the lateral boundary, with arclength distances, 0 < k < 1.
CylinderNorm boundary_norm(const BoundaryTrace& trace, double k, double p);

/// sum over interior nodes with delta >= h/2 of delta^{-p theta} |g|^p h^n.
/// Throws ValidationError when g is not zero off the interior.
double weighted_distance_norm(const Field& field, const PolygonDomain& domain, double theta,
                              double p);

/// Zero outside the open domain, unchanged inside.
Field trivial_extension(const Field& field, const PolygonDomain& domain);

struct SteinExtension {
  Field field;
  bool fallback = false;  // true when the trivial extension was used instead
  double cutoff_radius = 0.0;
};

/// Point reflection through the nearest boundary point, times a smooth cutoff
/// in the distance to D. Needs a domain whose vertices are grid nodes and whose
/// edges are axis-parallel; otherwise falls back to trivial_extension.
SteinExtension stein_extension(const Field& field, const PolygonDomain& domain);

/// Bilinear interpolation of each time slice at the boundary nodes.
BoundaryTrace restrict_to_boundary(const SpaceTimeField& field, const BoundaryQuadrature& quad);
double interpolate_bilinear(const Grid2d& values, const SpaceGrid& grid, const Vec2& point);

/// ||F^-1[(1 + i tau + |xi|^2)^{s/2} F f]||_{L^p(R^n_T)} with f extended by
/// zero in time over a window of twice the horizon.
double parabolic_potential_norm(const SpaceTimeField& field, double s, double p);

}  // namespace sheat
