#pragma once

#include "sheat/fields.hpp"
#include "sheat/geometry.hpp"
#include "sheat/stochastic.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sheat {

// ---- dyadic time operators on D_i = {4^i <= t - s < 4^{i+1}} ----

enum class TOperator { T1, T2, T3 };
const char* to_string(TOperator op);
TOperator parse_t_operator(const std::string& name);

/// Values of T f on the nodes of D_i for a uniform grid of (0,1).
/// values(j, d - lag_lo) holds (T f)(s_j, s_j + d ds); nodes with t > 1 carry zero weight.
struct BandSamples {
  TOperator which = TOperator::T1;
  int level = -1;
  double k = 0.5;
  int points = 0;  // intervals of (0,1)
  int lag_lo = 0, lag_hi = 0;
  Eigen::MatrixXd values;
  Eigen::MatrixXd weights;  // product quadrature on D_i

  double spacing() const { return 1.0 / points; }
  /// L^q(D_i) norm; q = infinity gives the maximum over quadrature nodes.
  double norm(double q) const;
};

/// f holds points+1 samples at r_j = j / points. The integrals use the
/// piecewise-linear interpolant of f against the exact kernel moments; the
/// band D_i is integrated by a triangle rule that is exact on its edges.
/// Throws ValidationError unless level <= -1, 0 < k < 1 and 4^level * points
/// is an integer >= 16.
BandSamples t_operator_apply(TOperator which, std::span<const double> f, int level, double k);

enum class TestFunction { constant, linear, random };
TestFunction parse_test_function(const std::string& name);

/// Samples of the test function on points+1 nodes; `random` is a seeded
/// smooth trigonometric sum, the same function at every resolution.
std::vector<double> sample_test_function(TestFunction fn, int points, std::uint64_t seed);

struct TOperatorRow {
  int level = 0;
  int trial = 0;
  double t_norm = 0.0;
  double f_norm = 0.0;
  double ratio = 0.0;      // t_norm / f_norm
  double predicted = 0.0;  // 4^{level * exponent}
  double c_meas = 0.0;     // ratio / predicted
};

struct TOperatorReport {
  TOperator which = TOperator::T1;
  double k = 0.0, q = 1.0;
  std::vector<TOperatorRow> rows;
  std::vector<int> levels;
  std::vector<double> level_constant;  // max over trials
  double flatness = 0.0;               // max / min of level_constant
  double printed_constant = 0.0;       // NaN when the proof gives none for this q
  bool within_printed = true;          // every c_meas <= 1.05 * printed_constant
  bool passed = false;                 // flatness < 10 and within_printed
};

/// Exponent k + 1/q for T1, T2 and k - 2 + 1/q for T3.
double t_operator_exponent(TOperator which, double k, double q);
/// Constants printed in the proof for q = 1 and q = infinity; NaN otherwise.
double t_operator_printed_constant(TOperator which, double k, double q);

TOperatorReport t_operator_bound_report(TOperator which, double k, double q,
                                        std::span<const int> levels, int trials,
                                        TestFunction fn, std::uint64_t seed = 1);

// ---- kernel L^1 differences ----

/// int_{R^n} |Gamma(t + r, y) - Gamma(r, y)| dy by radial quadrature split at
/// the crossing radius.
double kernel_l1_difference(double t, double r, int n = 2);

struct KernelL1Row {
  double t = 0.0, r = 0.0, value = 0.0, reference = 0.0, ratio = 0.0;
};
struct KernelL1Sweep {
  std::vector<KernelL1Row> rows;
  double ratio_spread = 0.0;        // max / min of value / min(t/r, 1)
  double invariance_defect = 0.0;   // max spread among rows with equal t/r
};
KernelL1Sweep kernel_l1_sweep(std::span<const double> ts, std::span<const double> rs, int n = 2);

// ---- boundary heat integral ----

/// sum_q w_q Gamma(tau, x_q - y) over the boundary quadrature.
double boundary_heat_integral(const BoundaryQuadrature& quad, const Vec2& y, double tau);
/// Uses a quadrature with spacing at most sqrt(tau) / 4 (and at least 64 nodes per unit length).
double boundary_heat_integral(const PolygonDomain& domain, const Vec2& y, double tau);

struct BoundaryIntegralRow {
  double tau = 0.0, delta = 0.0, value = 0.0, bound = 0.0, ratio = 0.0;
};
struct BoundaryIntegralSweep {
  double c = 0.0;
  double tau_ref = 0.0;
  std::vector<BoundaryIntegralRow> rows;
  double ratio_spread = 0.0;
};

/// c = -d log(sqrt(tau) I) / d(delta^2 / tau) at tau_ref, by a centred
/// difference; then ratio = I / (tau^{-1/2} exp(-c delta^2 / tau)) across taus.
BoundaryIntegralSweep boundary_heat_integral_sweep(const PolygonDomain& domain, const Vec2& y,
                                                   std::span<const double> taus, double tau_ref);

// ---- Hardy ----

struct HardyReport {
  double lhs = 0.0;        // int delta^{-p theta} |g|^p
  double lp = 0.0;         // ||g||_p^p over the same nodes
  double gradient = 0.0;   // ||grad g||_p^p
  double rhs_proxy = 0.0;  // lp^{1-theta} gradient^theta
  double ratio = 0.0;
};

/// Throws ValidationError when g does not vanish on nodes outside D or
/// within h/2 of the boundary.
HardyReport hardy_ratio(const Field& g, const PolygonDomain& domain, double theta, double p);

/// Smooth compactly supported bump exp(1 - 1/(1 - |x-c|^2/rho^2)).
Field smooth_bump(const SpaceGrid& grid, const Vec2& center, double radius);

// ---- scaling identity ----

/// matched: both computations on the same number of steps, so the two time
/// grids coincide after rescaling. refined: the (0,T) computation uses T times
/// as many steps (T integer), the rescaled one sums blocks of T increments.
enum class ScalingGrids { matched, refined };

struct ScalingReport {
  double lhs = 0.0;       // E int_x int int_{(0,T)^2} |v3(t) - v3(s)|^p / |t-s|^{1+pk/2}
  double rhs = 0.0;       // T^{exponent} E (same on (0,1) for the rescaled v3)
  double exponent = 0.0;  // 1 - pk/2 + n/2
  double rel_error = 0.0;
  int samples = 0;
};

/// g is the coefficient on (0,T) (g.time.horizon == T). The rescaled data
/// reuse the samples of g on the grid with half width L / sqrt(T).
ScalingReport scaling_identity_check(const SpaceTimeField& g, double p, double k,
                                     const SampleEnsemble& ensemble,
                                     ScalingGrids grids = ScalingGrids::matched, int threads = 1);

/// int_x sum_{m != m'} w_m w_m' |v(t_m,x) - v(t_m',x)|^p / |t_m - t_m'|^{1 + p order} h^n.
double time_difference_integral(const SpaceTimeField& v, double p, double order);

}  // namespace sheat
