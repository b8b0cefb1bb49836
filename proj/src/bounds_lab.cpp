#include "sheat/bounds_lab.hpp"

#include "sheat/error.hpp"
#include "sheat/function_spaces.hpp"
#include "sheat/kernels.hpp"
#include "sheat/mild_solution.hpp"
#include "sheat/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

namespace sheat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-cell weights (A_m, B_m) of the piecewise-linear interpolant against u^e
// on u in [(m-1) ds, m ds]: contribution A_m f_c + B_m f_{c+1}, c = idx - m.
struct CellMoments {
  std::vector<double> a, b;
};

CellMoments cell_moments(double e, int max_lag, double ds) {
  CellMoments cm;
  cm.a.assign(max_lag + 1, 0.0);
  cm.b.assign(max_lag + 1, 0.0);
  for (int m = 1; m <= max_lag; ++m) {
    const double u0 = m * ds, u1 = (m - 1) * ds;
    const double m0 = (std::pow(u0, e + 1) - std::pow(u1, e + 1)) / (e + 1);
    const double m1 = (std::pow(u0, e + 2) - std::pow(u1, e + 2)) / (e + 2);
    cm.b[m] = (u0 * m0 - m1) / ds;
    cm.a[m] = m0 - cm.b[m];
  }
  return cm;
}

double lq_norm_01(std::span<const double> f, double q) {
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
  }
  const int n = static_cast<int>(f.size()) - 1;
  const Eigen::ArrayXd w = trapezoid_weights(n + 1, 1.0 / n);
  double acc = 0.0;
  for (int j = 0; j <= n; ++j) acc += w(j) * pow_abs(f[j], q);
  return std::pow(acc, 1.0 / q);
}

}  // namespace

const char* to_string(TOperator op) {
  switch (op) {
    case TOperator::T1: return "T1";
    case TOperator::T2: return "T2";
    case TOperator::T3: return "T3";
  }
  return "?";
}

TOperator parse_t_operator(const std::string& name) {
  if (name == "T1") return TOperator::T1;
  if (name == "T2") return TOperator::T2;
  if (name == "T3") return TOperator::T3;
  throw ConfigurationError("unknown T operator: " + name);
}

TestFunction parse_test_function(const std::string& name) {
  if (name == "constant") return TestFunction::constant;
  if (name == "linear") return TestFunction::linear;
  if (name == "random") return TestFunction::random;
  throw ConfigurationError("unknown test function: " + name);
}

double BandSamples::norm(double q) const {
  if (std::isinf(q)) return ((weights.array() > 0.0).select(values.array().abs(), 0.0)).maxCoeff();
  return std::pow((weights.array() * pow_abs(values.array(), q)).sum(), 1.0 / q);
}

BandSamples t_operator_apply(TOperator which, std::span<const double> f, int level, double k) {
  if (level > -1) throw ValidationError("T operators need level i <= -1");
  if (!(k > 0.0 && k < 1.0)) throw ValidationError("T operators need 0 < k < 1");
  if (f.size() < 2) throw ValidationError("T operators need samples of f");
  const int n = static_cast<int>(f.size()) - 1;
  const double a_exact = std::ldexp(1.0, 2 * level) * n;
  const int alpha = static_cast<int>(std::lround(a_exact));
  if (std::abs(a_exact - alpha) > 1e-9 || alpha < 16)
    throw ValidationError("f resolution too coarse for D_i: need 4^i * points an integer >= 16");

  BandSamples out;
  out.which = which;
  out.level = level;
  out.k = k;
  out.points = n;
  out.lag_lo = alpha;
  out.lag_hi = std::min(4 * alpha, n);
  const int lags = out.lag_hi - out.lag_lo + 1;
  const double ds = 1.0 / n;
  out.values = Eigen::MatrixXd::Zero(n + 1, lags);
  out.weights = Eigen::MatrixXd::Zero(n + 1, lags);

  // triangle rule on the band; both diagonal edges pass through nodes
  const double tri = ds * ds / 6.0;
  auto add = [&](int j, int l) { out.weights(j, l - j - out.lag_lo) += tri; };
  for (int j = 0; j < n; ++j)
    for (int d = std::max(1, alpha - 1); d <= out.lag_hi + 1 && j + d < n; ++d) {
      const int l = j + d;
      if (alpha <= d && d + 1 <= out.lag_hi) {  // upper-left triangle, lags d..d+1
        add(j, l);
        add(j, l + 1);
        add(j + 1, l + 1);
      }
      if (alpha <= d - 1 && d <= out.lag_hi) {  // lower-right triangle, lags d-1..d
        add(j, l);
        add(j + 1, l);
        add(j + 1, l + 1);
      }
    }

  switch (which) {
    case TOperator::T1: {
      const auto cm = cell_moments(k - 1.0, out.lag_hi, ds);
      for (int l = alpha; l <= n; ++l) {
        double acc = 0.0;
        for (int d = 1; d <= std::min(out.lag_hi, l); ++d) {
          acc += cm.a[d] * f[l - d] + cm.b[d] * f[l - d + 1];
          if (d >= alpha) out.values(l - d, d - alpha) = acc;
        }
      }
      break;
    }
    case TOperator::T2: {
      const auto cm = cell_moments(k - 1.0, alpha, ds);
      for (int j = 0; j <= n; ++j) {
        double acc = 0.0;
        for (int m = 1; m <= std::min(alpha, j); ++m) acc += cm.a[m] * f[j - m] + cm.b[m] * f[j - m + 1];
        out.values.row(j).setConstant(acc);
      }
      break;
    }
    case TOperator::T3: {
      const auto cm = cell_moments(k - 3.0, n, ds);
      for (int j = alpha + 1; j <= n; ++j) {
        double acc = 0.0;
        for (int m = alpha + 1; m <= j; ++m) acc += cm.a[m] * f[j - m] + cm.b[m] * f[j - m + 1];
        out.values.row(j).setConstant(acc);
      }
      break;
    }
  }
  // nodes beyond t = 1 are not part of D_i
  for (int j = 0; j <= n; ++j)
    for (int c = 0; c < lags; ++c)
      if (j + out.lag_lo + c > n) out.values(j, c) = 0.0;
  return out;
}

std::vector<double> sample_test_function(TestFunction fn, int points, std::uint64_t seed) {
  std::vector<double> f(points + 1);
  double coef[13];
  if (fn == TestFunction::random) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    for (double& c : coef) c = nd(rng);
  }
  for (int j = 0; j <= points; ++j) {
    const double r = static_cast<double>(j) / points;
    switch (fn) {
      case TestFunction::constant: f[j] = 1.0; break;
      case TestFunction::linear: f[j] = r; break;
      case TestFunction::random: {
        double v = coef[0];
        for (int m = 1; m <= 6; ++m)
          v += (coef[2 * m - 1] * std::cos(m * std::numbers::pi * r) +
                coef[2 * m] * std::sin(m * std::numbers::pi * r)) / m;
        f[j] = v;
        break;
      }
    }
  }
  return f;
}

double t_operator_exponent(TOperator which, double k, double q) {
  const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
  return which == TOperator::T3 ? k - 2.0 + inv_q : k + inv_q;
}

double t_operator_printed_constant(TOperator which, double k, double q) {
  const bool one = q == 1.0, sup = std::isinf(q);
  if (!one && !sup) return std::numeric_limits<double>::quiet_NaN();
  switch (which) {
    case TOperator::T1: return one ? std::pow(4.0, k + 1) / (k * (k + 1)) : std::pow(4.0, k) / k;
    case TOperator::T2: return one ? 3.0 / k : 1.0 / k;
    case TOperator::T3: return one ? 3.0 / (2.0 - k) : 1.0 / (2.0 - k);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

TOperatorReport t_operator_bound_report(TOperator which, double k, double q,
                                        std::span<const int> levels, int trials,
                                        TestFunction fn, std::uint64_t seed) {
  if (levels.empty() || trials < 1) throw ConfigurationError("T operator report needs levels and trials");
  if (!(q >= 1.0)) throw ValidationError("T operator report needs q >= 1");
  TOperatorReport rep;
  rep.which = which;
  rep.k = k;
  rep.q = q;
  rep.levels.assign(levels.begin(), levels.end());
  rep.printed_constant = t_operator_printed_constant(which, k, q);
  const double expo = t_operator_exponent(which, k, q);
  for (int level : levels) {
    if (level > -1 || level < -6) throw ConfigurationError("T operator levels must lie in -6..-1");
    const int points = 1 << (2 * (2 - level));
    double cmax = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
      const auto f = sample_test_function(fn, points, splitmix64(seed + trial));
      const auto band = t_operator_apply(which, f, level, k);
      TOperatorRow row;
      row.level = level;
      row.trial = trial;
      row.t_norm = band.norm(q);
      row.f_norm = lq_norm_01(f, q);
      row.ratio = row.t_norm / row.f_norm;
      row.predicted = std::pow(4.0, level * expo);
      row.c_meas = row.ratio / row.predicted;
      cmax = std::max(cmax, row.c_meas);
      if (!std::isnan(rep.printed_constant) && row.c_meas > 1.05 * rep.printed_constant)
        rep.within_printed = false;
      rep.rows.push_back(row);
    }
    rep.level_constant.push_back(cmax);
  }
  const auto [lo, hi] = std::minmax_element(rep.level_constant.begin(), rep.level_constant.end());
  rep.flatness = *hi / *lo;
  rep.passed = rep.flatness < 10.0 && rep.within_printed;
  return rep;
}

double kernel_l1_difference(double t, double r, int n) {
  if (!(t > 0.0 && r > 0.0)) throw ValidationError("kernel_l1_difference needs t, r > 0");
  if (n < 1) throw ValidationError("kernel_l1_difference needs n >= 1");
  const double surface = 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
  const double cross = std::sqrt(2.0 * n * r * (t + r) / t * std::log1p(t / r));
  auto inner = [&](double rho) {
    const double r2 = rho * rho;
    return surface * std::pow(rho, n - 1) * (heat_kernel<double>(r, r2, n) - heat_kernel<double>(t + r, r2, n));
  };
  auto outer = [&](double rho) {
    const double r2 = rho * rho;
    return surface * std::pow(rho, n - 1) * (heat_kernel<double>(t + r, r2, n) - heat_kernel<double>(r, r2, n));
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double tail = cross + 40.0 * std::sqrt(t + r);
  return GK::integrate(inner, 0.0, cross, 12, 1e-13) + GK::integrate(outer, cross, tail, 12, 1e-13);
}

KernelL1Sweep kernel_l1_sweep(std::span<const double> ts, std::span<const double> rs, int n) {
  KernelL1Sweep sw;
  std::map<long long, std::pair<double, double>> groups;  // t/r bucket -> (min, max)
  double lo = kInf, hi = 0.0;
  for (double t : ts)
    for (double r : rs) {
      KernelL1Row row{t, r, kernel_l1_difference(t, r, n), std::min(t / r, 1.0), 0.0};
      row.ratio = row.value / row.reference;
      lo = std::min(lo, row.ratio);
      hi = std::max(hi, row.ratio);
      const long long key = std::llround(std::log(t / r) * 1e6);
      auto it = groups.find(key);
      if (it == groups.end()) {
        groups[key] = {row.value, row.value};
      } else {
        it->second.first = std::min(it->second.first, row.value);
        it->second.second = std::max(it->second.second, row.value);
      }
      sw.rows.push_back(row);
    }
  sw.ratio_spread = hi / lo;
  for (const auto& [key, mm] : groups) sw.invariance_defect = std::max(sw.invariance_defect, mm.second - mm.first);
  return sw;
}

double boundary_heat_integral(const BoundaryQuadrature& quad, const Vec2& y, double tau) {
  if (!(tau > 0.0)) throw ValidationError("boundary_heat_integral needs tau > 0");
  std::vector<double> terms(quad.size());
  for (std::size_t q = 0; q < quad.size(); ++q)
    terms[q] = quad.nodes[q].weight * heat_kernel(tau, quad.nodes[q].point - y);
  return pairwise_sum(terms);
}

double boundary_heat_integral(const PolygonDomain& domain, const Vec2& y, double tau) {
  if (!(tau > 0.0)) throw ValidationError("boundary_heat_integral needs tau > 0");
  if (!contains(domain, y)) throw ValidationError("boundary_heat_integral needs y inside D");
  const int density = std::max(64, static_cast<int>(std::ceil(4.0 / std::sqrt(tau))));
  return boundary_heat_integral(boundary_quadrature(domain, density), y, tau);
}

BoundaryIntegralSweep boundary_heat_integral_sweep(const PolygonDomain& domain, const Vec2& y,
                                                   std::span<const double> taus, double tau_ref) {
  const double delta = distance_to_boundary(domain, y);
  auto phi = [&](double tau) { return std::log(std::sqrt(tau) * boundary_heat_integral(domain, y, tau)); };
  const double tp = tau_ref * std::exp(0.1), tm = tau_ref * std::exp(-0.1);
  BoundaryIntegralSweep sw;
  sw.tau_ref = tau_ref;
  sw.c = -(phi(tp) - phi(tm)) / (delta * delta / tp - delta * delta / tm);
  double lo = kInf, hi = 0.0;
  for (double tau : taus) {
    BoundaryIntegralRow row;
    row.tau = tau;
    row.delta = delta;
    row.value = boundary_heat_integral(domain, y, tau);
    row.bound = std::exp(-sw.c * delta * delta / tau) / std::sqrt(tau);
    row.ratio = row.value / row.bound;
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
    sw.rows.push_back(row);
  }
  sw.ratio_spread = hi / lo;
  return sw;
}

HardyReport hardy_ratio(const Field& g, const PolygonDomain& domain, double theta, double p) {
  if (!(theta >= 0.0 && theta < 1.0)) throw ValidationError("hardy_ratio needs 0 <= theta < 1");
  const SpaceGrid& grid = g.grid;
  const double h = grid.spacing();
  for (int j = 0; j < grid.points; ++j)
    for (int i = 0; i < grid.points; ++i) {
      const Vec2 x = grid.node(i, j);
      if (g.values(i, j) != 0.0 && contains(domain, x) && distance_to_boundary(domain, x) < 0.5 * h)
        throw ValidationError("hardy_ratio: g must vanish within h/2 of the boundary");
    }
  HardyReport rep;
  rep.lhs = weighted_distance_norm(g, domain, theta, p);
  rep.lp = weighted_distance_norm(g, domain, 0.0, p);
  double grad = 0.0;
  for (int j = 1; j + 1 < grid.points; ++j)
    for (int i = 1; i + 1 < grid.points; ++i) {
      const double gx = (g.values(i + 1, j) - g.values(i - 1, j)) / (2.0 * h);
      const double gy = (g.values(i, j + 1) - g.values(i, j - 1)) / (2.0 * h);
      grad += pow_abs(std::hypot(gx, gy), p);
    }
  rep.gradient = grad * grid.cell_measure();
  rep.rhs_proxy = std::pow(rep.lp, 1.0 - theta) * std::pow(rep.gradient, theta);
  rep.ratio = rep.rhs_proxy > 0.0 ? rep.lhs / rep.rhs_proxy : 0.0;
  return rep;
}

Field smooth_bump(const SpaceGrid& grid, const Vec2& center, double radius) {
  if (!(radius > 0.0)) throw ValidationError("smooth_bump needs a positive radius");
  return sample_field(grid, [&](const Vec2& x) {
    const double s = (x - center).squaredNorm() / (radius * radius);
    return s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
  });
}

double time_difference_integral(const SpaceTimeField& v, double p, double order) {
  const int nodes = v.time.nodes();
  const double dt = v.time.dt();
  const Eigen::ArrayXd w = trapezoid_weights(nodes, dt);
  const double expo = 1.0 + p * order;
  const Eigen::Index size = static_cast<Eigen::Index>(v.grid.points) * v.grid.points;
  Eigen::MatrixXd x(size, nodes);
  for (int m = 0; m < nodes; ++m) x.col(m) = Eigen::Map<const Eigen::VectorXd>(v.slices[m].data(), size);
  double acc = 0.0;
  if (p == 2.0) {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(nodes, nodes);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
    for (int lag = 1; lag < nodes; ++lag) {
      double s = 0.0;
      for (int m = 0; m + lag < nodes; ++m)
        s += w(m) * w(m + lag) * (gram(m, m) + gram(m + lag, m + lag) - 2.0 * gram(m + lag, m));
      acc += 2.0 * std::pow(lag * dt, -expo) * s;
    }
  } else {
    for (int lag = 1; lag < nodes; ++lag) {
      double s = 0.0;
      for (int m = 0; m + lag < nodes; ++m)
        s += w(m) * w(m + lag) * (x.col(m + lag) - x.col(m)).array().abs().pow(p).sum();
      acc += 2.0 * std::pow(lag * dt, -expo) * s;
    }
  }
  return acc * v.grid.cell_measure();
}

ScalingReport scaling_identity_check(const SpaceTimeField& g, double p, double k,
                                     const SampleEnsemble& ensemble, ScalingGrids grids, int threads) {
  ensemble.validate();
  const double big_t = g.time.horizon;
  const double rt = std::sqrt(big_t);
  int block = 1;
  if (grids == ScalingGrids::refined) {
    block = static_cast<int>(std::lround(big_t));
    if (std::abs(big_t - block) > 1e-12 || block < 1 || g.time.steps % block != 0)
      throw ValidationError("refined scaling grids need an integer T dividing the step count");
  }
  // rescaled data: same samples on the grid with half width L / sqrt(T)
  SpaceGrid gbar = g.grid;
  gbar.half_width = g.grid.half_width / rt;
  gbar.center = g.grid.center / rt;
  SpaceTimeField g_bar(gbar, TimeGrid{g.time.steps / block, 1.0});
  for (int m = 0; m <= g_bar.time.steps; ++m) g_bar.slices[m] = g.slices[m * block];

  ScalingReport rep;
  rep.exponent = 1.0 - 0.5 * p * k + 0.5 * SpaceGrid::dim;
  rep.samples = ensemble.count;
  const double factor = std::pow(big_t, rep.exponent);
  std::vector<double> lhs(ensemble.count), rhs(ensemble.count);
  parallel_for(ensemble.count, threads, [&](std::size_t i) {
    const auto d = sample_brownian(ensemble.seed(static_cast<int>(i)), g.time);
    BrownianDriver dbar;
    if (block == 1) {
      dbar = rescale_driver(d);
    } else {
      dbar.seed = d.seed;
      dbar.time = g_bar.time;
      dbar.increments.resize(g_bar.time.steps);
      for (int m = 0; m < g_bar.time.steps; ++m) dbar.increments(m) = d.increments.segment(m * block, block).sum() / rt;
      dbar.path.resize(g_bar.time.steps + 1);
      dbar.path(0) = 0.0;
      for (int m = 0; m < g_bar.time.steps; ++m) dbar.path(m + 1) = dbar.path(m) + dbar.increments(m);
    }
    const auto v = compute_v3(g, d);
    auto vbar = compute_v3(g_bar, dbar);
    for (auto& s : vbar.slices) s *= rt;
    lhs[i] = time_difference_integral(v, p, 0.5 * k);
    rhs[i] = factor * time_difference_integral(vbar, p, 0.5 * k);
  });
  rep.lhs = pairwise_sum(lhs) / ensemble.count;
  rep.rhs = pairwise_sum(rhs) / ensemble.count;
  rep.rel_error = std::abs(rep.lhs - rep.rhs) / rep.rhs;
  return rep;
}

}  // namespace sheat
