#include "sheat/function_spaces.hpp"

#include "sheat/error.hpp"
#include "sheat/fft.hpp"
#include "sheat/numerics.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace sheat {
namespace {

using MaskD = Eigen::ArrayXXd;

void require_order(double k, double lo, double hi, const char* what) {
  if (!(k > lo && k < hi))
    throw ValidationError(std::string(what) + ": order " + std::to_string(k) + " outside (" +
                          std::to_string(lo) + ", " + std::to_string(hi) + ")");
}

void require_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("exponent p must be >= 1");
}

template <typename A, typename B>
double masked_power_sum(const A& diff, const B& mask, double p) {
  if (p == 2.0) return (diff.square() * mask).sum();
  return (diff.abs().pow(p) * mask).sum();
}

// Sum over ordered pairs x != y of |v(x) - v(y)|^p / (h |x - y|)^{n + pk}, times h^{2n}.
double gagliardo_sum(const Grid2d& window, const MaskD& mask, double h, double k, double p) {
  const int rows = static_cast<int>(window.rows());
  const int cols = static_cast<int>(window.cols());
  const double expo = 2.0 + p * k;
  double total = 0.0;
  for (int b = 0; b < cols; ++b) {
    for (int a = -(rows - 1); a < rows; ++a) {
      if (b == 0 && a <= 0) continue;  // half plane; the mirror offset is the same pair
      const int ia = std::max(0, -a);
      const int len_i = rows - std::abs(a);
      const int len_j = cols - b;
      if (len_i <= 0 || len_j <= 0) continue;
      const auto va = window.block(ia, 0, len_i, len_j);
      const auto vb = window.block(ia + a, b, len_i, len_j);
      const auto ma = mask.block(ia, 0, len_i, len_j);
      const auto mb = mask.block(ia + a, b, len_i, len_j);
      const double s = masked_power_sum(va - vb, ma * mb, p);
      if (s == 0.0) continue;
      const double dist = h * std::sqrt(static_cast<double>(a * a + b * b));
      total += s * std::pow(dist, -expo);
    }
  }
  const double h2 = h * h;
  return 2.0 * total * h2 * h2;
}

MaskD mask_as_double(const InteriorMask& m) { return m.inside.cast<double>(); }

Grid2d window_of(const Grid2d& values, const InteriorMask& m) {
  return values.block(m.i0, m.j0, m.rows, m.cols);
}

// Central difference along `axis` evaluated on the mask window.
Grid2d central_difference(const Grid2d& values, const SpaceGrid& grid, const InteriorMask& m,
                          int axis) {
  const int n = grid.points;
  if (m.i0 < 1 || m.j0 < 1 || m.i0 + m.rows + 1 > n || m.j0 + m.cols + 1 > n)
    throw ValidationError("domain touches the edge of the grid box");
  const double inv = 1.0 / (2.0 * grid.spacing());
  if (axis == 0)
    return (values.block(m.i0 + 1, m.j0, m.rows, m.cols) -
            values.block(m.i0 - 1, m.j0, m.rows, m.cols)) * inv;
  return (values.block(m.i0, m.j0 + 1, m.rows, m.cols) -
          values.block(m.i0, m.j0 - 1, m.rows, m.cols)) * inv;
}

double window_lp(const Grid2d& window, const MaskD& mask, double h, double p) {
  return std::pow(masked_power_sum(window, mask, p) * h * h, 1.0 / p);
}

double smooth_step_down(double s) {
  // 1 on [0, 1/2], 0 on [1, inf), C-infinity in between.
  auto f = [](double u) { return u > 0 ? std::exp(-1.0 / u) : 0.0; };
  if (s <= 0.5) return 1.0;
  if (s >= 1.0) return 0.0;
  const double a = f(1.0 - s), b = f(s - 0.5);
  return a / (a + b);
}

bool node_index(const SpaceGrid& grid, const Vec2& x, int& i, int& j) {
  const double h = grid.spacing();
  const double fi = (x.x() - grid.coord(0, 0)) / h;
  const double fj = (x.y() - grid.coord(1, 0)) / h;
  i = static_cast<int>(std::lround(fi));
  j = static_cast<int>(std::lround(fj));
  return std::abs(fi - i) < 1e-9 && std::abs(fj - j) < 1e-9 && i >= 0 && j >= 0 &&
         i < grid.points && j < grid.points;
}

}  // namespace

void BoundaryTrace::validate() const {
  if (values.rows() != time.nodes() || values.cols() != static_cast<Eigen::Index>(quad.size()))
    throw ValidationError("boundary trace shape does not match its quadrature and time grid");
}

BoundaryTrace sample_boundary_trace(const BoundaryQuadrature& quad, const TimeGrid& time,
                                    const std::function<double(double, const Vec2&)>& fn) {
  BoundaryTrace tr{quad, time, Eigen::MatrixXd(time.nodes(), quad.size())};
  for (int m = 0; m < time.nodes(); ++m)
    for (std::size_t q = 0; q < quad.size(); ++q)
      tr.values(m, q) = fn(time.time(m), quad.nodes[q].point);
  return tr;
}

InteriorMask interior_mask(const SpaceGrid& grid, const PolygonDomain& domain) {
  const int n = grid.points;
  int imin = n, imax = -1, jmin = n, jmax = -1;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> full(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const bool in = contains(domain, grid.node(i, j));
      full(i, j) = in;
      if (in) {
        imin = std::min(imin, i);
        imax = std::max(imax, i);
        jmin = std::min(jmin, j);
        jmax = std::max(jmax, j);
      }
    }
  InteriorMask m;
  if (imax < 0) return m;
  m.i0 = imin;
  m.j0 = jmin;
  m.rows = imax - imin + 1;
  m.cols = jmax - jmin + 1;
  m.inside = full.block(imin, jmin, m.rows, m.cols);
  m.count = static_cast<int>(m.inside.count());
  return m;
}

double gagliardo_seminorm_domain(const Grid2d& values, const SpaceGrid& grid,
                                 const InteriorMask& mask, double k, double p) {
  require_order(k, 0.0, 1.0, "gagliardo_seminorm_domain");
  require_p(p);
  if (mask.count == 0) return 0.0;
  const double s = gagliardo_sum(window_of(values, mask), mask_as_double(mask),
                                 grid.spacing(), k, p);
  return std::pow(s, 1.0 / p);
}

double gagliardo_seminorm_domain(const Field& field, const PolygonDomain& domain, double k,
                                 double p) {
  return gagliardo_seminorm_domain(field.values, field.grid, interior_mask(field.grid, domain),
                                   k, p);
}

double lp_norm_domain(const Grid2d& values, const SpaceGrid& grid, const InteriorMask& mask,
                      double p) {
  require_p(p);
  if (mask.count == 0) return 0.0;
  return window_lp(window_of(values, mask), mask_as_double(mask), grid.spacing(), p);
}

double besov_norm_domain(const Grid2d& values, const SpaceGrid& grid, const InteriorMask& mask,
                         double k, double p) {
  require_order(k, 0.0, 2.0, "besov_norm_domain");
  require_p(p);
  if (mask.count == 0) return 0.0;
  const double h = grid.spacing();
  const MaskD md = mask_as_double(mask);
  const Grid2d w = window_of(values, mask);
  double norm = window_lp(w, md, h, p);
  if (k < 1.0) return norm + std::pow(gagliardo_sum(w, md, h, k, p), 1.0 / p);
  for (int axis = 0; axis < 2; ++axis) {
    const Grid2d d = central_difference(values, grid, mask, axis);
    norm += window_lp(d, md, h, p);
    if (k > 1.0) norm += std::pow(gagliardo_sum(d, md, h, k - 1.0, p), 1.0 / p);
  }
  return norm;
}

double besov_norm_domain(const Field& field, const PolygonDomain& domain, double k, double p) {
  return besov_norm_domain(field.values, field.grid, interior_mask(field.grid, domain), k, p);
}

Eigen::ArrayXd besov_norm_time_rows(const Eigen::MatrixXd& signals, const TimeGrid& time,
                                    double theta, double p) {
  require_order(theta, 0.0, 1.0, "besov_norm_time");
  require_p(p);
  const int nodes = time.nodes();
  if (signals.cols() != nodes) throw ValidationError("time signal length mismatch");
  const Eigen::ArrayXd w = trapezoid_weights(nodes, time.dt());
  const Eigen::Index rows = signals.rows();

  Eigen::ArrayXd lp_part = Eigen::ArrayXd::Zero(rows);
  for (int m = 0; m < nodes; ++m) lp_part += w(m) * pow_abs(signals.col(m).array(), p);

  Eigen::ArrayXd semi = Eigen::ArrayXd::Zero(rows);
  Eigen::ArrayXd lag_acc(rows);
  const double expo = 1.0 + p * theta;
  for (int lag = 1; lag < nodes; ++lag) {
    lag_acc.setZero();
    for (int m = 0; m + lag < nodes; ++m) {
      const auto d = signals.col(m + lag).array() - signals.col(m).array();
      if (p == 2.0)
        lag_acc += (w(m) * w(m + lag)) * d.square();
      else
        lag_acc += (w(m) * w(m + lag)) * d.abs().pow(p);
    }
    semi += (2.0 * std::pow(lag * time.dt(), -expo)) * lag_acc;
  }
  return lp_part.pow(1.0 / p) + semi.pow(1.0 / p);
}

double besov_norm_time(std::span<const double> signal, const TimeGrid& time, double theta,
                       double p) {
  Eigen::MatrixXd row(1, signal.size());
  for (std::size_t m = 0; m < signal.size(); ++m) row(0, m) = signal[m];
  return besov_norm_time_rows(row, time, theta, p)(0);
}

namespace {

Eigen::MatrixXd interior_time_matrix(const SpaceTimeField& field, const InteriorMask& mask) {
  Eigen::MatrixXd x(mask.count, field.time.nodes());
  for (int m = 0; m < field.time.nodes(); ++m) {
    const Grid2d& s = field.slices[m];
    int r = 0;
    for (int b = 0; b < mask.cols; ++b)
      for (int a = 0; a < mask.rows; ++a)
        if (mask.inside(a, b)) x(r++, m) = s(mask.i0 + a, mask.j0 + b);
  }
  return x;
}

double space_part(const SpaceTimeField& field, const InteriorMask& mask, double k, double p) {
  const Eigen::ArrayXd w = trapezoid_weights(field.time.nodes(), field.time.dt());
  double acc = 0.0;
  for (int m = 0; m < field.time.nodes(); ++m)
    acc += w(m) * pow_abs(besov_norm_domain(field.slices[m], field.grid, mask, k, p), p);
  return std::pow(acc, 1.0 / p);
}

}  // namespace

CylinderNorm anisotropic_norm_cylinder(const SpaceTimeField& field, const PolygonDomain& domain,
                                       double k, double p) {
  require_order(k, 0.0, 2.0, "anisotropic_norm_cylinder");
  require_p(p);
  const InteriorMask mask = interior_mask(field.grid, domain);
  CylinderNorm out;
  if (mask.count == 0) return out;
  out.space = space_part(field, mask, k, p);
  const Eigen::ArrayXd tn =
      besov_norm_time_rows(interior_time_matrix(field, mask), field.time, 0.5 * k, p);
  out.time = std::pow(pow_abs(tn, p).sum() * field.grid.cell_measure(), 1.0 / p);
  out.value = out.space + out.time;
  return out;
}

double spatial_mode_norm(const SpaceTimeField& field, const PolygonDomain& domain, double k,
                         double p) {
  require_order(k, 0.0, 2.0, "spatial_mode_norm");
  require_p(p);
  const InteriorMask mask = interior_mask(field.grid, domain);
  if (mask.count == 0) return 0.0;
  return space_part(field, mask, k, p);
}

CylinderNorm boundary_norm(const BoundaryTrace& trace, double k, double p) {
  require_order(k, 0.0, 1.0, "boundary_norm");
  require_p(p);
  trace.validate();
  const auto& quad = trace.quad;
  const auto q = static_cast<Eigen::Index>(quad.size());
  Eigen::ArrayXd wq(q);
  for (Eigen::Index a = 0; a < q; ++a) wq(a) = quad.nodes[a].weight;

  // pair weights w_a w_b / d(a, b)^{1 + pk}, zero on the diagonal
  Eigen::ArrayXXd pair = Eigen::ArrayXXd::Zero(q, q);
  const double expo = 1.0 + p * k;
  for (Eigen::Index b = 0; b < q; ++b)
    for (Eigen::Index a = 0; a < q; ++a)
      if (a != b) pair(a, b) = wq(a) * wq(b) * std::pow(quad.arc_distance(a, b), -expo);

  const int nodes = trace.time.nodes();
  const Eigen::ArrayXd wt = trapezoid_weights(nodes, trace.time.dt());
  double space_acc = 0.0;
  for (int m = 0; m < nodes; ++m) {
    const Eigen::ArrayXd v = trace.values.row(m).transpose().array();
    const double lp = std::pow((wq * pow_abs(v, p)).sum(), 1.0 / p);
    double semi = 0.0;
    for (Eigen::Index b = 0; b < q; ++b)
      semi += (pair.col(b) * pow_abs((v - v(b)).eval(), p)).sum();
    space_acc += wt(m) * pow_abs(lp + std::pow(semi, 1.0 / p), p);
  }
  CylinderNorm out;
  out.space = std::pow(space_acc, 1.0 / p);
  const Eigen::ArrayXd tn =
      besov_norm_time_rows(trace.values.transpose(), trace.time, 0.5 * k, p);
  out.time = std::pow((wq * pow_abs(tn, p)).sum(), 1.0 / p);
  out.value = out.space + out.time;
  return out;
}

double weighted_distance_norm(const Field& field, const PolygonDomain& domain, double theta,
                              double p) {
  if (!(theta >= 0.0 && theta < 1.0)) throw ValidationError("theta must lie in [0, 1)");
  require_p(p);
  const auto& g = field.grid;
  const double h = g.spacing();
  double acc = 0.0;
  for (int j = 0; j < g.points; ++j)
    for (int i = 0; i < g.points; ++i) {
      const Vec2 x = g.node(i, j);
      const double v = field.values(i, j);
      if (!contains(domain, x)) {
        if (std::abs(v) > 1e-12)
          throw ValidationError("weighted_distance_norm: field is not supported in the domain");
        continue;
      }
      const double delta = distance_to_boundary(domain, x);
      if (delta < 0.5 * h) continue;
      acc += (theta == 0.0 ? 1.0 : std::pow(delta, -p * theta)) * pow_abs(v, p);
    }
  return acc * g.cell_measure();
}

Field trivial_extension(const Field& field, const PolygonDomain& domain) {
  Field out(field.grid);
  for (int j = 0; j < field.grid.points; ++j)
    for (int i = 0; i < field.grid.points; ++i)
      if (contains(domain, field.grid.node(i, j))) out.values(i, j) = field.values(i, j);
  return out;
}

SteinExtension stein_extension(const Field& field, const PolygonDomain& domain) {
  const auto& g = field.grid;
  SteinExtension out{trivial_extension(field, domain), true, 0.0};
  if (!domain.is_axis_aligned()) return out;
  int vi = 0, vj = 0;
  for (const auto& v : domain.vertices())
    if (!node_index(g, v, vi, vj)) return out;

  const auto& box = domain.bounding_box();
  const Vec2 extent = box.hi - box.lo;
  const double rc = 0.25 * std::min(extent.x(), extent.y());
  const double h = g.spacing();
  const int n = g.points;

  Grid2d& e = out.field.values;
  const int nv = domain.edge_count();

  auto left_normal = [&](int edge) {
    const Segment s = domain.edge(edge);
    const Vec2 d = (s.b - s.a).normalized();
    return Vec2(-d.y(), d.x());
  };
  auto inside_node = [&](int i, int j) {
    return i >= 0 && j >= 0 && i < n && j < n && contains(domain, g.node(i, j));
  };

  // Boundary nodes: linear extrapolation along the inward direction.
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Vec2 x = g.node(i, j);
      if (!on_boundary(domain, x, 1e-9 * h)) continue;
      Vec2 dir = Vec2::Zero();
      bool at_vertex = false;
      for (int v = 0; v < nv; ++v)
        if ((domain.vertices()[v] - x).norm() < 1e-9 * h) {
          dir = left_normal(v) + left_normal((v + nv - 1) % nv);
          at_vertex = true;
        }
      if (!at_vertex)
        for (int ed = 0; ed < nv; ++ed) {
          const Segment s = domain.edge(ed);
          const Vec2 d = s.b - s.a;
          const double u = (x - s.a).dot(d) / d.squaredNorm();
          if (u > 0 && u < 1 && std::abs(d.x() * (x - s.a).y() - d.y() * (x - s.a).x()) <
                                    1e-9 * h * d.norm())
            dir = left_normal(ed);
        }
      const int di = static_cast<int>(std::lround(dir.x()));
      const int dj = static_cast<int>(std::lround(dir.y()));
      double v = 0.0;
      if (inside_node(i + di, j + dj) && inside_node(i + 2 * di, j + 2 * dj))
        v = 2.0 * field.values(i + di, j + dj) - field.values(i + 2 * di, j + 2 * dj);
      else if (inside_node(i + di, j + dj))
        v = field.values(i + di, j + dj);
      e(i, j) = v;
    }

  // Exterior nodes: reflect through the nearest boundary point, then cut off.
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Vec2 x = g.node(i, j);
      if (contains(domain, x) || on_boundary(domain, x, 1e-9 * h)) continue;
      const double d = distance_to_boundary(domain, x);
      if (d >= rc) continue;
      const Vec2 y = nearest_boundary_point(domain, x);
      const Vec2 star = 2.0 * y - x;
      int si = 0, sj = 0;
      double v = 0.0;
      if (node_index(g, star, si, sj) &&
          (contains(domain, star) || on_boundary(domain, star, 1e-9 * h)))
        v = e(si, sj);
      e(i, j) = v * smooth_step_down(d / rc);
    }
  out.fallback = false;
  out.cutoff_radius = rc;
  return out;
}

double interpolate_bilinear(const Grid2d& values, const SpaceGrid& grid, const Vec2& point) {
  const double h = grid.spacing();
  const int n = grid.points;
  const double fx = (point.x() - grid.coord(0, 0)) / h;
  const double fy = (point.y() - grid.coord(1, 0)) / h;
  if (!(fx >= 0.0 && fy >= 0.0 && fx <= n - 1 && fy <= n - 1))
    throw ValidationError("interpolation point outside the grid box");
  int i = std::min(static_cast<int>(std::floor(fx)), n - 2);
  int j = std::min(static_cast<int>(std::floor(fy)), n - 2);
  const double a = fx - i, b = fy - j;
  return (1 - a) * (1 - b) * values(i, j) + a * (1 - b) * values(i + 1, j) +
         (1 - a) * b * values(i, j + 1) + a * b * values(i + 1, j + 1);
}

BoundaryTrace restrict_to_boundary(const SpaceTimeField& field, const BoundaryQuadrature& quad) {
  BoundaryTrace tr{quad, field.time, Eigen::MatrixXd(field.time.nodes(), quad.size())};
  for (int m = 0; m < field.time.nodes(); ++m)
    for (std::size_t q = 0; q < quad.size(); ++q)
      tr.values(m, q) = interpolate_bilinear(field.slices[m], field.grid, quad.nodes[q].point);
  return tr;
}

double parabolic_potential_norm(const SpaceTimeField& field, double s, double p) {
  require_p(p);
  const int n = field.grid.points;
  const int nodes = field.time.nodes();
  const int tt = 2 * nodes;
  const std::size_t slice = static_cast<std::size_t>(n) * n;
  const std::size_t half = static_cast<std::size_t>(n / 2 + 1);

  std::vector<double> block(static_cast<std::size_t>(tt) * slice, 0.0);
  for (int m = 0; m < nodes; ++m)
    std::copy(field.slices[m].data(), field.slices[m].data() + slice, block.begin() + m * slice);

  SpaceTimeFourier fft(tt, n);
  std::vector<std::complex<double>> spec(fft.spectrum_size());
  fft.forward(block.data(), spec.data());

  const double unit_x = std::numbers::pi / field.grid.half_width;
  const double unit_t = 2.0 * std::numbers::pi / (tt * field.time.dt());
  auto wrap = [](int k, int len) { return k <= len / 2 ? k : k - len; };
  for (int it = 0; it < tt; ++it) {
    const double tau = unit_t * wrap(it, tt);
    for (int jy = 0; jy < n; ++jy) {
      const double ky = unit_x * wrap(jy, n);
      std::complex<double>* row = spec.data() + (static_cast<std::size_t>(it) * n + jy) * half;
      for (std::size_t kx = 0; kx < half; ++kx) {
        const double xi2 = unit_x * unit_x * kx * kx + ky * ky;
        row[kx] *= std::pow(std::complex<double>(1.0 + xi2, tau), 0.5 * s);
      }
    }
  }
  fft.inverse(spec.data(), block.data());
  const double scale = 1.0 / (static_cast<double>(tt) * slice);

  const Eigen::ArrayXd w = trapezoid_weights(nodes, field.time.dt());
  double acc = 0.0;
  for (int m = 0; m < nodes; ++m) {
    Eigen::Map<const Eigen::ArrayXd> sl(block.data() + m * slice, slice);
    acc += w(m) * pow_abs((sl * scale).eval(), p).sum();
  }
  return std::pow(acc * field.grid.cell_measure(), 1.0 / p);
}

}  // namespace sheat
