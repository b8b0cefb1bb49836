#include "sheat/geometry.hpp"

#include "sheat/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace sheat {
namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const std::vector<Vec2>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * s;
}

Vec2 closest_on_segment(const Segment& s, const Vec2& p) {
  const Vec2 d = s.b - s.a;
  const double len2 = d.squaredNorm();
  const double u = len2 > 0.0 ? std::clamp((p - s.a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return s.a + u * d;
}

// Perpendicular distance via the cross product so that points on the
// segment give exactly zero.
double segment_distance(const Segment& s, const Vec2& p) {
  const Vec2 d = s.b - s.a;
  const double len2 = d.squaredNorm();
  const double u = (p - s.a).dot(d) / len2;
  if (u <= 0.0) return (p - s.a).norm();
  if (u >= 1.0) return (p - s.b).norm();
  return std::abs(cross(d, p - s.a)) / std::sqrt(len2);
}

int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross(b - a, c - a);
  if (std::abs(v) <= 1e-14) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) - 1e-14 <= p.x() && p.x() <= std::max(a.x(), b.x()) + 1e-14 &&
         std::min(a.y(), b.y()) - 1e-14 <= p.y() && p.y() <= std::max(a.y(), b.y()) + 1e-14;
}

bool segments_intersect(const Segment& s, const Segment& t) {
  const int o1 = orientation(s.a, s.b, t.a), o2 = orientation(s.a, s.b, t.b);
  const int o3 = orientation(t.a, t.b, s.a), o4 = orientation(t.a, t.b, s.b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(s.a, s.b, t.a)) return true;
  if (o2 == 0 && on_segment(s.a, s.b, t.b)) return true;
  if (o3 == 0 && on_segment(t.a, t.b, s.a)) return true;
  if (o4 == 0 && on_segment(t.a, t.b, s.b)) return true;
  return false;
}

}  // namespace

PolygonDomain PolygonDomain::from_vertices(std::vector<Vec2> vertices) {
  if (vertices.size() < 3) throw ValidationError("polygon needs at least 3 vertices");
  for (const auto& v : vertices)
    if (!v.allFinite()) throw ValidationError("polygon vertex is not finite");

  double area = signed_area(vertices);
  if (std::abs(area) < 1e-14) throw ValidationError("degenerate polygon (zero area)");
  if (area < 0) {
    std::reverse(vertices.begin(), vertices.end());
    area = -area;
  }

  PolygonDomain d;
  d.vertices_ = std::move(vertices);
  d.area_ = area;

  const int n = d.edge_count();
  for (int e = 0; e < n; ++e) {
    if (d.edge(e).length() <= 0.0) throw ValidationError("polygon has a repeated vertex");
  }
  for (int e = 0; e < n; ++e) {
    for (int f = e + 1; f < n; ++f) {
      const bool adjacent = f == e + 1 || (e == 0 && f == n - 1);
      if (adjacent) continue;
      if (segments_intersect(d.edge(e), d.edge(f)))
        throw ValidationError("polygon is not simple (edges " + std::to_string(e) +
                              " and " + std::to_string(f) + " intersect)");
    }
  }

  d.perimeter_ = 0.0;
  d.box_ = {d.vertices_[0], d.vertices_[0]};
  for (int e = 0; e < n; ++e) {
    d.perimeter_ += d.edge(e).length();
    d.box_.lo = d.box_.lo.cwiseMin(d.vertices_[e]);
    d.box_.hi = d.box_.hi.cwiseMax(d.vertices_[e]);
  }

  // Local graph slope at each vertex is |cot(alpha / 2)| for interior angle
  // alpha, measured against the line orthogonal to the angle bisector.
  double lip = 0.0;
  for (int v = 0; v < n; ++v) {
    const Vec2& prev = d.vertices_[(v + n - 1) % n];
    const Vec2& cur = d.vertices_[v];
    const Vec2& next = d.vertices_[(v + 1) % n];
    const Vec2 in = (cur - prev).normalized();
    const Vec2 out = (next - cur).normalized();
    const double turn = std::atan2(cross(in, out), in.dot(out));
    const double alpha = std::numbers::pi - turn;
    const double slope = std::abs(std::cos(alpha / 2) / std::sin(alpha / 2));
    lip = std::max(lip, slope);
  }
  d.lipschitz_ = std::max(lip, std::numeric_limits<double>::min());
  if (!std::isfinite(d.lipschitz_)) throw ValidationError("polygon has a zero-angle spike");
  return d;
}

PolygonDomain PolygonDomain::rectangle(const Vec2& lo, const Vec2& hi) {
  return from_vertices({lo, {hi.x(), lo.y()}, hi, {lo.x(), hi.y()}});
}

PolygonDomain PolygonDomain::unit_square() { return rectangle({0, 0}, {1, 1}); }

PolygonDomain PolygonDomain::l_shape() {
  return from_vertices({{0, 0}, {1, 0}, {1, 0.5}, {0.5, 0.5}, {0.5, 1}, {0, 1}});
}

bool PolygonDomain::is_axis_aligned() const {
  for (int e = 0; e < edge_count(); ++e) {
    const Segment s = edge(e);
    if (s.a.x() != s.b.x() && s.a.y() != s.b.y()) return false;
  }
  return true;
}

double distance_to_boundary(const PolygonDomain& domain, const Vec2& point) {
  double best = std::numeric_limits<double>::infinity();
  for (int e = 0; e < domain.edge_count(); ++e) {
    best = std::min(best, segment_distance(domain.edge(e), point));
  }
  return best;
}

Vec2 nearest_boundary_point(const PolygonDomain& domain, const Vec2& point) {
  double best = std::numeric_limits<double>::infinity();
  Vec2 arg = domain.vertices().front();
  for (int e = 0; e < domain.edge_count(); ++e) {
    const Vec2 c = closest_on_segment(domain.edge(e), point);
    const double d = (c - point).norm();
    if (d < best) {
      best = d;
      arg = c;
    }
  }
  return arg;
}

bool on_boundary(const PolygonDomain& domain, const Vec2& point, double tol) {
  return distance_to_boundary(domain, point) <= tol;
}

bool contains(const PolygonDomain& domain, const Vec2& point) {
  if (on_boundary(domain, point)) return false;
  bool inside = false;
  const auto& v = domain.vertices();
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    const bool crosses = (v[i].y() > point.y()) != (v[j].y() > point.y());
    if (crosses) {
      const double x =
          v[j].x() + (point.y() - v[j].y()) * (v[i].x() - v[j].x()) / (v[i].y() - v[j].y());
      if (point.x() < x) inside = !inside;
    }
  }
  return inside;
}

double BoundaryQuadrature::arc_distance(std::size_t a, std::size_t b) const {
  const double d = std::abs(nodes[a].arclength - nodes[b].arclength);
  return std::min(d, perimeter - d);
}

BoundaryQuadrature boundary_quadrature(const PolygonDomain& domain,
                                       int nodes_per_unit_length) {
  if (nodes_per_unit_length < 1)
    throw ValidationError("boundary quadrature density must be >= 1");
  BoundaryQuadrature q;
  q.density = nodes_per_unit_length;
  double offset = 0.0;
  for (int e = 0; e < domain.edge_count(); ++e) {
    const Segment s = domain.edge(e);
    const double len = s.length();
    const int count =
        std::max(1, static_cast<int>(std::ceil(len * nodes_per_unit_length - 1e-9)));
    const double w = len / count;
    for (int c = 0; c < count; ++c) {
      const double u = (c + 0.5) / count;
      q.nodes.push_back({s.a + u * (s.b - s.a), w, offset + u * len, e});
    }
    offset += len;
  }
  q.perimeter = offset;
  return q;
}

void RegionParams::validate() const {
  if (!(p >= 2.0)) throw ValidationError("region parameter p must be >= 2");
  if (!(eps > 0.0 && eps <= 1.0)) throw ValidationError("region parameter eps must lie in (0,1]");
  if (!std::isfinite(k)) throw ValidationError("region parameter k must be finite");
}

RegionDiagnostic region_diagnostic(const RegionParams& params) {
  params.validate();
  const double x = 1.0 / params.p;
  const double k = params.k;
  const double eps = params.eps;
  const double p0 = 0.5 + 0.5 * eps;
  const double p0_prime = 0.5 - 0.5 * eps;

  RegionDiagnostic d;
  if (p0_prime < x && x < p0 && 0 < k && k < 1) {
    d.matched_case = 1;
  } else if (p0 <= x && x < 1 && 2 * x - 1 - eps < k && k < 1) {
    d.matched_case = 2;
  } else if (0 < x && x <= p0_prime && 0 < k && k < 2 * x + eps) {
    d.matched_case = 3;
  }
  d.reciprocal_reading = d.matched_case != 0;

  const double p = params.p;
  d.literal_reading = (p0 < p && p < p0_prime && 0 < k && k < 1) ||
                      (1 < p && p <= p0 && 2 / p - 1 - eps < k && k < 1) ||
                      (p0_prime <= p && 0 < k && k < 2 / p + eps);
  return d;
}

bool in_region_R_eps(const RegionParams& params) {
  return region_diagnostic(params).reciprocal_reading;
}

}  // namespace sheat
