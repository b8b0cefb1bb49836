#pragma once

#include "sheat/fields.hpp"

#include <vector>

namespace sheat {

struct Segment {
  Vec2 a;
  Vec2 b;
  double length() const { return (b - a).norm(); }
};

struct BoundingBox {
  Vec2 lo;
  Vec2 hi;
};

/// A simple polygon with counterclockwise vertices, standing in for a
/// bounded Lipschitz domain in the plane.
class PolygonDomain {
 public:
  /// Validates simplicity and nonzero area; clockwise input is reversed.
  static PolygonDomain from_vertices(std::vector<Vec2> vertices);

  static PolygonDomain rectangle(const Vec2& lo, const Vec2& hi);
  static PolygonDomain unit_square();
  /// [0,1]^2 minus [0.5,1]^2.
  static PolygonDomain l_shape();

  const std::vector<Vec2>& vertices() const { return vertices_; }
  int edge_count() const { return static_cast<int>(vertices_.size()); }
  Segment edge(int e) const {
    return {vertices_[e], vertices_[(e + 1) % vertices_.size()]};
  }

  double area() const { return area_; }
  double perimeter() const { return perimeter_; }
  double lipschitz_constant() const { return lipschitz_; }
  const BoundingBox& bounding_box() const { return box_; }
  bool is_axis_aligned() const;

 private:
  PolygonDomain() = default;

  std::vector<Vec2> vertices_;
  double area_ = 0.0;
  double perimeter_ = 0.0;
  double lipschitz_ = 0.0;
  BoundingBox box_;
};

/// Open-interior membership; points on the boundary return false.
bool contains(const PolygonDomain& domain, const Vec2& point);

/// Euclidean distance to the nearest edge (inside or outside).
double distance_to_boundary(const PolygonDomain& domain, const Vec2& point);

/// Nearest point of the boundary.
Vec2 nearest_boundary_point(const PolygonDomain& domain, const Vec2& point);

/// True when the point lies on an edge up to a small absolute tolerance.
bool on_boundary(const PolygonDomain& domain, const Vec2& point, double tol = 1e-10);

struct BoundaryNode {
  Vec2 point;
  double weight = 0.0;
  double arclength = 0.0;  // position along the boundary from vertex 0
  int edge = 0;
};

/// Composite midpoint rule for surface measure, nodes ordered along the boundary.
struct BoundaryQuadrature {
  std::vector<BoundaryNode> nodes;
  double perimeter = 0.0;
  int density = 1;

  std::size_t size() const { return nodes.size(); }
  /// Shorter of the two arcs between nodes a and b.
  double arc_distance(std::size_t a, std::size_t b) const;
};

BoundaryQuadrature boundary_quadrature(const PolygonDomain& domain,
                                       int nodes_per_unit_length);

/// Exponents and the admissibility parameter for the boundary-correction gain.
struct RegionParams {
  double p = 2.0;
  double k = 0.5;
  double eps = 1.0;

  void validate() const;
};

/// Membership of (1/p, k) in the admissible region. The bounds
/// p0 = 1/2 + eps/2 and p0' = 1/2 - eps/2 are read as values of 1/p:
///   case 1: p0' < 1/p < p0        and 0 < k < 1
///   case 2: p0 <= 1/p < 1         and 2/p - 1 - eps < k < 1
///   case 3: 0 < 1/p <= p0'        and 0 < k < 2/p + eps
bool in_region_R_eps(const RegionParams& params);

struct RegionDiagnostic {
  bool reciprocal_reading = false;  // the reading used by in_region_R_eps
  bool literal_reading = false;     // bounds applied to p itself
  int matched_case = 0;             // 1..3 under the reciprocal reading, 0 if none
};

RegionDiagnostic region_diagnostic(const RegionParams& params);

}  // namespace sheat
