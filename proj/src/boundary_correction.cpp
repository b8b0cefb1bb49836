#include "sheat/boundary_correction.hpp"

#include "sheat/error.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sheat {

struct HeatIbvpSolver::Factor {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

namespace {

bool is_node(const SpaceGrid& grid, const Vec2& x, int& i, int& j) {
  const double h = grid.spacing();
  const double a = (x[0] - grid.coord(0, 0)) / h, b = (x[1] - grid.coord(1, 0)) / h;
  i = static_cast<int>(std::lround(a));
  j = static_cast<int>(std::lround(b));
  return std::abs(a - i) < 1e-9 && std::abs(b - j) < 1e-9;
}

// Arclength of a boundary point measured from vertex 0 along the CCW boundary.
double arclength_of(const PolygonDomain& domain, const Vec2& x) {
  double offset = 0.0;
  for (int e = 0; e < domain.edge_count(); ++e) {
    const Segment s = domain.edge(e);
    const double len = s.length();
    const Vec2 d = (s.b - s.a) / len;
    const double u = (x - s.a).dot(d);
    const Vec2 r = x - s.a - u * d;
    if (r.norm() < 1e-10 && u >= -1e-10 && u <= len + 1e-10) return offset + std::clamp(u, 0.0, len);
    offset += len;
  }
  throw NumericalError("boundary lattice node is not on the boundary");
}

}  // namespace

HeatIbvpSolver::HeatIbvpSolver(const PolygonDomain& domain, const SpaceGrid& grid,
                               const TimeGrid& time)
    : domain_(domain), grid_(grid), time_(time) {
  grid.validate();
  time.validate();
  if (!domain.is_axis_aligned())
    throw UnsupportedError("IBVP solver needs a domain with axis-parallel edges");
  const int n = grid.points;
  std::vector<int> vi(domain.vertices().size()), vj(domain.vertices().size());
  for (std::size_t v = 0; v < domain.vertices().size(); ++v) {
    if (!is_node(grid, domain.vertices()[v], vi[v], vj[v]))
      throw UnsupportedError("IBVP solver needs polygon vertices on grid nodes");
    if (vi[v] < 1 || vj[v] < 1 || vi[v] > n - 2 || vj[v] > n - 2)
      throw UnsupportedError("domain must lie strictly inside the computational box");
  }

  mask_ = interior_mask(grid, domain);
  Eigen::ArrayXXi index = Eigen::ArrayXXi::Constant(n, n, -1);
  Eigen::ArrayXXi bindex = Eigen::ArrayXXi::Constant(n, n, -1);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (mask_.contains_node(i, j)) {
        index(i, j) = static_cast<int>(interior_.size());
        interior_.emplace_back(i, j);
      } else if (on_boundary(domain, grid.node(i, j), 1e-9 * grid.spacing())) {
        bindex(i, j) = static_cast<int>(boundary_.size());
        boundary_.emplace_back(i, j);
        const Vec2 x = grid.node(i, j);
        boundary_arclength_.push_back(arclength_of(domain, x));
        int c = -1;
        for (std::size_t v = 0; v < vi.size(); ++v)
          if (vi[v] == i && vj[v] == j) c = static_cast<int>(v);
        corner_.push_back(c);
      }
    }
  if (interior_.empty()) throw ConfigurationError("IBVP solver: no interior grid nodes");

  const double r = time.dt() / grid.cell_measure();
  const int ni = interior_count();
  std::vector<Eigen::Triplet<double>> a, c;
  a.reserve(5 * ni);
  const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
  for (int u = 0; u < ni; ++u) {
    const auto [i, j] = interior_[u];
    a.emplace_back(u, u, 1.0 + 4.0 * r);
    for (int s = 0; s < 4; ++s) {
      const int ii = i + di[s], jj = j + dj[s];
      if (index(ii, jj) >= 0) {
        a.emplace_back(u, index(ii, jj), -r);
      } else if (bindex(ii, jj) >= 0) {
        c.emplace_back(u, bindex(ii, jj), r);
      } else {
        throw NumericalError("IBVP stencil leaves the closed domain");
      }
    }
  }
  Eigen::SparseMatrix<double> mat(ni, ni);
  mat.setFromTriplets(a.begin(), a.end());
  coupling_.resize(ni, boundary_count());
  coupling_.setFromTriplets(c.begin(), c.end());

  factor_ = std::make_unique<Factor>();
  factor_->ldlt.compute(mat);
  if (factor_->ldlt.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "IBVP factorization failed (" << ni << " unknowns, dt/h^2 = " << r << ")";
    throw NumericalError(msg.str());
  }
}

HeatIbvpSolver::~HeatIbvpSolver() = default;
HeatIbvpSolver::HeatIbvpSolver(HeatIbvpSolver&&) noexcept = default;

Eigen::VectorXd HeatIbvpSolver::boundary_values(const BoundaryTrace& bdata, int row) const {
  const auto& nodes = bdata.quad.nodes;
  const int q = static_cast<int>(nodes.size());
  const double per = bdata.quad.perimeter;
  Eigen::VectorXd out(boundary_count());
  for (int b = 0; b < boundary_count(); ++b) {
    if (corner_[b] >= 0) {
      // average of the nearest node on each adjacent edge
      const int e_next = corner_[b];
      const int e_prev = (e_next + domain_.edge_count() - 1) % domain_.edge_count();
      int first = -1, last = -1;
      for (int k = 0; k < q; ++k) {
        if (nodes[k].edge == e_next && first < 0) first = k;
        if (nodes[k].edge == e_prev) last = k;
      }
      out(b) = 0.5 * (bdata.values(row, first) + bdata.values(row, last));
      continue;
    }
    const double s = boundary_arclength_[b];
    // nodes are sorted by arclength; find the bracketing pair periodically
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), s,
                                     [](double v, const BoundaryNode& nd) { return v < nd.arclength; });
    const int hi = static_cast<int>(it - nodes.begin()) % q;
    const int lo = (hi + q - 1) % q;
    double gap = nodes[hi].arclength - nodes[lo].arclength;
    double off = s - nodes[lo].arclength;
    if (gap <= 0.0) gap += per;
    if (off < 0.0) off += per;
    const double w = gap > 0.0 ? off / gap : 0.0;
    out(b) = (1.0 - w) * bdata.values(row, lo) + w * bdata.values(row, hi);
  }
  return out;
}

SpaceTimeField HeatIbvpSolver::solve(const BoundaryTrace& bdata) const {
  bdata.validate();
  if (!(bdata.time == time_)) throw ValidationError("IBVP: boundary data on another time grid");
  if (std::abs(bdata.quad.perimeter - domain_.perimeter()) > 1e-9 * domain_.perimeter())
    throw ValidationError("IBVP: boundary data for another domain");

  SpaceTimeField h(grid_, time_);
  Eigen::VectorXd state = Eigen::VectorXd::Zero(interior_count());
  for (int m = 1; m <= time_.steps; ++m) {
    const Eigen::VectorXd bv = boundary_values(bdata, m);
    state = factor_->ldlt.solve(state + coupling_ * bv);
    if (!state.allFinite()) throw NumericalError("IBVP: non-finite solution at step " + std::to_string(m));
    Grid2d& slice = h.slices[m];
    for (int u = 0; u < interior_count(); ++u) slice(interior_[u].first, interior_[u].second) = state(u);
    for (int b = 0; b < boundary_count(); ++b) slice(boundary_[b].first, boundary_[b].second) = bv(b);
  }
  return h;
}

SpaceTimeField solve_deterministic_ibvp(const PolygonDomain& domain, const BoundaryTrace& bdata,
                                       const SpaceGrid& grid, const TimeGrid& time) {
  return HeatIbvpSolver(domain, grid, time).solve(bdata);
}

CompatibilityReport validate_compatibility(const Field& u0, const BoundaryTrace& b, double p,
                                           double k, const PolygonDomain& domain,
                                           double tolerance) {
  b.validate();
  CompatibilityReport rep;
  rep.zero_initial_trace = k > 2.0 / p;
  rep.checked = k > 3.0 / p && k < 1.0 + 1.0 / p;
  std::ostringstream note;
  if (!rep.checked) {
    note << "compatibility not required for p = " << p << ", k = " << k << " (needs 3/p < k)";
  } else {
    for (std::size_t q = 0; q < b.quad.size(); ++q) {
      const Vec2& x = b.quad.nodes[q].point;
      if (!on_boundary(domain, x, 1e-8)) throw ValidationError("trace node is off the domain boundary");
      const double d = std::abs(interpolate_bilinear(u0.values, u0.grid, x) - b.values(0, q));
      rep.max_mismatch = std::max(rep.max_mismatch, d);
    }
    rep.passed = rep.max_mismatch < tolerance;
    note << "max |u0 - b(0)| = " << rep.max_mismatch << " against tolerance " << tolerance;
  }
  if (rep.zero_initial_trace) note << "; b'(0) zeroed since k > 2/p";
  rep.note = note.str();
  return rep;
}

bool zero_initial_trace(BoundaryTrace& trace, double p, double k) {
  if (!(k > 2.0 / p)) return false;
  trace.values.row(0).setZero();
  return true;
}

}  // namespace sheat
