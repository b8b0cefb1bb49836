#include "sheat/error.hpp"
#include "sheat/function_spaces.hpp"
#include "sheat/kernels.hpp"
#include "sheat/lp_analysis.hpp"
#include "sheat/stochastic.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <algorithm>
#include <random>

using namespace sheat;

namespace {

SpaceGrid square_grid(int n) { return make_space_grid(n, 2.0, Vec2(0.5, 0.5)); }

// Straight double loop over interior node pairs, no offset table.
double brute_gagliardo(const SpaceGrid& g, const PolygonDomain& d,
                       const std::function<double(const Vec2&)>& f, double k, double p) {
  std::vector<Vec2> pts;
  std::vector<double> vals;
  for (int j = 0; j < g.points; ++j)
    for (int i = 0; i < g.points; ++i)
      if (contains(d, g.node(i, j))) {
        pts.push_back(g.node(i, j));
        vals.push_back(f(g.node(i, j)));
      }
  double s = 0;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = 0; b < pts.size(); ++b)
      if (a != b)
        if (p == 2 && k == 0.5) {
          const double d2 = (pts[a] - pts[b]).squaredNorm();
          const double dv = vals[a] - vals[b];
          s += dv * dv / (d2 * std::sqrt(d2));
        } else {
          s += std::pow(std::abs(vals[a] - vals[b]), p) / std::pow((pts[a] - pts[b]).norm(), 2 + p * k);
        }
  const double h = g.spacing();
  return std::pow(s * std::pow(h, 4), 1 / p);
}

double median(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_CASE("interior mask on the unit square") {
  const auto g = square_grid(64);
  const auto m = interior_mask(g, PolygonDomain::unit_square());
  CHECK(m.count == 15 * 15);
  CHECK(m.rows == 15);
}

TEST_CASE("gagliardo seminorm") {
  const auto sq = PolygonDomain::unit_square();
  const auto g = square_grid(64);
  Field c(g, Grid2d::Constant(64, 64, 3.0));
  CHECK(gagliardo_seminorm_domain(c, sq, 0.5, 2) == 0.0);
  CHECK_THROWS_AS(gagliardo_seminorm_domain(c, sq, 1.0, 2), ValidationError);
  CHECK_THROWS_AS(gagliardo_seminorm_domain(c, sq, 0.0, 2), ValidationError);

  auto x1 = [](const Vec2& x) { return x.x(); };
  // offset-table sum equals the plain double loop at the same resolution
  for (double p : {2.0, 3.0}) {
    const double fast = gagliardo_seminorm_domain(sample_field(g, x1), sq, 0.5, p);
    CHECK(fast == doctest::Approx(brute_gagliardo(g, sq, x1, 0.5, p)).epsilon(1e-12));
  }
  const auto l = PolygonDomain::l_shape();
  auto wave = [](const Vec2& x) { return std::sin(3 * x.x()) * x.y(); };
  CHECK(gagliardo_seminorm_domain(sample_field(g, wave), l, 0.3, 2.5) ==
        doctest::Approx(brute_gagliardo(g, l, wave, 0.3, 2.5)).epsilon(1e-12));

  // Against brute-force sums at h = 1/64 and 1/128 extrapolated to h -> 0.
  // Excluding the diagonal makes the discrete sum converge at first order.
  const double b64 = brute_gagliardo(square_grid(256), sq, x1, 0.5, 2);
  const double b128 = brute_gagliardo(square_grid(512), sq, x1, 0.5, 2);
  const double oracle = 2 * b128 - b64;
  const double fine = gagliardo_seminorm_domain(sample_field(square_grid(512), x1), sq, 0.5, 2);
  CHECK(std::abs(fine - oracle) <= 0.02 * oracle);
  const double coarse = gagliardo_seminorm_domain(sample_field(square_grid(128), x1), sq, 0.5, 2);
  CHECK(std::abs(coarse - oracle) > std::abs(fine - oracle));

  // a jump is not in B^{0.9}_2
  auto jump = [](const Vec2& x) { return x.x() < 0.5 ? 1.0 : 0.0; };
  double prev = 0;
  for (int n : {32, 64, 128}) {
    const auto gg = square_grid(n);
    const double v = gagliardo_seminorm_domain(sample_field(gg, jump), sq, 0.9, 2);
    CHECK(v > 1.2 * prev);
    prev = v;
  }
}

TEST_CASE("time Besov norm") {
  const auto tg = make_time_grid(1000, 1.0);
  std::vector<double> c(1001, -2.0);
  CHECK(besov_norm_time(c, tg, 0.5, 2) == doctest::Approx(2.0).epsilon(1e-12));

  std::vector<double> t(1001);
  for (int m = 0; m <= 1000; ++m) t[m] = tg.time(m);
  // L^2 part 1/sqrt(3); seminorm^2 = int int |t-s|^{1/2} = 2 / (1.5 * 2.5)
  const double oracle = std::sqrt(1.0 / 3) + std::sqrt(2.0 / (1.5 * 2.5));
  CHECK(besov_norm_time(t, tg, 0.25, 2) == doctest::Approx(oracle).epsilon(0.01));
  CHECK_THROWS_AS(besov_norm_time(t, tg, 1.0, 2), ValidationError);

  // Brownian paths: order 0.75 grows with refinement, order 0.25 does not
  std::vector<double> hi[3], lo[3];
  for (int s = 0; s < 40; ++s) {
    const auto levels = brownian_hierarchy(500 + s, make_time_grid(64, 1.0), 3);
    for (int l = 0; l < 3; ++l) {
      std::vector<double> w(levels[l].path.data(), levels[l].path.data() + levels[l].path.size());
      hi[l].push_back(besov_norm_time(w, levels[l].time, 0.75, 2));
      lo[l].push_back(besov_norm_time(w, levels[l].time, 0.25, 2));
    }
  }
  CHECK(median(hi[1]) > 1.1 * median(hi[0]));
  CHECK(median(hi[2]) > 1.1 * median(hi[1]));
  CHECK(median(lo[2]) < 1.05 * median(lo[1]));
}

TEST_CASE("anisotropic norm") {
  const auto sq = PolygonDomain::unit_square();
  const auto g = square_grid(32);
  const auto tg = make_time_grid(32, 0.1);
  SpaceTimeField zero(g, tg);
  CHECK(anisotropic_norm_cylinder(zero, sq, 0.75, 2).value == 0.0);

  // separable field, unrolled by hand
  auto a = [](double t) { return 1 + 5 * t * t; };
  auto b = [](const Vec2& x) { return std::cos(2 * x.x()) + x.y(); };
  const auto f = sample_space_time(g, tg, [&](double t, const Vec2& x) { return a(t) * b(x); });
  const auto n = anisotropic_norm_cylinder(f, sq, 0.75, 2);
  CHECK(n.value >= n.space);
  CHECK(n.value >= n.time);

  const Field bf = sample_field(g, b);
  const double bnorm = besov_norm_domain(bf, sq, 0.75, 2);
  std::vector<double> as(tg.nodes());
  for (int m = 0; m < tg.nodes(); ++m) as[m] = a(tg.time(m));
  double space = 0;
  for (int m = 0; m < tg.nodes(); ++m) {
    const double w = (m == 0 || m == tg.steps) ? 0.5 * tg.dt() : tg.dt();
    space += w * std::pow(as[m] * bnorm, 2);
  }
  CHECK(n.space == doctest::Approx(std::sqrt(space)).epsilon(1e-12));

  const double anorm = besov_norm_time(as, tg, 0.375, 2);
  const double bl2 = lp_norm_domain(bf.values, g, interior_mask(g, sq), 2);
  CHECK(n.time == doctest::Approx(anorm * bl2).epsilon(1e-12));

  // homogeneity and triangle inequality
  SpaceTimeField f2 = sample_space_time(g, tg, [](double t, const Vec2& x) { return std::sin(5 * t + x.x() * x.y()); });
  SpaceTimeField sum(g, tg), scaled(g, tg);
  for (int m = 0; m < tg.nodes(); ++m) {
    sum.slices[m] = f.slices[m] + f2.slices[m];
    scaled.slices[m] = -2.5 * f.slices[m];
  }
  for (double p : {2.0, 3.0}) {
    const double nf = anisotropic_norm_cylinder(f, sq, 0.6, p).value;
    const double nf2 = anisotropic_norm_cylinder(f2, sq, 0.6, p).value;
    CHECK(anisotropic_norm_cylinder(sum, sq, 0.6, p).value <= nf + nf2 + 1e-9);
    CHECK(anisotropic_norm_cylinder(scaled, sq, 0.6, p).value == doctest::Approx(2.5 * nf).epsilon(1e-10));
  }

  // k >= 1 uses differences first
  const auto lin = sample_space_time(g, tg, [](double, const Vec2& x) { return x.x(); });
  const double h1 = spatial_mode_norm(lin, sq, 1.0, 2);
  // ||x1||_{L^2} + ||1||_{L^2} + ||0||_{L^2} over interior nodes, times sqrt(T)
  const auto mask = interior_mask(g, sq);
  const Grid2d ones = Grid2d::Ones(32, 32);
  const double expect = (lp_norm_domain(lin.slices[0], g, mask, 2) + lp_norm_domain(ones, g, mask, 2)) * std::sqrt(0.1);
  CHECK(h1 == doctest::Approx(expect).epsilon(1e-12));
  // the k - 1 seminorm of a constant gradient vanishes
  CHECK(spatial_mode_norm(lin, sq, 1.5, 2) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("Gaussian heat flow is stable under refinement") {
  const auto sq = PolygonDomain::unit_square();
  double prev = 0;
  for (int level = 0; level < 2; ++level) {
    const int n = 128 << level;
    const int steps = 32 << level;
    const auto g = square_grid(n);
    const auto tg = make_time_grid(steps, 0.1);
    const auto u0 = sample_field(g, [](const Vec2& x) { return heat_kernel(0.25, Vec2(x - Vec2(0.5, 0.5))); });
    SpaceTimeField v(g, tg);
    for (int m = 0; m < tg.nodes(); ++m) v.slices[m] = heat_convolve(u0, tg.time(m)).values;
    const double val = anisotropic_norm_cylinder(v, sq, 0.75, 2).value;
    if (level > 0) CHECK(std::abs(val - prev) <= 0.05 * val);
    prev = val;
  }
}

TEST_CASE("boundary norm") {
  const auto sq = PolygonDomain::unit_square();
  const auto tg = make_time_grid(16, 0.1);
  const auto q = boundary_quadrature(sq, 16);
  BoundaryTrace zero{q, tg, Eigen::MatrixXd::Zero(tg.nodes(), q.size())};
  CHECK(boundary_norm(zero, 0.5, 2).value == 0.0);

  auto smooth = [](double t, const Vec2& x) { return std::cos(x.x() + 2 * x.y()) * (1 + t); };
  const double a = boundary_norm(sample_boundary_trace(q, tg, smooth), 0.5, 2).value;
  const double b = boundary_norm(sample_boundary_trace(boundary_quadrature(sq, 32), tg, smooth), 0.5, 2).value;
  CHECK(std::isfinite(a));
  CHECK(std::abs(a - b) <= 0.03 * b);

  BoundaryTrace bad{q, tg, Eigen::MatrixXd::Zero(3, 3)};
  CHECK_THROWS_AS(boundary_norm(bad, 0.5, 2), ValidationError);
}

TEST_CASE("weighted distance norm") {
  const auto sq = PolygonDomain::unit_square();
  const auto g = square_grid(64);
  auto bump = [](const Vec2& x) {
    const double r2 = (x - Vec2(0.5, 0.5)).squaredNorm();
    return r2 < 0.16 ? std::exp(-1 / (1 - r2 / 0.16)) : 0.0;
  };
  const auto f = trivial_extension(sample_field(g, bump), sq);
  const double l2 = lp_norm_domain(f.values, g, interior_mask(g, sq), 2);
  CHECK(weighted_distance_norm(f, sq, 0.0, 2) == doctest::Approx(l2 * l2).epsilon(1e-12));

  // 4x resolution oracle for theta = 0.5
  const auto g4 = square_grid(256);
  const double coarse = weighted_distance_norm(f, sq, 0.5, 2);
  const double fine = weighted_distance_norm(trivial_extension(sample_field(g4, bump), sq), sq, 0.5, 2);
  CHECK(coarse == doctest::Approx(fine).epsilon(0.01));

  Field bad(g, Grid2d::Ones(64, 64));
  CHECK_THROWS_AS(weighted_distance_norm(bad, sq, 0.5, 2), ValidationError);

  // indicator: p theta = 1.8 > 1, so the sum keeps growing near the boundary
  double prev = 0;
  for (int n : {32, 64, 128, 256}) {
    const auto gg = square_grid(n);
    const auto one = trivial_extension(Field(gg, Grid2d::Ones(n, n)), sq);
    const double v = weighted_distance_norm(one, sq, 0.9, 2);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("extensions") {
  const auto sq = PolygonDomain::unit_square();
  const auto g = square_grid(64);
  const auto mask = interior_mask(g, sq);
  auto check_restriction = [&](const Field& in, const Field& out, const InteriorMask& m) {
    for (int j = 0; j < 64; ++j)
      for (int i = 0; i < 64; ++i)
        if (m.contains_node(i, j)) CHECK(out.values(i, j) == in.values(i, j));
  };

  Field one(g, Grid2d::Ones(64, 64));
  const auto triv = trivial_extension(one, sq);
  CHECK(triv.values.sum() == doctest::Approx(15 * 15));
  check_restriction(one, triv, mask);

  const auto st = stein_extension(one, sq);
  CHECK_FALSE(st.fallback);
  check_restriction(one, st.field, mask);
  // constant on a neighborhood of D
  for (int j = 0; j < 64; ++j)
    for (int i = 0; i < 64; ++i)
      if (distance_to_boundary(sq, g.node(i, j)) < 0.5 * st.cutoff_radius || contains(sq, g.node(i, j)))
        CHECK(st.field.values(i, j) == doctest::Approx(1.0));

  const auto lin = sample_field(g, [](const Vec2& x) { return x.x(); });
  const auto sl = stein_extension(lin, sq);
  check_restriction(lin, sl.field, mask);
  // boundary nodes receive the trace, neighbors across an edge are mirror values
  int bi = 0, bj = 0;
  for (int j = 0; j < 64; ++j)
    for (int i = 0; i < 64; ++i)
      if (on_boundary(sq, g.node(i, j)) && g.node(i, j).y() > 0.2 && g.node(i, j).y() < 0.8 &&
          g.node(i, j).x() > 0.9) {
        bi = i;
        bj = j;
      }
  CHECK(sl.field.values(bi, bj) == doctest::Approx(1.0));
  CHECK(sl.field.values(bi + 1, bj) == doctest::Approx(lin.values(bi - 1, bj)));

  const auto l = PolygonDomain::l_shape();
  const auto sl2 = stein_extension(lin, l);
  CHECK_FALSE(sl2.fallback);
  check_restriction(lin, sl2.field, interior_mask(g, l));

  const auto tri = PolygonDomain::from_vertices({{0, 0}, {1, 0}, {0, 1}});
  CHECK(stein_extension(lin, tri).fallback);

  // bump that does not vanish on the boundary: extension constant is moderate
  const auto g2 = square_grid(128);
  auto smooth = [](const Vec2& x) { return std::exp(-2 * (x - Vec2(0.3, 0.6)).squaredNorm()); };
  const auto f = sample_field(g2, smooth);
  const auto ext = stein_extension(f, sq);
  const auto fam = build_lp_family(g2);
  const double global = besov_norm_rn(ext.field, 0.75, 2, fam);
  const double local = besov_norm_domain(f, sq, 0.75, 2);
  CHECK(global <= 10 * local);
  MESSAGE("extension constant " << global / local);
}

TEST_CASE("indicator of D across refinements") {
  const auto sq = PolygonDomain::unit_square();
  std::vector<double> low, high;
  for (int n : {64, 128, 256}) {
    const auto g = square_grid(n);
    const auto ind = trivial_extension(Field(g, Grid2d::Ones(n, n)), sq);
    const auto fam = build_lp_family(g);
    low.push_back(besov_norm_rn(ind, 0.4, 2, fam));
    high.push_back(besov_norm_rn(ind, 0.9, 2, fam));
  }
  CHECK(high[2] / high[1] > 1.1);
  CHECK(high[1] / high[0] > 1.1);
  CHECK(low[2] / low[1] < high[2] / high[1]);
}

TEST_CASE("restriction to the boundary") {
  const auto sq = PolygonDomain::unit_square();
  const auto g = square_grid(64);
  const auto tg = make_time_grid(4, 0.1);
  const auto q = boundary_quadrature(sq, 10);
  const auto c = sample_space_time(g, tg, [](double, const Vec2&) { return 2.0; });
  CHECK((restrict_to_boundary(c, q).values.array() - 2.0).abs().maxCoeff() < 1e-14);
  const auto lin = sample_space_time(g, tg, [](double t, const Vec2& x) { return x.x() * (1 + t); });
  const auto tr = restrict_to_boundary(lin, q);
  for (int m = 0; m < tg.nodes(); ++m)
    for (std::size_t n = 0; n < q.size(); ++n)
      CHECK(tr.values(m, n) == doctest::Approx(q.nodes[n].point.x() * (1 + tg.time(m))).epsilon(1e-13));

  // heat flow of a Gaussian versus the closed form at nodes
  const auto gf = square_grid(128);
  const auto u0 = sample_field(gf, [](const Vec2& x) { return heat_kernel(0.05, Vec2(x - Vec2(0.4, 0.5))); });
  SpaceTimeField v(gf, tg);
  for (int m = 0; m < tg.nodes(); ++m) v.slices[m] = heat_convolve(u0, tg.time(m)).values;
  const auto q2 = boundary_quadrature(sq, 8);
  const auto tv = restrict_to_boundary(v, q2);
  double worst = 0;
  for (int m = 0; m < tg.nodes(); ++m)
    for (std::size_t n = 0; n < q2.size(); ++n) {
      // nodes at density 8 fall on grid lines of the 1/32 mesh in both coordinates
      const double exact = heat_kernel(0.05 + tg.time(m), Vec2(q2.nodes[n].point - Vec2(0.4, 0.5)));
      worst = std::max(worst, std::abs(tv.values(m, n) - exact));
    }
  CHECK(worst < 1e-6);

  Field tiny_field(make_space_grid(8, 0.1), Grid2d::Zero(8, 8));
  SpaceTimeField outside(tiny_field.grid, tg);
  CHECK_THROWS_AS(restrict_to_boundary(outside, q), ValidationError);
}

TEST_CASE("parabolic potential norm") {
  const auto g = make_space_grid(32, 4.0);
  const auto tg = make_time_grid(16, 0.5);
  SpaceTimeField zero(g, tg);
  CHECK(parabolic_potential_norm(zero, -0.5, 2) == 0.0);
  const auto f = sample_space_time(g, tg, [](double t, const Vec2& x) {
    return (1 + t) * heat_kernel(0.2, x);
  });
  const double n0 = parabolic_potential_norm(f, 0.0, 2);
  // order zero is the identity: plain L^2(R^n_T)
  double direct = 0;
  for (int m = 0; m < tg.nodes(); ++m) {
    const double w = (m == 0 || m == tg.steps) ? 0.5 * tg.dt() : tg.dt();
    direct += w * f.slices[m].square().sum() * g.cell_measure();
  }
  CHECK(n0 == doctest::Approx(std::sqrt(direct)).epsilon(1e-10));
  // smoothing orders are decreasing
  CHECK(parabolic_potential_norm(f, -0.5, 2) < n0);
  CHECK(parabolic_potential_norm(f, -1.0, 2) < parabolic_potential_norm(f, -0.5, 2));
  SpaceTimeField f3(g, tg);
  for (int m = 0; m < tg.nodes(); ++m) f3.slices[m] = 3 * f.slices[m];
  CHECK(parabolic_potential_norm(f3, -0.5, 2) == doctest::Approx(3 * parabolic_potential_norm(f, -0.5, 2)).epsilon(1e-12));
}
