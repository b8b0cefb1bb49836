#include "sheat/boundary_correction.hpp"
#include "sheat/error.hpp"
#include "sheat/function_spaces.hpp"
#include "sheat/kernels.hpp"
#include "sheat/mild_solution.hpp"
#include "sheat/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <algorithm>
#include <random>

using namespace sheat;

namespace {

const Vec2 kCenter(0.3, -0.2);

Field gaussian(const SpaceGrid& g, double a) {
  return sample_field(g, [&](const Vec2& x) { return heat_kernel(a, x - kCenter); });
}

double sup_diff(const Grid2d& a, const Grid2d& b) { return (a - b).abs().maxCoeff(); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("v1 follows the heat semigroup") {
  const auto g = make_space_grid(128, 8.0);
  const auto tg = make_time_grid(8, 0.2);
  const double a = 0.05;
  const auto v1 = compute_v1(gaussian(g, a), tg);
  CHECK(sup_diff(v1.slices[0], gaussian(g, a).values) == 0.0);
  for (int m = 1; m <= tg.steps; ++m) CHECK(sup_diff(v1.slices[m], gaussian(g, tg.time(m) + a).values) < 1e-6);

  const auto zero = compute_v1(Field(g), tg);
  for (const auto& s : zero.slices) CHECK(s.abs().maxCoeff() == 0.0);
}

TEST_CASE("v1 of the indicator of the unit square") {
  const auto sq = PolygonDomain::unit_square();
  const double t = 0.1;
  const Vec2 probe(0.5, 0.5);
  auto indicator = [&](const SpaceGrid& g) {
    return trivial_extension(sample_field(g, [](const Vec2&) { return 1.0; }), sq);
  };
  // real-space Riemann sum of Gamma(t, probe - y) over the sampled indicator
  auto direct = [&](const SpaceGrid& g) {
    const auto ind = indicator(g);
    double s = 0.0;
    for (int j = 0; j < g.points; ++j)
      for (int i = 0; i < g.points; ++i)
        if (ind.values(i, j) != 0.0) s += heat_kernel(t, probe - g.node(i, j));
    return s * g.cell_measure();
  };
  const auto g = make_space_grid(64, 2.0, Vec2(0.5, 0.5));
  const auto fine = make_space_grid(256, 2.0, Vec2(0.5, 0.5));
  const auto v1 = compute_v1(indicator(g), make_time_grid(1, t));
  const double value = v1.slices[1](32, 32);
  REQUIRE(g.node(32, 32).isApprox(probe));
  CHECK(value == doctest::Approx(direct(g)).epsilon(1e-6));
  // the sampled indicator misses a half cell at each edge
  CHECK(std::abs(value - direct(fine)) < 2.0 * g.spacing());
  CHECK(std::abs(value - direct(fine)) > std::abs(direct(make_space_grid(128, 2.0, Vec2(0.5, 0.5))) - direct(fine)));
}

TEST_CASE("v2 of zero forcing vanishes") {
  const auto g = make_space_grid(32, 4.0);
  const auto tg = make_time_grid(10, 0.5);
  const auto v2 = compute_v2(SpaceTimeField(g, tg), tg);
  for (const auto& s : v2.slices) CHECK(s.abs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(compute_v2(SpaceTimeField(g, tg), make_time_grid(11, 0.5)), ValidationError);
}

TEST_CASE("v2 with time-independent Gaussian forcing") {
  const auto g = make_space_grid(128, 8.0);
  const double a = 0.05, horizon = 0.5;
  const auto f0 = gaussian(g, a);
  std::vector<double> dts, errs;
  for (int steps : {8, 16, 32}) {
    const auto tg = make_time_grid(steps, horizon);
    const auto v2 = compute_v2(constant_in_time(f0, tg), tg);
    double err = 0.0;
    for (int p = 0; p < 20; ++p) {
      const int i = 52 + 3 * (p % 5), j = 58 + 2 * (p / 5);
      const double r2 = (g.node(i, j) - kCenter).squaredNorm();
      auto integrand = [&](double tau) { return heat_kernel<double>(tau + a, r2, 2); };
      const double exact =
          boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, horizon, 10, 1e-13);
      err = std::max(err, std::abs(v2.slices[steps](i, j) - exact));
    }
    dts.push_back(tg.dt());
    errs.push_back(err);
  }
  MESSAGE("v2 errors " << errs[0] << " " << errs[1] << " " << errs[2]);
  CHECK(observed_order(dts, errs) >= 1.7);
}

TEST_CASE("v2 reproduces a manufactured solution") {
  // w = t Gamma(a, x - xc) solves w_t - Delta w = Gamma(a) - t Delta Gamma(a)
  const auto g = make_space_grid(128, 8.0);
  const double a = 0.1, horizon = 0.4;
  std::vector<double> dts, errs;
  for (int steps : {16, 32, 64}) {
    const auto tg = make_time_grid(steps, horizon);
    const auto f = sample_space_time(g, tg, [&](double t, const Vec2& x) {
      return heat_kernel(a, x - kCenter) - t * heat_kernel_laplacian(a, x - kCenter);
    });
    const auto v2 = compute_v2(f, tg);
    double err = 0.0;
    for (int p = 0; p < 20; ++p) {
      const int i = 50 + 3 * (p % 5), j = 56 + 3 * (p / 5);
      err = std::max(err, std::abs(v2.slices[steps](i, j) - horizon * heat_kernel(a, g.node(i, j) - kCenter)));
    }
    dts.push_back(tg.dt());
    errs.push_back(err);
  }
  MESSAGE("manufactured errors " << errs[0] << " " << errs[1] << " " << errs[2]);
  CHECK(errs[2] < 0.02 * heat_kernel(a, Vec2(0, 0)) * horizon);
  CHECK(observed_order(dts, errs) >= 0.9);
}

TEST_CASE("v3 basic properties") {
  const auto g = make_space_grid(32, 4.0);
  const auto tg = make_time_grid(16, 1.0);
  const auto d = sample_brownian(5, tg);
  const auto v = compute_v3(SpaceTimeField(g, tg), d);
  for (const auto& s : v.slices) CHECK(s.abs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(compute_v3(SpaceTimeField(g, make_time_grid(8, 1.0)), d), ValidationError);

  // linearity in g and in the increments
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  auto random_g = [&]() {
    const double c0 = nd(rng), c1 = nd(rng), c2 = nd(rng);
    return sample_space_time(g, tg, [=](double t, const Vec2& x) {
      return c0 * std::exp(-x.squaredNorm()) + c1 * t * std::cos(x[0]) * std::exp(-x.squaredNorm() / 2) +
             c2 * std::sin(x[1]) * std::exp(-x.squaredNorm());
    });
  };
  const auto g1 = random_g(), g2 = random_g();
  SpaceTimeField mix(g, tg);
  for (int m = 0; m <= tg.steps; ++m) mix.slices[m] = 1.5 * g1.slices[m] - 0.7 * g2.slices[m];
  const auto a1 = compute_v3(g1, d), a2 = compute_v3(g2, d), am = compute_v3(mix, d);
  auto d2 = d;
  d2.increments *= -2.0;
  const auto ad = compute_v3(g1, d2);
  double dev = 0.0, dev_inc = 0.0;
  for (int m = 0; m <= tg.steps; ++m) {
    dev = std::max(dev, sup_diff(am.slices[m], 1.5 * a1.slices[m] - 0.7 * a2.slices[m]));
    dev_inc = std::max(dev_inc, sup_diff(ad.slices[m], -2.0 * a1.slices[m]));
  }
  CHECK(dev < 1e-10);
  CHECK(dev_inc < 1e-10);
}

TEST_CASE("v3 variance matches the isometry integral") {
  const auto g = make_space_grid(32, 4.0);
  const auto tg = make_time_grid(50, 1.0);
  const double a = 0.1;
  const auto gfield = constant_in_time(gaussian(g, a), tg);
  const int ip = 20, jp = 14;  // |x0 - xc|^2 = 0.58 keeps the kernel away from its small-lag peak
  const Vec2 x0 = g.node(ip, jp);
  const SampleEnsemble ens{99, 10000};
  std::vector<double> vals(ens.count);
  parallel_for(ens.count, 0, [&](int i) {
    vals[i] = compute_v3(gfield, sample_brownian(ens.seed(i), tg)).slices[tg.steps](ip, jp);
  });
  const auto mom = sample_moments(vals);
  const double r2 = (x0 - kCenter).squaredNorm();
  auto sq = [&](double s) {
    const double k = heat_kernel<double>(1.0 - s + a, r2, 2);
    return k * k;
  };
  const double oracle = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(sq, 0.0, 1.0, 10, 1e-12);
  MESSAGE("variance " << mom.variance << " oracle " << oracle);
  CHECK(std::abs(mom.variance / oracle - 1.0) < 0.1);
}

TEST_CASE("v3 scaling identity on matched grids") {
  const double big_t = 4.0, rt = std::sqrt(big_t);
  const int n = 64, steps = 32;
  const auto g_orig = make_space_grid(n, 4.0 * rt);
  const auto g_scaled = make_space_grid(n, 4.0);
  const auto t_orig = make_time_grid(steps, big_t);
  const auto t_scaled = make_time_grid(steps, 1.0);
  auto coeff = [](double s, const Vec2& y) { return (1.0 + 0.3 * s) * std::exp(-y.squaredNorm() / 8.0); };
  const auto d = sample_brownian(21, t_orig);
  const auto v = compute_v3(sample_space_time(g_orig, t_orig, coeff), d);
  const auto vbar = compute_v3(
      sample_space_time(g_scaled, t_scaled, [&](double s, const Vec2& y) { return coeff(big_t * s, rt * y); }),
      rescale_driver(d));
  double dev = 0.0;
  for (int m = 0; m <= steps; ++m) dev = std::max(dev, sup_diff(v.slices[m], rt * vbar.slices[m]));
  CHECK(dev < 1e-6);
}

TEST_CASE("v3 pathwise increments shrink under bridge refinement") {
  const auto g = make_space_grid(32, 4.0);
  const auto coarse = make_time_grid(16, 1.0);
  const SampleEnsemble ens{8, 16};
  std::vector<std::vector<double>> jumps(3, std::vector<double>(ens.count));
  for (int i = 0; i < ens.count; ++i) {
    const auto levels = brownian_hierarchy(ens.seed(i), coarse, 3);
    for (int l = 0; l < 3; ++l) {
      const auto& tg = levels[l].time;
      const auto gfield = sample_space_time(g, tg, [](double, const Vec2& x) { return std::exp(-x.squaredNorm()); });
      const auto v = compute_v3(gfield, levels[l]);
      double jmax = 0.0;
      for (int m = 0; m < tg.steps; ++m) jmax = std::max(jmax, sup_diff(v.slices[m + 1], v.slices[m]));
      jumps[l][i] = jmax;
    }
  }
  CHECK(median(jumps[1]) < median(jumps[0]));
  CHECK(median(jumps[2]) < median(jumps[1]));
}

TEST_CASE("time regularity of v3 at a probe") {
  const auto g = make_space_grid(32, 4.0);
  const auto coarse = make_time_grid(32, 1.0);
  const SampleEnsemble ens{12, 24};
  const int levels = 3;
  std::vector<std::vector<double>> hi(levels, std::vector<double>(ens.count)), lo = hi;
  for (int i = 0; i < ens.count; ++i) {
    const auto drivers = brownian_hierarchy(ens.seed(i), coarse, levels);
    for (int l = 0; l < levels; ++l) {
      const auto& tg = drivers[l].time;
      const auto gfield = sample_space_time(g, tg, [](double, const Vec2& x) { return std::exp(-x.squaredNorm()); });
      const auto v = compute_v3(gfield, drivers[l]);
      std::vector<double> path(tg.nodes());
      for (int m = 0; m < tg.nodes(); ++m) path[m] = v.slices[m](16, 16);
      hi[l][i] = besov_norm_time(path, tg, 0.75, 2.0);
      lo[l][i] = besov_norm_time(path, tg, 0.25, 2.0);
    }
  }
  std::vector<double> mh, ml;
  for (int l = 0; l < levels; ++l) {
    mh.push_back(median(hi[l]));
    ml.push_back(median(lo[l]));
  }
  MESSAGE("theta 0.75: " << mh[0] << " " << mh[1] << " " << mh[2] << "  theta 0.25: " << ml[0] << " " << ml[1] << " " << ml[2]);
  // divergence: increments do not shrink; boundedness: they shrink geometrically
  CHECK(mh[1] > mh[0]);
  CHECK(mh[2] - mh[1] >= mh[1] - mh[0]);
  CHECK(ml[2] - ml[1] < ml[1] - ml[0]);
}

TEST_CASE("deterministic residual of v1 + v2") {
  const auto g = make_space_grid(128, 8.0);
  const double a = 0.1;
  std::vector<double> dts, res;
  for (int steps : {20, 40, 80}) {
    const auto tg = make_time_grid(steps, 0.4);
    const auto f = sample_space_time(g, tg, [&](double t, const Vec2& x) {
      return std::cos(3 * t) * heat_kernel(a, x - kCenter);
    });
    const auto v1 = compute_v1(gaussian(g, 2 * a), tg);
    const auto v2 = compute_v2(f, tg);
    double r = 0.0;
    const int m = steps / 2;
    const Grid2d u0 = v1.slices[m] + v2.slices[m], u1 = v1.slices[m + 1] + v2.slices[m + 1];
    const Grid2d lap = spectral_laplacian(Field(g, u0)).values;
    for (int i = 60; i < 70; ++i)
      for (int j = 58; j < 64; ++j)
        r = std::max(r, std::abs((u1(i, j) - u0(i, j)) / tg.dt() - lap(i, j) - f.slices[m](i, j)));
    dts.push_back(tg.dt());
    res.push_back(r);
  }
  MESSAGE("residuals " << res[0] << " " << res[1] << " " << res[2]);
  CHECK(observed_order(dts, res) >= 0.9);
}

TEST_CASE("assembly") {
  const auto sq = PolygonDomain::unit_square();
  const auto g = make_space_grid(32, 1.0, Vec2(0.5, 0.5));
  const auto tg = make_time_grid(4, 0.1);
  const SpaceTimeField zero(g, tg);
  const auto u = assemble_u(zero, zero, zero, zero, sq);
  for (const auto& s : u.slices) CHECK(s.abs().maxCoeff() == 0.0);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ud(-1, 1);
  SpaceTimeField f1(g, tg), f2(g, tg), f3(g, tg), f4(g, tg);
  for (auto* f : {&f1, &f2, &f3, &f4})
    for (auto& s : f->slices) s = s.unaryExpr([&](double) { return ud(rng); });
  const auto sum = assemble_u(f1, f2, f3, f4, sq);
  const auto closed = closure_mask(g, sq);
  for (int m = 0; m <= tg.steps; ++m)
    for (int j = 0; j < 32; ++j)
      for (int i = 0; i < 32; ++i) {
        const double want = closed(i, j) ? f1.slices[m](i, j) + f2.slices[m](i, j) + f3.slices[m](i, j) + f4.slices[m](i, j) : 0.0;
        CHECK(sum.slices[m](i, j) == want);
      }
  CHECK_THROWS_AS(assemble_u(f1, f2, f3, SpaceTimeField(g, make_time_grid(5, 0.1)), sq), ValidationError);
}

TEST_CASE("eigenfunction decay through the full pipeline") {
  const auto sq = PolygonDomain::unit_square();
  const auto g = make_space_grid(128, 2.0, Vec2(0.5, 0.5));
  const auto tg = make_time_grid(200, 0.1);
  const double pi = std::numbers::pi;
  auto eig = [&](const Vec2& x) { return std::sin(pi * x[0]) * std::sin(pi * x[1]); };
  const auto u0 = trivial_extension(sample_field(g, eig), sq);
  const SpaceTimeField zero(g, tg);
  const auto v1 = compute_v1(u0, tg);
  const auto quad = boundary_quadrature(sq, 64);
  auto bprime = restrict_to_boundary(v1, quad);
  bprime.values *= -1.0;
  const auto h = solve_deterministic_ibvp(sq, bprime, g, tg);
  const auto u = assemble_u(v1, zero, zero, h, sq);
  const double decay = std::exp(-2 * pi * pi * 0.1);
  const auto mask = interior_mask(g, sq);
  double err = 0.0;
  for (int jb = 0; jb < mask.cols; ++jb)
    for (int ia = 0; ia < mask.rows; ++ia)
      if (mask.inside(ia, jb)) {
        const int i = mask.i0 + ia, j = mask.j0 + jb;
        err = std::max(err, std::abs(u.slices[tg.steps](i, j) - decay * eig(g.node(i, j))));
        CHECK(u.slices[0](i, j) == doctest::Approx(eig(g.node(i, j))).epsilon(1e-12));
      }
  MESSAGE("eigenfunction sup error relative to peak " << err / decay);
  CHECK(err < 0.01 * decay);
}
