#include "sheat/error.hpp"
#include "sheat/kernels.hpp"
#include "sheat/stochastic.hpp"

#include <doctest.h>

#include <set>

using namespace sheat;

TEST_CASE("brownian driver statistics and determinism") {
  const auto tg = make_time_grid(64, 1.0);
  const SampleEnsemble ens{42, 10000};
  std::vector<double> end(ens.count);
  for (int i = 0; i < ens.count; ++i) end[i] = sample_brownian(ens.seed(i), tg).path(64);
  const auto mom = sample_moments(end);
  CHECK(std::abs(mom.mean) < 3e-2);
  CHECK(std::abs(mom.variance - 1.0) < 0.05);

  const auto a = sample_brownian(7, tg), b = sample_brownian(7, tg);
  CHECK((a.increments.array() == b.increments.array()).all());
  CHECK(a.path(0) == 0.0);
  double run = 0;
  for (int m = 0; m < 64; ++m) {
    run += a.increments(m);
    CHECK(a.path(m + 1) == run);
  }
}

TEST_CASE("sub-seeds are distinct") {
  const SampleEnsemble ens{1, 100000};
  std::set<std::uint64_t> seen;
  for (int i = 0; i < ens.count; ++i) seen.insert(ens.seed(i));
  CHECK(seen.size() == static_cast<std::size_t>(ens.count));
  CHECK_THROWS_AS(SampleEnsemble({1, 0}).validate(), ConfigurationError);
}

TEST_CASE("bridge refinement preserves coarse nodes and statistics") {
  const auto tg = make_time_grid(16, 1.0);
  const auto levels = brownian_hierarchy(5, tg, 4);
  REQUIRE(levels.size() == 4);
  for (std::size_t l = 1; l < levels.size(); ++l) {
    CHECK(levels[l].steps() == 2 * levels[l - 1].steps());
    for (int m = 0; m <= levels[l - 1].steps(); ++m)
      CHECK(levels[l].path(2 * m) == doctest::Approx(levels[l - 1].path(m)).epsilon(1e-13));
  }
  // fine increments have variance dt_fine
  std::vector<double> inc;
  for (int s = 0; s < 2000; ++s) {
    const auto f = refine_brownian(sample_brownian(1000 + s, tg));
    for (int m = 0; m < f.steps(); ++m) inc.push_back(f.increments(m));
  }
  const auto mom = sample_moments(inc);
  CHECK(mom.variance == doctest::Approx(1.0 / 32).epsilon(0.03));
}

TEST_CASE("ito integral") {
  const auto tg = make_time_grid(100, 1.0);
  const auto d = sample_brownian(3, tg);
  std::vector<double> ones(100, 1.0), zeros(100, 0.0);
  CHECK(ito_integrate(ones, d) == doctest::Approx(d.path(100)).epsilon(1e-13));
  CHECK(ito_integrate(zeros, d) == 0.0);
  CHECK_THROWS_AS(ito_integrate(std::vector<double>(99, 1.0), d), ValidationError);

  // linearity
  std::vector<double> a(100), b(100), c(100);
  for (int m = 0; m < 100; ++m) {
    a[m] = std::sin(m * 0.1);
    b[m] = m * 0.01;
    c[m] = 2 * a[m] - 3 * b[m];
  }
  CHECK(ito_integrate(c, d) ==
        doctest::Approx(2 * ito_integrate(a, d) - 3 * ito_integrate(b, d)).epsilon(1e-12));

  // int w dw = (w_1^2 - 1)/2 in mean; the right-endpoint sum has mean +1
  const SampleEnsemble ens{77, 10000};
  std::vector<double> left(ens.count), right(ens.count);
  for (int i = 0; i < ens.count; ++i) {
    const auto dr = sample_brownian(ens.seed(i), tg);
    std::vector<double> wl(100), wr(100);
    for (int m = 0; m < 100; ++m) {
      wl[m] = dr.path(m);
      wr[m] = dr.path(m + 1);
    }
    left[i] = ito_integrate(wl, dr);
    right[i] = ito_integrate(wr, dr);
  }
  const auto ml = sample_moments(left), mr = sample_moments(right);
  CHECK(std::abs(ml.mean) < 4 * std::sqrt(ml.variance / ens.count));
  CHECK(std::abs(mr.mean - 1.0) < 4 * std::sqrt(mr.variance / ens.count));
}

TEST_CASE("isometry report") {
  const auto tg = make_time_grid(200, 1.0);
  const SampleEnsemble ens{2024, 10000};
  std::vector<double> ones(200, 1.0), lin(200);
  for (int m = 0; m < 200; ++m) lin[m] = tg.time(m);

  const auto r1 = isometry_report(ones, tg, ens);
  CHECK(r1.quadrature_variance == doctest::Approx(1.0));
  CHECK(r1.ratio > 0.95);
  CHECK(r1.ratio < 1.05);
  CHECK(std::abs(r1.mc_mean) < 4 * r1.mean_stderr);

  const auto r2 = isometry_report(lin, tg, ens);
  CHECK(r2.quadrature_variance == doctest::Approx(1.0 / 3).epsilon(0.01));

  // heat kernel probe: K_m = Gamma(1 - t_m + a, x0 - xc)
  std::vector<double> probe(200);
  for (int m = 0; m < 200; ++m) probe[m] = heat_kernel(1.0 - tg.time(m) + 0.05, Vec2(0.2, -0.1));
  const auto r3 = isometry_report(probe, tg, ens);
  CHECK(r3.ratio > 0.9);
  CHECK(r3.ratio < 1.1);

  // independent of the thread count
  const auto r4 = isometry_report(probe, tg, ens, 3);
  CHECK(r4.mc_variance == r3.mc_variance);
  CHECK(r4.mc_mean == r3.mc_mean);
}

TEST_CASE("rescaled driver") {
  const auto tg = make_time_grid(32, 4.0);
  const auto d = sample_brownian(9, tg);
  const auto r = rescale_driver(d);
  CHECK(r.time.horizon == 1.0);
  CHECK(r.steps() == 32);
  CHECK(r.path(32) == doctest::Approx(d.path(32) / 2.0));
}
