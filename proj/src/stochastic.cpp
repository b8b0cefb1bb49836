#include "sheat/stochastic.hpp"

#include "sheat/error.hpp"
#include "sheat/numerics.hpp"

#include <cmath>
#include <random>

namespace sheat {
namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

void fill_path(BrownianDriver& d) {
  d.path.resize(d.increments.size() + 1);
  d.path(0) = 0.0;
  for (Eigen::Index m = 0; m < d.increments.size(); ++m)
    d.path(m + 1) = d.path(m) + d.increments(m);
}

}  // namespace

BrownianDriver sample_brownian(std::uint64_t seed, const TimeGrid& time) {
  time.validate();
  BrownianDriver d;
  d.seed = seed;
  d.time = time;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(time.dt()));
  d.increments.resize(time.steps);
  for (int m = 0; m < time.steps; ++m) d.increments(m) = normal(rng);
  fill_path(d);
  return d;
}

BrownianDriver refine_brownian(const BrownianDriver& coarse) {
  BrownianDriver fine;
  fine.seed = splitmix64(coarse.seed ^ kGamma);
  fine.time = TimeGrid{2 * coarse.time.steps, coarse.time.horizon};
  std::mt19937_64 rng(fine.seed);
  std::normal_distribution<double> normal;
  // Bridge midpoint: left half = dW/2 + sqrt(dt)/2 Z.
  const double spread = 0.5 * std::sqrt(coarse.time.dt());
  fine.increments.resize(fine.time.steps);
  for (int m = 0; m < coarse.time.steps; ++m) {
    const double dw = coarse.increments(m);
    const double left = 0.5 * dw + spread * normal(rng);
    fine.increments(2 * m) = left;
    fine.increments(2 * m + 1) = dw - left;
  }
  fill_path(fine);
  return fine;
}

std::vector<BrownianDriver> brownian_hierarchy(std::uint64_t seed, const TimeGrid& coarsest,
                                               int levels) {
  if (levels < 1) throw ValidationError("brownian_hierarchy needs at least one level");
  std::vector<BrownianDriver> out;
  out.push_back(sample_brownian(seed, coarsest));
  for (int l = 1; l < levels; ++l) out.push_back(refine_brownian(out.back()));
  return out;
}

BrownianDriver rescale_driver(const BrownianDriver& driver) {
  BrownianDriver out = driver;
  out.time = TimeGrid{driver.time.steps, 1.0};
  const double s = 1.0 / std::sqrt(driver.time.horizon);
  out.increments = driver.increments * s;
  fill_path(out);
  return out;
}

std::uint64_t SampleEnsemble::seed(int index) const {
  return splitmix64(splitmix64(base_seed) + static_cast<std::uint64_t>(index) * kGamma);
}

void SampleEnsemble::validate() const {
  if (count < 1) throw ConfigurationError("ensemble count must be >= 1");
}

double ito_integrate(std::span<const double> integrand, const BrownianDriver& driver) {
  if (static_cast<int>(integrand.size()) != driver.steps())
    throw ValidationError("ito_integrate: integrand has " + std::to_string(integrand.size()) +
                          " values for " + std::to_string(driver.steps()) + " steps");
  double s = 0.0;
  for (int m = 0; m < driver.steps(); ++m) s += integrand[m] * driver.increments(m);
  return s;
}

SampleMoments sample_moments(std::span<const double> values) {
  SampleMoments out;
  if (values.empty()) return out;
  out.mean = pairwise_sum(values) / static_cast<double>(values.size());
  if (values.size() < 2) return out;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - out.mean;
    sq[i] = d * d;
  }
  out.variance = pairwise_sum(sq) / static_cast<double>(values.size() - 1);
  return out;
}

IsometryReport isometry_report(std::span<const double> kernel, const TimeGrid& time,
                               const SampleEnsemble& ensemble, int threads) {
  ensemble.validate();
  if (static_cast<int>(kernel.size()) != time.steps)
    throw ValidationError("isometry_report: kernel length must equal the step count");
  std::vector<double> samples(ensemble.count);
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    const auto d = sample_brownian(ensemble.seed(static_cast<int>(i)), time);
    samples[i] = ito_integrate(kernel, d);
  });
  const auto mom = sample_moments(samples);
  IsometryReport r;
  r.count = ensemble.count;
  r.mc_mean = mom.mean;
  r.mc_variance = mom.variance;
  double q = 0.0;
  for (double k : kernel) q += k * k;
  r.quadrature_variance = q * time.dt();
  r.ratio = r.quadrature_variance > 0 ? r.mc_variance / r.quadrature_variance : 0.0;
  r.mean_stderr = std::sqrt(mom.variance / ensemble.count);
  return r;
}

}  // namespace sheat
