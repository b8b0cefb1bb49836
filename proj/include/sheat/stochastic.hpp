#pragma once

#include "sheat/fields.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace sheat {

/// One Brownian path on a uniform time grid. increments(m-1) = w(t_m) - w(t_{m-1}).
struct BrownianDriver {
  std::uint64_t seed = 0;
  TimeGrid time;
  Eigen::VectorXd increments;  // size M
  Eigen::VectorXd path;        // size M+1, path(0) = 0

  int steps() const { return time.steps; }
};

/// Deterministic in (seed, time): i.i.d. N(0, dt) increments from mt19937_64.
BrownianDriver sample_brownian(std::uint64_t seed, const TimeGrid& time);

/// Halves the step by Brownian-bridge midpoints. The refined path agrees with
/// the coarse one at every coarse node.
BrownianDriver refine_brownian(const BrownianDriver& coarse);

/// Coarsest draw plus `levels - 1` successive bridge refinements.
std::vector<BrownianDriver> brownian_hierarchy(std::uint64_t seed, const TimeGrid& coarsest,
                                               int levels);

/// Rescaled driver on (0, 1) with increments T^{-1/2} dw, on M steps.
BrownianDriver rescale_driver(const BrownianDriver& driver);

/// Monte Carlo ensemble: sub-seed(i) = splitmix64(splitmix64(base) + i * gamma).
struct SampleEnsemble {
  std::uint64_t base_seed = 0;
  int count = 0;

  std::uint64_t seed(int index) const;
  void validate() const;
};

/// Left-endpoint sum sum_m a_m dw_{m+1}; integrand has one value per step.
double ito_integrate(std::span<const double> integrand, const BrownianDriver& driver);

struct IsometryReport {
  double mc_mean = 0.0;
  double mc_variance = 0.0;
  double quadrature_variance = 0.0;
  double ratio = 0.0;
  double mean_stderr = 0.0;
  int count = 0;
};

/// Compares the sample variance of int K dw with sum K_m^2 dt.
IsometryReport isometry_report(std::span<const double> kernel, const TimeGrid& time,
                               const SampleEnsemble& ensemble, int threads = 1);

/// Sample mean and unbiased variance with pairwise summation in index order.
struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;
};
SampleMoments sample_moments(std::span<const double> values);

}  // namespace sheat
