#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace sheat {

/// |x|^p with an exact fast path for p = 2.
inline double pow_abs(double x, double p) {
  if (p == 2.0) return x * x;
  if (p == 1.0) return std::abs(x);
  return std::pow(std::abs(x), p);
}

template <typename Derived>
auto pow_abs(const Eigen::ArrayBase<Derived>& x, double p) {
  using Plain = typename Derived::PlainObject;
  if (p == 2.0) return Plain(x.square());
  if (p == 1.0) return Plain(x.abs());
  return Plain(x.abs().pow(p));
}

/// Pairwise (cascade) summation in index order; independent of threading.
double pairwise_sum(std::span<const double> values);

/// Trapezoid weights for M+1 uniform nodes with spacing dt.
Eigen::ArrayXd trapezoid_weights(int nodes, double dt);

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index is
/// visited once; callers store results by index and reduce afterwards.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn);

/// Least-squares slope of log(err) against log(h).
double observed_order(std::span<const double> spacing, std::span<const double> error);

}  // namespace sheat
