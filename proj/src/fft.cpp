#include "sheat/fft.hpp"

#include "sheat/error.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numbers>
#include <tuple>
#include <vector>

namespace sheat {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

// Plans live for the whole process; FFTW planning is not thread-safe,
// execution with the new-array API is.
const PlanPair& plans_for(int t, int n) {
  static std::map<std::pair<int, int>, PlanPair> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find({t, n});
  if (it != cache.end()) return it->second;

  const std::size_t real_size = static_cast<std::size_t>(t) * n * n;
  const std::size_t complex_size = static_cast<std::size_t>(t) * n * (n / 2 + 1);
  std::vector<double> r(real_size);
  std::vector<std::complex<double>> c(complex_size);
  auto* cp = reinterpret_cast<fftw_complex*>(c.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  if (t == 1) {
    p.forward = fftw_plan_dft_r2c_2d(n, n, r.data(), cp, flags);
    p.inverse = fftw_plan_dft_c2r_2d(n, n, cp, r.data(), flags);
  } else {
    p.forward = fftw_plan_dft_r2c_3d(t, n, n, r.data(), cp, flags);
    p.inverse = fftw_plan_dft_c2r_3d(t, n, n, cp, r.data(), flags);
  }
  if (!p.forward || !p.inverse) throw NumericalError("FFTW planning failed");
  return cache.emplace(std::make_pair(t, n), p).first->second;
}

double wrapped(int index, int n) { return index <= n / 2 ? index : index - n; }

}  // namespace

FourierGrid::FourierGrid(const SpaceGrid& grid)
    : n_(grid.points), half_width_(grid.half_width) {
  grid.validate();
  const double unit = std::numbers::pi / half_width_;
  xi2_.resize(rows(), n_);
  for (int c = 0; c < n_; ++c) {
    const double ky = unit * wrapped(c, n_);
    for (int r = 0; r < rows(); ++r) {
      const double kx = unit * r;
      xi2_(r, c) = kx * kx + ky * ky;
    }
  }
  xi_ = xi2_.sqrt();
}

double FourierGrid::xi_component(int axis, int row, int col) const {
  const double unit = std::numbers::pi / half_width_;
  return axis == 0 ? unit * row : unit * wrapped(col, n_);
}

Spectrum FourierGrid::forward(const Grid2d& values) const {
  if (values.rows() != n_ || values.cols() != n_)
    throw ValidationError("FourierGrid::forward: shape mismatch");
  const auto& p = plans_for(1, n_);
  Spectrum out(rows(), n_);
  // FFTW reads the input; the r2c execute does not modify it.
  fftw_execute_dft_r2c(p.forward, const_cast<double*>(values.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

Grid2d FourierGrid::inverse(const Spectrum& spectrum) const {
  if (spectrum.rows() != rows() || spectrum.cols() != n_)
    throw ValidationError("FourierGrid::inverse: shape mismatch");
  const auto& p = plans_for(1, n_);
  Spectrum scratch = spectrum;
  Grid2d out(n_, n_);
  fftw_execute_dft_c2r(p.inverse, reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.data());
  out /= static_cast<double>(n_) * n_;
  return out;
}

Grid2d FourierGrid::apply_symbol(const Grid2d& values, const Grid2d& symbol) const {
  Spectrum s = forward(values);
  s *= symbol.cast<std::complex<double>>();
  return inverse(s);
}

std::shared_ptr<const FourierGrid> fourier_grid(const SpaceGrid& grid) {
  static std::mutex m;
  static std::map<std::pair<int, double>, std::shared_ptr<const FourierGrid>> cache;
  std::lock_guard lock(m);
  auto key = std::make_pair(grid.points, grid.half_width);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto fg = std::make_shared<const FourierGrid>(grid);
  cache.emplace(key, fg);
  return fg;
}

SpaceTimeFourier::SpaceTimeFourier(int time_points, int space_points)
    : t_(time_points), n_(space_points) {
  if (t_ < 2 || n_ < 2) throw ValidationError("SpaceTimeFourier: dimensions too small");
}

void SpaceTimeFourier::forward(const double* in, std::complex<double>* out) const {
  const auto& p = plans_for(t_, n_);
  fftw_execute_dft_r2c(p.forward, const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void SpaceTimeFourier::inverse(std::complex<double>* in, double* out) const {
  const auto& p = plans_for(t_, n_);
  fftw_execute_dft_c2r(p.inverse, reinterpret_cast<fftw_complex*>(in), out);
}

}  // namespace sheat
