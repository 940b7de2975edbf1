#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace harnack {

/// Trigonometric interpolant of samples f(2*pi*j/M), j = 0..M-1.
///
/// The Nyquist mode is split symmetrically, so the interpolant is real and
/// its odd derivatives at the grid nodes drop that mode.
class PeriodicSeries {
 public:
  PeriodicSeries() = default;
  explicit PeriodicSeries(std::span<const double> samples);

  std::size_t size() const noexcept { return n_; }

  struct Jet {
    double f = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
    double d4 = 0.0;
  };

  /// Value and first four derivatives at an arbitrary angle.
  Jet jet(double theta) const;
  double value(double theta) const { return jet(theta).f; }

  /// Derivative of the given order sampled back on the grid.
  std::vector<double> derivative_samples(int order) const;

  /// Largest coefficient magnitude over the upper quarter of the spectrum,
  /// a proxy for the interpolation error.
  double tail_magnitude() const;
  /// Root-sum-square of |k|^order |c_k| over the same upper quarter: size of
  /// the order-th derivative carried by unresolved (roundoff) modes.
  double tail_derivative_bound(int order) const;

  /// Mean value (zeroth coefficient).
  double mean() const { return coef_.empty() ? 0.0 : coef_[0].real(); }

 private:
  std::size_t n_ = 0;
  std::vector<std::complex<double>> coef_;  // FFT order, divided by n
};

/// Spectral derivative of periodic samples.
std::vector<double> spectral_derivative(std::span<const double> samples, int order);

inline double grid_angle(std::size_t j, std::size_t m) {
  return 2.0 * 3.14159265358979323846 * static_cast<double>(j) / static_cast<double>(m);
}

}  // namespace harnack
