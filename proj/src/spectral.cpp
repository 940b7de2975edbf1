#include "harnack/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace harnack {

namespace {

std::vector<std::complex<double>> forward(std::span<const double> samples) {
  Eigen::FFT<double> fft;
  std::vector<double> in(samples.begin(), samples.end());
  std::vector<std::complex<double>> out;
  fft.fwd(out, in);
  const double scale = 1.0 / static_cast<double>(in.size());
  for (auto& c : out) c *= scale;
  return out;
}

// Signed wavenumber of FFT slot k.
long wavenumber(std::size_t k, std::size_t n) {
  return k <= n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

}  // namespace

PeriodicSeries::PeriodicSeries(std::span<const double> samples)
    : n_(samples.size()) {
  if (n_ < 4 || n_ % 2 != 0) {
    throw std::invalid_argument("PeriodicSeries: need an even number (>= 4) of samples");
  }
  coef_ = forward(samples);
}

PeriodicSeries::Jet PeriodicSeries::jet(double theta) const {
  Jet out;
  out.f = coef_[0].real();
  const std::complex<double> step = std::polar(1.0, theta);
  std::complex<double> e = step;
  const std::size_t half = n_ / 2;
  for (std::size_t k = 1; k < half; ++k) {
    const double kk = static_cast<double>(k);
    const std::complex<double> t = coef_[k] * e;
    // 2 Re(c_k e^{ik theta}) and its derivatives.
    out.f += 2.0 * t.real();
    out.d1 += -2.0 * kk * t.imag();
    out.d2 += -2.0 * kk * kk * t.real();
    out.d3 += 2.0 * kk * kk * kk * t.imag();
    out.d4 += 2.0 * kk * kk * kk * kk * t.real();
    e *= step;
    if ((k & 63u) == 0) e = std::polar(1.0, static_cast<double>(k + 1) * theta);
  }
  // Nyquist: Re(c) cos(half*theta).
  const double kn = static_cast<double>(half);
  const double c = coef_[half].real();
  out.f += c * std::cos(kn * theta);
  out.d1 += -c * kn * std::sin(kn * theta);
  out.d2 += -c * kn * kn * std::cos(kn * theta);
  out.d3 += c * kn * kn * kn * std::sin(kn * theta);
  out.d4 += c * kn * kn * kn * kn * std::cos(kn * theta);
  return out;
}

std::vector<double> PeriodicSeries::derivative_samples(int order) const {
  std::vector<std::complex<double>> spec(coef_);
  for (std::size_t k = 0; k < n_; ++k) {
    const long w = wavenumber(k, n_);
    if (k == n_ / 2 && order % 2 == 1) {
      spec[k] = 0.0;
      continue;
    }
    std::complex<double> factor = 1.0;
    for (int i = 0; i < order; ++i) factor *= std::complex<double>(0.0, static_cast<double>(w));
    spec[k] *= factor * static_cast<double>(n_);
  }
  Eigen::FFT<double> fft;
  std::vector<double> out;
  fft.inv(out, spec);
  return out;
}

double PeriodicSeries::tail_magnitude() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < n_; ++k) {
    const long w = std::labs(wavenumber(k, n_));
    if (4 * w >= static_cast<long>(n_)) worst = std::max(worst, std::abs(coef_[k]));
  }
  return worst;
}

double PeriodicSeries::tail_derivative_bound(int order) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < n_; ++k) {
    const long w = std::labs(wavenumber(k, n_));
    if (4 * w >= static_cast<long>(n_)) sum += std::pow(std::pow(double(w), order) * std::abs(coef_[k]), 2);
  }
  return std::sqrt(sum);
}

std::vector<double> spectral_derivative(std::span<const double> samples, int order) {
  return PeriodicSeries(samples).derivative_samples(order);
}

}  // namespace harnack
