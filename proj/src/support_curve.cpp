#include "harnack/support_curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace harnack {

namespace {

bool is_power_of_two(std::size_t m) { return m != 0 && (m & (m - 1)) == 0; }

}  // namespace

std::vector<double> radius_of_curvature(std::span<const double> h) {
  std::vector<double> r = spectral_derivative(h, 2);
  for (std::size_t j = 0; j < r.size(); ++j) r[j] += h[j];
  return r;
}

SupportCurve SupportCurve::from_samples(std::vector<double> h) {
  const std::size_t m = h.size();
  if (m < 64 || !is_power_of_two(m)) {
    throw std::invalid_argument("SupportCurve: sample count must be a power of two >= 64, got " +
                                std::to_string(m));
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!std::isfinite(h[j])) {
      throw InvalidCurveError("SupportCurve: non-finite support value", grid_angle(j, m));
    }
    if (!(h[j] > 0.0)) {
      std::ostringstream msg;
      msg << "SupportCurve: support value " << h[j] << " <= 0 at theta = " << grid_angle(j, m)
          << " (curve must enclose the origin)";
      throw InvalidCurveError(msg.str(), grid_angle(j, m));
    }
  }
  const std::vector<double> r = radius_of_curvature(h);
  const auto worst = std::min_element(r.begin(), r.end());
  if (!(*worst > 0.0)) {
    const std::size_t j = static_cast<std::size_t>(worst - r.begin());
    std::ostringstream msg;
    msg << "SupportCurve: not strictly convex, h'' + h = " << *worst << " at theta = "
        << grid_angle(j, m);
    throw InvalidCurveError(msg.str(), grid_angle(j, m));
  }
  return SupportCurve(std::move(h));
}

std::vector<double> preset_samples(const CurvePreset& preset, std::size_t m) {
  return std::visit([m](const auto& p) -> std::vector<double> {
    using T = std::decay_t<decltype(p)>;
    if constexpr (std::is_same_v<T, GenericPreset>) {
      return p.samples;
    } else {
      std::vector<double> h(m);
      for (std::size_t j = 0; j < m; ++j) {
        const double th = grid_angle(j, m);
        if constexpr (std::is_same_v<T, CirclePreset>) {
          h[j] = p.radius;
        } else {
          const double c = std::cos(th);
          const double s = std::sin(th);
          h[j] = std::sqrt(p.a * p.a * c * c + p.b * p.b * s * s);
        }
      }
      return h;
    }
  }, preset);
}

SupportCurve make_curve(const CurvePreset& preset, std::size_t m) {
  std::visit([](const auto& p) {
    using T = std::decay_t<decltype(p)>;
    if constexpr (std::is_same_v<T, CirclePreset>) {
      if (!(p.radius > 0.0)) throw std::invalid_argument("circle: radius must be positive");
    } else if constexpr (std::is_same_v<T, EllipsePreset>) {
      if (!(p.a > 0.0) || !(p.b > 0.0)) throw std::invalid_argument("ellipse: semi-axes must be positive");
    }
  }, preset);
  return SupportCurve::from_samples(preset_samples(preset, m));
}

std::string describe(const CurvePreset& preset) {
  return std::visit([](const auto& p) -> std::string {
    using T = std::decay_t<decltype(p)>;
    std::ostringstream out;
    if constexpr (std::is_same_v<T, CirclePreset>) {
      out << "circle(" << p.radius << ")";
    } else if constexpr (std::is_same_v<T, EllipsePreset>) {
      out << "ellipse(" << p.a << "," << p.b << ")";
    } else {
      out << "generic(" << p.samples.size() << " samples)";
    }
    return out.str();
  }, preset);
}

CurveSlice::CurveSlice(std::span<const double> h) : h_(h.begin(), h.end()), series_(h) {}

CurvePoint CurveSlice::point(double theta) const {
  const PeriodicSeries::Jet j = series_.jet(theta);
  CurvePoint p;
  p.theta = theta;
  p.h = j.f;
  p.h_theta = j.d1;
  p.r = j.d2 + j.f;
  p.r_theta = j.d3 + j.d1;
  p.r_thetatheta = j.d4 + j.d2;
  p.kappa = 1.0 / p.r;
  p.kappa_theta = -p.r_theta / (p.r * p.r);
  p.kappa_thetatheta = -p.r_thetatheta / (p.r * p.r) + 2.0 * p.r_theta * p.r_theta / (p.r * p.r * p.r);
  p.kappa_s = p.kappa * p.kappa_theta;
  p.kappa_ss = p.kappa * (p.kappa_theta * p.kappa_theta + p.kappa * p.kappa_thetatheta);
  p.normal = Vec2(std::cos(theta), std::sin(theta));
  p.tangent = Vec2(-std::sin(theta), std::cos(theta));
  p.position = p.h * p.normal + p.h_theta * p.tangent;
  return p;
}

std::vector<double> CurveSlice::radius_samples() const { return radius_of_curvature(h_); }

std::vector<double> CurveSlice::kappa_samples() const {
  std::vector<double> k = radius_samples();
  for (double& v : k) v = 1.0 / v;
  return k;
}

void CurveSlice::kappa_derivatives(std::vector<double>& kappa, std::vector<double>& kappa_theta,
                                   std::vector<double>& kappa_thetatheta) const {
  kappa = kappa_samples();
  const PeriodicSeries ks(kappa);
  kappa_theta = ks.derivative_samples(1);
  kappa_thetatheta = ks.derivative_samples(2);
}

double CurveSlice::area() const {
  const std::vector<double> ht = series_.derivative_samples(1);
  double sum = 0.0;
  for (std::size_t j = 0; j < h_.size(); ++j) sum += h_[j] * h_[j] - ht[j] * ht[j];
  return 0.5 * sum * 2.0 * std::numbers::pi / static_cast<double>(h_.size());
}

double CurveSlice::length() const { return 2.0 * std::numbers::pi * series_.mean(); }

double CurveSlice::min_radius() const {
  const std::vector<double> r = radius_samples();
  return *std::min_element(r.begin(), r.end());
}

double CurveSlice::min_support() const { return *std::min_element(h_.begin(), h_.end()); }
double CurveSlice::max_support() const { return *std::max_element(h_.begin(), h_.end()); }

std::vector<Vec2> CurveSlice::polygon() const {
  const std::vector<double> ht = series_.derivative_samples(1);
  std::vector<Vec2> pts(h_.size());
  for (std::size_t j = 0; j < h_.size(); ++j) {
    const double th = grid_angle(j, h_.size());
    const Vec2 n(std::cos(th), std::sin(th));
    const Vec2 tau(-std::sin(th), std::cos(th));
    pts[j] = h_[j] * n + ht[j] * tau;
  }
  return pts;
}

double CurveSlice::support_excess(const Vec2& y, double scale) const {
  return support_excess_argmax(y, scale).first;
}

std::pair<double, double> CurveSlice::support_excess_argmax(const Vec2& y, double scale) const {
  const std::size_t m = h_.size();
  std::size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) {
    const double th = grid_angle(j, m);
    const double v = y.x() * std::cos(th) + y.y() * std::sin(th) - scale * h_[j];
    if (v > best_val) {
      best_val = v;
      best = j;
    }
  }
  // Newton on g(theta) = <y, n(theta)> - scale h(theta) from the best node.
  double th = grid_angle(best, m);
  const double dth = grid_angle(1, m);
  for (int it = 0; it < 6; ++it) {
    const PeriodicSeries::Jet j = series_.jet(th);
    const double c = std::cos(th), s = std::sin(th);
    const double g1 = -y.x() * s + y.y() * c - scale * j.d1;
    const double g2 = -y.x() * c - y.y() * s - scale * j.d2;
    if (!(g2 < 0.0)) break;
    const double step = std::clamp(-g1 / g2, -dth, dth);
    th += step;
    if (std::abs(step) < 1e-14) break;
  }
  const double refined = y.x() * std::cos(th) + y.y() * std::sin(th) - scale * series_.value(th);
  if (refined >= best_val) return {refined, th};
  return {best_val, grid_angle(best, m)};
}

}  // namespace harnack
