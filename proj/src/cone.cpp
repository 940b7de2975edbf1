#include "harnack/expander_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace harnack {

Gauge::Gauge(const SupportCurve& curve) : slice_(curve.samples()) {
  const std::size_t m = curve.size();
  cos_.resize(m);
  sin_.resize(m);
  h_.assign(curve.samples().begin(), curve.samples().end());
  for (std::size_t j = 0; j < m; ++j) {
    const double th = curve.angle(j);
    cos_[j] = std::cos(th);
    sin_[j] = std::sin(th);
  }
  min_h_ = *std::min_element(h_.begin(), h_.end());
  max_h_ = *std::max_element(h_.begin(), h_.end());
  if (!(min_h_ > 0.0)) throw std::invalid_argument("gauge: curve must enclose the origin (min h > 0)");
}

double Gauge::operator()(const Vec2& y) const {
  if (y.x() == 0.0 && y.y() == 0.0) return 0.0;
  const std::size_t m = h_.size();
  std::size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) {
    const double v = (y.x() * cos_[j] + y.y() * sin_[j]) / h_[j];
    if (v > best_val) {
      best_val = v;
      best = j;
    }
  }
  // Newton on g = p / h, p = <y, n(theta)>.
  const double dth = grid_angle(1, m);
  double th = grid_angle(best, m);
  for (int it = 0; it < 8; ++it) {
    const PeriodicSeries::Jet J = slice_.series().jet(th);
    const double c = std::cos(th), s = std::sin(th);
    const double p = y.x() * c + y.y() * s;
    const double p1 = -y.x() * s + y.y() * c;
    const double p2 = -p;
    const double q = p1 * J.f - p * J.d1;
    const double g1 = q / (J.f * J.f);
    const double g2 = (p2 * J.f - p * J.d2) / (J.f * J.f) - 2.0 * J.d1 * q / (J.f * J.f * J.f);
    if (!(g2 < 0.0)) break;
    const double step = std::clamp(-g1 / g2, -dth, dth);
    th += step;
    if (std::abs(step) < 1e-14) break;
  }
  const double refined = (y.x() * std::cos(th) + y.y() * std::sin(th)) / slice_.series().value(th);
  return std::max({best_val, refined, 0.0});
}

double gauge_function(const SupportCurve& curve, const Vec2& y) { return Gauge(curve)(y); }

double default_box(const SupportCurve& curve) {
  const auto h = curve.samples();
  return 6.0 * *std::max_element(h.begin(), h.end());
}

GridField build_cone(const SupportCurve& curve, double N, double L, std::size_t resolution) {
  if (!(N >= 1.0)) throw std::invalid_argument("build_cone: N must be at least 1");
  const Gauge mu(curve);
  GridField f(L, resolution, BoundaryKind::dirichlet_cone, N);
  if (f.spacing() > 0.5 * mu.min_support()) {
    throw std::invalid_argument("build_cone: grid spacing exceeds min h / 2");
  }
  for (std::size_t j = 0; j < resolution; ++j)
    for (std::size_t i = 0; i < resolution; ++i) f.at(i, j) = N * mu(Vec2(f.coord(i), f.coord(j)));
  return f;
}

double cone_straightness_defect(const GridField& f, std::size_t apex_cells) {
  const std::size_t n = f.resolution();
  const double dx = f.spacing();
  const double c = 0.5 * double(n - 1);
  double worst = 0.0;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (std::hypot(double(i) - c, double(j) - c) <= double(apex_cells)) continue;
      const double fx = (f.at(i + 1, j) - f.at(i - 1, j)) / (2 * dx);
      const double fy = (f.at(i, j + 1) - f.at(i, j - 1)) / (2 * dx);
      const double x = f.coord(i), y = f.coord(j);
      // nu = (-Df, 1) / W, z = (y, f).
      const double zn = (f.at(i, j) - x * fx - y * fy) / std::sqrt(1 + fx * fx + fy * fy);
      worst = std::max(worst, std::abs(zn));
    }
  }
  return worst;
}

double sphere_barrier(const SupportCurve& curve) {
  const Gauge mu(curve);
  constexpr std::size_t kDirections = 1024;
  constexpr std::size_t kRadii = 400;
  std::vector<double> slope(kDirections);
  for (std::size_t k = 0; k < kDirections; ++k) {
    const double th = grid_angle(k, kDirections);
    slope[k] = mu(Vec2(std::cos(th), std::sin(th)));
  }
  // Does the ball of radius rho about (0, 1) meet {z <= mu(y)}?
  auto meets = [&](double rho) {
    for (double m : slope) {
      for (std::size_t i = 0; i <= kRadii; ++i) {
        const double s = rho * double(i) / double(kRadii);
        if (s * m + std::sqrt(std::max(0.0, rho * rho - s * s)) >= 1.0) return true;
      }
    }
    return false;
  };
  double lo = 0.0, hi = 1.0;  // the origin lies under the cone
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (meets(mid) ? hi : lo) = mid;
  }
  return 0.5 * lo;
}

GridField squash(const GridField& field, double N) {
  if (!(N >= 1.0)) throw std::invalid_argument("squash: N must be at least 1");
  GridField out = field;
  for (double& v : out.values()) v /= N;
  return out;
}

}  // namespace harnack
