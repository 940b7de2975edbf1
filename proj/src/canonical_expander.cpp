#include "harnack/expander_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace harnack {

SpaceTimeSurface::SpaceTimeSurface(const FlowHistory& history, double N) : history_(&history), N_(N) {
  if (!(N >= 1.0)) throw std::invalid_argument("SpaceTimeSurface: N must be at least 1");
}

Vec3 SpaceTimeSurface::operator()(double theta, double t) const {
  if (!(t > 0.0)) throw std::invalid_argument("SpaceTimeSurface: t must be positive");
  const Vec2 x = history_->slice(t).point(theta).position;
  const double s = 1.0 / std::sqrt(t);
  return Vec3(s * x.x(), s * x.y(), s * N_);
}

ParametricSurface SpaceTimeSurface::parametric() const {
  const SpaceTimeSurface self = *this;
  ParametricSurface p;
  p.map = [self](double theta, double t) { return self(theta, t); };
  p.steps = [](double, double t) { return std::array<double, 2>{1e-3, 1e-3 * t}; };
  p.inside = InsideHint::direction(Vec3::UnitZ());
  return p;
}

CanonicalCheck canonical_expander_check(const FlowHistory& history, double N, double theta, double t,
                                        double v) {
  const HarnackGeometry g = geometry_at(history, theta, t);
  const HarnackSample z = harnack_Z(g, v);
  const SpaceTimeSurface gamma(history, N);
  const ParametricSurface surf = gamma.parametric();
  const SurfaceCurvature k = surface_curvature(surf, theta, t);
  const double kappa_theta = g.kappa_s / g.kappa;
  const Eigen::Vector2d w(g.kappa * (v + kappa_theta), 1.0);

  CanonicalCheck out;
  out.theta = theta;
  out.t = t;
  out.v = v;
  out.sff_value = w.dot(k.sff * w);
  out.Z_value = z.Z;
  out.sigma_estimate = z.Z / (std::sqrt(t) * out.sff_value);
  out.residual_E = k.mean_curvature - 0.5 * k.point.dot(k.normal);
  return out;
}

SigmaFit fit_sigma(const FlowHistory& history, double N, std::size_t n_theta, std::size_t n_t, std::size_t n_v,
                   double t_lo, double t_hi, double v_max) {
  SigmaFit fit;
  fit.N = N;
  std::vector<double> ratios;
  for (std::size_t jt = 0; jt < n_t; ++jt) {
    const double t = n_t > 1 ? t_lo + (t_hi - t_lo) * double(jt) / double(n_t - 1) : t_lo;
    for (std::size_t jth = 0; jth < n_theta; ++jth) {
      const double theta = 2.0 * std::numbers::pi * double(jth) / double(n_theta);
      for (std::size_t jv = 0; jv < n_v; ++jv) {
        const double v = n_v > 1 ? -v_max + 2.0 * v_max * double(jv) / double(n_v - 1) : 0.0;
        const CanonicalCheck c = canonical_expander_check(history, N, theta, t, v);
        ratios.push_back(c.sigma_estimate);
        fit.max_residual = std::max(fit.max_residual, std::abs(c.residual_E));
      }
    }
  }
  fit.samples = ratios.size();
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  fit.sigma = sorted[sorted.size() / 2];
  fit.spread = (sorted.back() - sorted.front()) / fit.sigma;
  return fit;
}

}  // namespace harnack
