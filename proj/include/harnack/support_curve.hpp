#pragma once

#include "harnack/spectral.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace harnack {

using Vec2 = Eigen::Vector2d;

/// Rejected support samples, with the normal angle where the defect sits.
class InvalidCurveError : public std::invalid_argument {
 public:
  InvalidCurveError(const std::string& what, double angle)
      : std::invalid_argument(what), angle_(angle) {}
  double angle() const noexcept { return angle_; }

 private:
  double angle_;
};

/// Strictly convex closed plane curve given by its support function h on
/// the uniform normal-angle grid theta_j = 2 pi j / M. Outward normal
/// n = (cos, sin), tangent tau = (-sin, cos), radius of curvature
/// r = h'' + h > 0, curvature kappa = 1 / r.
class SupportCurve {
 public:
  /// Validates: M a power of two >= 64, h > 0, r > 0 everywhere.
  static SupportCurve from_samples(std::vector<double> h);

  std::size_t size() const noexcept { return h_.size(); }
  std::span<const double> samples() const noexcept { return h_; }
  double angle(std::size_t j) const { return grid_angle(j, h_.size()); }

 private:
  explicit SupportCurve(std::vector<double> h) : h_(std::move(h)) {}
  std::vector<double> h_;
};

struct CirclePreset {
  double radius = 1.0;
};
struct EllipsePreset {
  double a = 2.0;
  double b = 1.0;
};
struct GenericPreset {
  std::vector<double> samples;
};
using CurvePreset = std::variant<CirclePreset, EllipsePreset, GenericPreset>;

constexpr std::size_t kDefaultCurveSamples = 256;

/// Support samples of a preset, without any validation.
std::vector<double> preset_samples(const CurvePreset& preset, std::size_t m = kDefaultCurveSamples);
SupportCurve make_curve(const CurvePreset& preset, std::size_t m = kDefaultCurveSamples);
std::string describe(const CurvePreset& preset);

/// Radius of curvature h'' + h on the grid (spectral differentiation).
std::vector<double> radius_of_curvature(std::span<const double> h);

/// Local geometry of a support curve at a normal angle.
struct CurvePoint {
  double theta = 0.0;
  double h = 0.0;
  double h_theta = 0.0;
  double r = 0.0;
  double r_theta = 0.0;
  double r_thetatheta = 0.0;
  double kappa = 0.0;
  double kappa_theta = 0.0;
  double kappa_thetatheta = 0.0;
  double kappa_s = 0.0;   // arclength derivatives, d/ds = kappa d/dtheta
  double kappa_ss = 0.0;
  Vec2 position = Vec2::Zero();
  Vec2 normal = Vec2::Zero();
  Vec2 tangent = Vec2::Zero();
};

/// Spectral view of one support function: evaluation anywhere in theta.
class CurveSlice {
 public:
  explicit CurveSlice(std::span<const double> h);

  CurvePoint point(double theta) const;
  std::size_t size() const noexcept { return h_.size(); }
  std::span<const double> samples() const noexcept { return h_; }

  std::vector<double> radius_samples() const;
  std::vector<double> kappa_samples() const;
  /// Curvature of the support interpolant kappa(theta) on the grid together
  /// with d/dtheta and d2/dtheta2 (spectral in kappa).
  void kappa_derivatives(std::vector<double>& kappa, std::vector<double>& kappa_theta,
                         std::vector<double>& kappa_thetatheta) const;

  double area() const;
  double length() const;
  double min_radius() const;
  double max_kappa() const { return 1.0 / min_radius(); }
  double min_support() const;
  double max_support() const;
  /// Boundary points x(theta_j) on the grid.
  std::vector<Vec2> polygon() const;

  /// Max over the grid of <y, n> - scale * h, refined to a local maximum.
  double support_excess(const Vec2& y, double scale) const;
  /// Same maximum together with the maximizing angle.
  std::pair<double, double> support_excess_argmax(const Vec2& y, double scale) const;
  const PeriodicSeries& series() const noexcept { return series_; }

 private:
  std::vector<double> h_;
  PeriodicSeries series_;
};

}  // namespace harnack
