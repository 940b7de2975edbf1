#pragma once

#include "harnack/grid_field.hpp"
#include "harnack/support_curve.hpp"

#include <Eigen/Core>
#include "json.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace harnack {

using Vec3 = Eigen::Vector3d;

enum class ConvexityKind { curve, grid_field, surface };
std::string to_string(ConvexityKind kind);

/// Verdict of one convexity scan. For grid fields the midpoint tier is
/// reported next to the Hessian tier; margins of both tiers are in units of
/// second derivatives.
struct ConvexityReport {
  ConvexityKind kind = ConvexityKind::curve;
  double min_margin = 0.0;
  std::vector<double> witness;
  double tolerance_budget = 0.0;
  bool passed = false;
  std::size_t points_checked = 0;

  bool has_midpoint = false;
  double midpoint_min_margin = 0.0;
  std::vector<double> midpoint_witness;  // p.x, p.y, q.x, q.y
  double midpoint_budget = 0.0;
  std::size_t pairs = 0;
  std::uint64_t seed = 0;
  bool hessian_passed = false;
  bool midpoint_passed = false;

  double slack() const { return min_margin + tolerance_budget; }
};

void to_json(nlohmann::json& j, const ConvexityReport& r);

/// min over the grid of h'' + h; passes iff strictly positive.
ConvexityReport curve_convexity(const SupportCurve& curve);
ConvexityReport curve_convexity(std::span<const double> h);

struct GridConvexityOptions {
  std::size_t boundary_band = 2;
  /// Cells around the origin left out of the Hessian tier; 0 keeps them.
  std::size_t apex_cells = 3;
  std::size_t pairs = 10000;
  std::uint64_t seed = 20240601;
  /// Nonzero entries mark points the Hessian tier may use (all stencil
  /// points must be marked). Empty means every point.
  std::vector<std::uint8_t> mask;
};

ConvexityReport grid_convexity(const GridField& field, const GridConvexityOptions& options = {});

/// Which side of a surface is the convex one: a fixed direction or a point.
struct InsideHint {
  Vec3 vector = Vec3::UnitZ();
  bool is_point = false;
  static InsideHint direction(const Vec3& d) { return {d, false}; }
  static InsideHint point(const Vec3& p) { return {p, true}; }
};

struct ParametricSurface {
  std::function<Vec3(double, double)> map;
  /// Finite-difference steps in (a, b) at a parameter point.
  std::function<std::array<double, 2>(double, double)> steps;
  InsideHint inside;
};

/// Surface with constant finite-difference steps.
ParametricSurface make_surface(std::function<Vec3(double, double)> map, double step_a,
                               double step_b, InsideHint inside);
/// Graph of a grid field; evaluate only at grid nodes at least one cell
/// from the edge, where the stencil hits nodes exactly.
ParametricSurface graph_surface(const GridField& field);

struct SurfaceCurvature {
  Eigen::Matrix2d metric;  // first fundamental form
  Eigen::Matrix2d sff;     // <Phi_ij, nu>, nu toward the convex side
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::Zero();
  double mean_curvature = 0.0;  // trace of the shape operator
  double k_min = 0.0;
  double k_max = 0.0;
};

/// Throws DegenerateMetricError when det g < 1e-12.
SurfaceCurvature surface_curvature(const ParametricSurface& surface, double a, double b);
SurfaceCurvature surface_curvature(const ParametricSurface& surface, double a, double b,
                                   double step_a, double step_b);

/// h(W, W) for W = c_a Phi_a + c_b Phi_b.
double surface_sff(const ParametricSurface& surface, double a, double b, double c_a, double c_b);

/// Smallest principal curvature over the lattice; budget from step halving.
ConvexityReport surface_convexity(const ParametricSurface& surface,
                                  std::span<const std::array<double, 2>> lattice);

}  // namespace harnack
