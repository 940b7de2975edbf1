#pragma once

#include "harnack/convexity.hpp"
#include "harnack/csf_flow.hpp"
#include "harnack/grid_field.hpp"
#include "harnack/support_curve.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace harnack {

// ---------------------------------------------------------------- cones

/// Minkowski gauge of the region enclosed by a curve: mu(y) = max over theta
/// of <y, n> / h, refined off the grid. mu = 1 exactly on the curve.
class Gauge {
 public:
  explicit Gauge(const SupportCurve& curve);
  double operator()(const Vec2& y) const;
  double min_support() const noexcept { return min_h_; }
  double max_support() const noexcept { return max_h_; }

 private:
  CurveSlice slice_;
  std::vector<double> cos_, sin_, h_;
  double min_h_ = 0.0;
  double max_h_ = 0.0;
};

double gauge_function(const SupportCurve& curve, const Vec2& y);

/// Default box half-width: six times the circumradius max h.
double default_box(const SupportCurve& curve);
constexpr std::size_t kDefaultResolution = 201;

/// f_N = N mu on the grid. Rejects grids with spacing above min h / 2.
GridField build_cone(const SupportCurve& curve, double N, double L,
                     std::size_t resolution = kDefaultResolution);

/// max |<z, nu>| over grid points at least `apex_cells` from the origin,
/// z = (y, f(y)); zero for an exact cone.
double cone_straightness_defect(const GridField& cone, std::size_t apex_cells = 3);

/// Half the distance from (0, 1) to the region under the cone over the
/// curve, by bisection on the radius with a sampled intersection test.
double sphere_barrier(const SupportCurve& curve);

// ---------------------------------------------------------------- flows

struct GraphFlowOptions {
  /// Pseudo-time step; 0 picks 0.2 dx^2.
  double ds = 0.0;
  /// Floor added to eps^2 + |DV|^2 when eps = 0.
  double degenerate_floor = 1e-8;
  /// For linear_extension: ghost nodes extrapolate V - reference linearly
  /// instead of V itself. Usually the initial cone.
  std::function<double(double, double)> reference;
};

/// V_s = Delta V - D2V(DV, DV) / (eps^2 + |DV|^2), eps = N_inv, which is
/// the squashed graphical flow; eps = 0 is the level-set equation. The
/// boundary follows field.boundary(): held fixed, or ghost nodes by linear
/// extrapolation with the equation solved on the edge. Explicit in s.
GridField graphical_flow(const GridField& field, double N_inv, double s_end,
                         const GraphFlowOptions& options = {});

/// Same flow, returning copies at each requested time (ascending).
std::vector<GridField> graphical_flow_snapshots(const GridField& field, double N_inv,
                                                const std::vector<double>& times,
                                                const GraphFlowOptions& options = {});

/// sup over the sub-box of |V(x, s) - sqrt(s) V(x / sqrt(s), 1)|.
double self_similarity_defect(const GridField& at_s, double s, const GridField& at_one,
                              double sub_box);

struct ExpanderValidation {
  double lipschitz_cone = 0.0;
  double lipschitz_expander = 0.0;
  double lipschitz_tolerance = 0.0;
  bool lipschitz_ok = false;
  double min_value = 0.0;
  double d = 0.0;
  double min_bound = 0.0;  // sqrt(2 (n + 1)) N / d, n = 1
  bool min_ok = false;
  double boundary_gap = 0.0;  // max |v - f| on the box edge
  double interior_gap = 0.0;  // |v - f| at the apex
  bool asymptotics_ok = false;
};

struct ExpanderResult {
  GridField cone;
  GridField expander;
  ExpanderValidation validation;
};

/// Self-expander over the cone C_N: the s = 1 slice of the graphical flow
/// started at the cone (squashed variables, eps = 1 / N), scaled back by N.
ExpanderResult compute_expander(const SupportCurve& curve, double N, double L,
                                std::size_t resolution = kDefaultResolution,
                                BoundaryKind boundary = BoundaryKind::linear_extension,
                                const GraphFlowOptions& options = {});

/// Pointwise division of heights by N.
GridField squash(const GridField& field, double N);

// ---------------------------------------------------------------- radial

struct RadialOptions {
  double r0 = 1e-3;       // series start
  double dr = 1e-3;       // sample spacing
  double tolerance = 1e-8;  // on the matched far-field slope
  double ode_tolerance = 1e-12;
};

/// Rotationally symmetric self-expanding graph u(r) over the cone of slope
/// N: u''/(1 + u'^2) + u'/r - (u - r u')/2 = 0, u(0) = a, u'(0) = 0.
struct RadialProfile {
  double N = 0.0;
  double a = 0.0;
  double r_shoot = 0.0;
  double slope_mismatch = 0.0;
  int iterations = 0;
  std::vector<double> r;
  std::vector<double> u;
  std::vector<double> u_r;

  double operator()(double radius) const;
  /// H - <x, nu>/2 from the samples (central differences, spacing dr).
  double residual(double radius) const;
  double max_residual(double r_lo, double r_hi) const;
  double r_max() const { return r.back(); }
};

/// Shooting on a by bisection until the slope at max(R_max, 25) matches
/// the cone asymptotics N - N/r^2 - 3 c3/r^4. Throws std::runtime_error
/// naming the bracket if it cannot be found.
RadialProfile radial_expander(double N, double R_max, const RadialOptions& options = {});

/// Grid field sampled from a radial profile.
GridField radial_field(const RadialProfile& profile, double L, std::size_t resolution);

// ------------------------------------------------------ space-time track

enum class TrackFlag : std::uint8_t { covered = 0, interior = 1, exterior = 2 };

struct SpaceTimeTrack {
  GridField field;
  std::vector<std::uint8_t> flags;  // TrackFlag per node
  double alpha_min = 0.0;           // t_end^{-1/2}
  double alpha_max = 0.0;
  std::size_t interior = 0;
  std::size_t exterior = 0;

  /// Nonzero where the value is a genuine track height.
  std::vector<std::uint8_t> covered_mask() const;
};

/// v_inf(y) = alpha with y on alpha M_{alpha^-2}. Nodes inside the smallest
/// covered level set get alpha_min; nodes outside the largest get the
/// conical value mu(y). Both are flagged.
SpaceTimeTrack spacetime_track(const FlowHistory& history, double L,
                               std::size_t resolution = kDefaultResolution);

using Polyline = std::vector<Vec2>;

/// Level set of a grid field by marching squares, as unordered segments
/// flattened into pairs of points.
Polyline contour_segments(const GridField& field, double level);

/// Symmetric Hausdorff distance between a segment soup and a closed polygon.
double hausdorff_distance(const Polyline& segments, const Polyline& closed_curve);

/// alpha M_{alpha^-2} as a closed polygon.
Polyline scaled_level_curve(const FlowHistory& history, double alpha);

struct LevelSetCheck {
  double alpha = 0.0;
  double hausdorff = 0.0;
  double hausdorff_expander = 0.0;  // same for v at the largest N
};

struct LimitComparison {
  std::vector<double> N;
  std::vector<double> sup_distance;
  double grid_tolerance = 0.0;  // dx
  double sub_box = 0.0;
  bool decreasing = false;
  bool final_small = false;
  std::vector<LevelSetCheck> level_sets;
  double max_hausdorff = 0.0;
  bool level_sets_ok = false;
  SpaceTimeTrack track;
  GridField last_squashed;
};

LimitComparison limit_comparison(const SupportCurve& curve, const FlowHistory& history,
                                 const std::vector<double>& N_sequence, double L,
                                 std::size_t resolution = kDefaultResolution);

// ---------------------------------------------------- canonical expander

/// Gamma_N: Phi(theta, t) = t^{-1/2} (x(theta, t), N).
class SpaceTimeSurface {
 public:
  SpaceTimeSurface(const FlowHistory& history, double N);

  double N() const noexcept { return N_; }
  const FlowHistory& history() const noexcept { return *history_; }
  Vec3 operator()(double theta, double t) const;
  /// Relative time step 1e-3 t, angle step 1e-3, convex side up.
  ParametricSurface parametric() const;

 private:
  const FlowHistory* history_;
  double N_;
};

struct CanonicalCheck {
  double theta = 0.0;
  double t = 0.0;
  double v = 0.0;
  double sff_value = 0.0;       // h(W, W), W = kappa (v + kappa_theta) d_theta + d_t
  double Z_value = 0.0;
  double sigma_estimate = 0.0;  // Z / (sqrt(t) sff)
  double residual_E = 0.0;      // H - <z, nu_in> / 2
};

CanonicalCheck canonical_expander_check(const FlowHistory& history, double N, double theta,
                                        double t, double v);

struct SigmaFit {
  double N = 0.0;
  double sigma = 0.0;         // median ratio
  double spread = 0.0;        // (max - min) / sigma
  double max_residual = 0.0;  // max |E_N|
  std::size_t samples = 0;
};

/// Ratio and residual statistics over a (theta, t, v) lattice.
SigmaFit fit_sigma(const FlowHistory& history, double N, std::size_t n_theta, std::size_t n_t,
                   std::size_t n_v, double t_lo, double t_hi, double v_max);

// ------------------------------------------------------------- the chain

struct ChainLink {
  int index = 0;
  std::string name;
  std::string statement;
  double margin = 0.0;
  double budget = 0.0;
  double slack = 0.0;
  bool passed = false;
  bool evaluated = false;
  std::vector<std::pair<std::string, ConvexityReport>> reports;
};

struct ChainOptions {
  double L = 0.0;  // 0 picks default_box
  std::size_t resolution = kDefaultResolution;
  std::size_t lattice_theta = 32;
  std::size_t lattice_t = 12;
  double t_lo_fraction = 0.05;
  double t_hi_fraction = 0.45;
  std::size_t z_theta = 64;
  std::size_t z_t = 40;
  double flow_dt = 1e-5;
};

struct ChainReport {
  std::vector<ChainLink> links;
  bool passed = false;
  int first_failure = 0;  // 0 when all pass
};

ChainReport convexity_chain(std::span<const double> curve_samples, const std::vector<double>& N_sequence,
                            const ChainOptions& options = {});

void to_json(nlohmann::json& j, const ChainLink& link);
void to_json(nlohmann::json& j, const ChainReport& report);

}  // namespace harnack
