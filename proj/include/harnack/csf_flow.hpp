#pragma once

#include "harnack/support_curve.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace harnack {

enum class TimeScheme {
  semi_implicit,  // stabilized: h'' implicit, nonlinearity lagged
  explicit_euler,
};

/// Largest explicit step allowed for a curve: 0.2 (min r)^2 (dtheta)^2.
double explicit_step_bound(const SupportCurve& curve);

/// One step of dh/dt = -1/(h'' + h). Throws ConvexityLossError if the
/// result is not strictly convex, std::invalid_argument if an explicit step
/// exceeds the stability bound.
SupportCurve step_flow(const SupportCurve& curve, double dt,
                       TimeScheme scheme = TimeScheme::semi_implicit);

struct FlowOptions {
  double dt = 1e-5;
  TimeScheme scheme = TimeScheme::semi_implicit;
  /// Time between stored snapshots; the final time is always stored.
  double snapshot_spacing = 1e-4;
  /// Flows must stop before this fraction of A0 / (2 pi).
  double stop_fraction = 0.9;
};

/// Stored state at one time: support values with their first two time
/// derivatives at fixed theta, h_t = -kappa, h_tt = -kappa^2 (kappa'' + kappa).
struct FlowSnapshot {
  double t = 0.0;
  std::vector<double> h;
  std::vector<double> h_t;
  std::vector<double> h_tt;
};

/// Write-once record of a curve shortening flow.
class FlowHistory {
 public:
  FlowHistory(std::vector<FlowSnapshot> snapshots, double dt, std::string descriptor);

  double t_begin() const { return snapshots_.front().t; }
  double t_end() const { return snapshots_.back().t; }
  double dt() const noexcept { return dt_; }
  const std::string& descriptor() const noexcept { return descriptor_; }
  std::size_t size() const noexcept { return snapshots_.size(); }
  std::size_t samples() const { return snapshots_.front().h.size(); }
  const FlowSnapshot& snapshot(std::size_t i) const { return snapshots_.at(i); }
  const std::vector<FlowSnapshot>& snapshots() const noexcept { return snapshots_; }

  /// Support samples at time t (quintic Hermite in time).
  std::vector<double> support_at(double t) const;
  CurveSlice slice(double t) const { return CurveSlice(support_at(t)); }
  SupportCurve curve_at(double t) const { return SupportCurve::from_samples(support_at(t)); }

 private:
  std::vector<FlowSnapshot> snapshots_;
  double dt_;
  std::string descriptor_;
};

/// A0 / (2 pi), the extinction time of an embedded convex curve.
double extinction_time(const SupportCurve& curve);

FlowHistory run_flow(const SupportCurve& curve, double t_end, const FlowOptions& options = {});

struct GeometryOptions {
  /// Time stencil for the fixed-theta estimator of dH/dt.
  double time_step = 1e-3;
};

/// Curvature data and two estimates of dH/dt in the normal gauge.
struct HarnackGeometry {
  double theta = 0.0;
  double t = 0.0;
  double kappa = 0.0;
  double kappa_s = 0.0;
  double kappa_ss = 0.0;
  double dH_dt = 0.0;              // kappa_ss + kappa^3
  double dH_dt_fixed_theta = 0.0;  // time difference at fixed theta + kappa kappa_theta^2
  double truncation = 0.0;         // Richardson time term plus spectral tail of kappa_ss
};

HarnackGeometry geometry_at(const FlowHistory& history, double theta, double t,
                            const GeometryOptions& options = {});

/// Z(V,V) = dH/dt + 2 <grad H, V> + h(V,V) + H/(2t) for V = v tau.
struct HarnackSample {
  double theta = 0.0;
  double t = 0.0;
  double v = 0.0;
  double Z = 0.0;
  double Z_min = 0.0;
  double v_star = 0.0;
  double dH_dt = 0.0;
  double grad_H = 0.0;
  double sff_term = 0.0;
  double time_term = 0.0;
  double truncation = 0.0;
};

HarnackSample harnack_Z(const FlowHistory& history, double theta, double t, double v,
                        const GeometryOptions& options = {});

/// Z as an exact quadratic in v from precomputed geometry.
HarnackSample harnack_Z(const HarnackGeometry& g, double v);

struct HarnackLattice {
  std::vector<HarnackSample> samples;
  double Z_min = 0.0;
  HarnackSample witness;
  /// Largest gap between the two dH/dt estimators plus their Richardson
  /// estimate over the lattice.
  double budget = 0.0;
};

/// Z_min over a uniform (theta, t) lattice, t in [t_lo, t_hi].
HarnackLattice harnack_lattice(const FlowHistory& history, std::size_t n_theta, std::size_t n_t,
                               double t_lo, double t_hi, const GeometryOptions& options = {});

}  // namespace harnack
