#include "harnack/convexity.hpp"
#include "harnack/csf_flow.hpp"
#include "harnack/errors.hpp"
#include "harnack/path_energy.hpp"
#include "harnack/support_curve.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>

using namespace harnack;

namespace {
const double kPi = std::numbers::pi;

const FlowHistory& circle_flow() {
  static const FlowHistory h = run_flow(make_curve(CirclePreset{1.0}), 0.45);
  return h;
}

const FlowHistory& ellipse_flow() {
  static const FlowHistory h = [] {
    const SupportCurve c = make_curve(EllipsePreset{2.0, 1.0});
    return run_flow(c, 0.9 * extinction_time(c));
  }();
  return h;
}
}  // namespace

TEST_CASE("support curves") {
  const CurveSlice circle(make_curve(CirclePreset{1.0}).samples());
  const CurvePoint p = circle.point(0.4);
  CHECK(p.h == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.kappa == doctest::Approx(1.0).epsilon(1e-12));

  const CurvePoint e = CurveSlice(make_curve(EllipsePreset{2.0, 1.0}).samples()).point(0.0);
  CHECK(e.h == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(e.r == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(e.kappa == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(std::abs(e.kappa_s) < 1e-8);

  std::vector<double> bad(128);
  for (std::size_t j = 0; j < bad.size(); ++j) bad[j] = 1.0 + 0.6 * std::cos(2.0 * 2.0 * kPi * double(j) / 128.0);
  CHECK_THROWS_AS(SupportCurve::from_samples(bad), InvalidCurveError);
  const ConvexityReport r = curve_convexity(bad);
  CHECK_FALSE(r.passed);
  CHECK(r.min_margin == doctest::Approx(-0.8).epsilon(1e-9));
  CHECK(curve_convexity(make_curve(CirclePreset{1.0})).min_margin == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(curve_convexity(make_curve(EllipsePreset{2.0, 1.0})).min_margin == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("shrinking circle") {
  const FlowHistory& h = circle_flow();
  for (double t : {0.1, 0.2, 0.375, 0.4}) {
    const CurvePoint p = h.slice(t).point(1.3);
    CHECK(std::abs(p.h - std::sqrt(1 - 2 * t)) < 1e-4);
    CHECK(std::abs(p.kappa - 1 / std::sqrt(1 - 2 * t)) < 1e-4);
  }
  const HarnackGeometry g = geometry_at(h, 2.0, 0.25);
  CHECK(g.kappa == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  CHECK(std::abs(g.kappa_s) < 1e-8);
  CHECK(g.dH_dt == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-6));
  const HarnackSample z0 = harnack_Z(g, 0.0);
  CHECK(z0.Z == doctest::Approx(4 * std::sqrt(2.0)).epsilon(1e-5));
  for (double v : {-1.0, 0.5, 3.0}) CHECK(harnack_Z(g, v).Z - z0.Z == doctest::Approx(g.kappa * v * v).epsilon(1e-10));
}

TEST_CASE("flow bookkeeping") {
  const SupportCurve c = make_curve(EllipsePreset{2.0, 1.0});
  const FlowHistory empty = run_flow(c, 0.0);
  CHECK(empty.snapshots().size() == 1);
  CHECK_THROWS_AS(run_flow(c, extinction_time(c)), std::invalid_argument);
  FlowOptions fo;
  fo.scheme = TimeScheme::explicit_euler;
  fo.dt = 1e-3;
  CHECK_THROWS(run_flow(c, 0.1, fo));
}

TEST_CASE("ellipse flow") {
  const FlowHistory& h = ellipse_flow();
  const double A0 = CurveSlice(make_curve(EllipsePreset{2.0, 1.0}).samples()).area();
  double prev = INFINITY;
  for (const auto& s : h.snapshots()) {
    const CurveSlice slice(s.h);
    CHECK(std::abs(slice.area() - (A0 - 2 * kPi * s.t)) < 1e-3);
    CHECK(slice.min_radius() > 0.0);
    const double iso = slice.length() * slice.length() / (4 * kPi * slice.area());
    CHECK(iso <= prev + 1e-9);
    prev = iso;
  }
  const double T = extinction_time(make_curve(EllipsePreset{2.0, 1.0}));
  for (double theta : {0.0, 0.7, 2.1, 4.4}) {
    for (double t : {0.1 * T, 0.3 * T}) {
      const HarnackGeometry g = geometry_at(h, theta, t);
      CHECK(std::abs(g.dH_dt - g.dH_dt_fixed_theta) <= 10 * g.truncation + 1e-9);
    }
  }
  const HarnackLattice lat = harnack_lattice(h, 16, 8, 0.05 * T, 0.45 * T);
  CHECK(lat.Z_min >= -lat.budget);
}

TEST_CASE("path energy") {
  const FlowHistory& h = circle_flow();
  CHECK(path_energy(h, 1.0, 0.1, 1.0, 0.3).delta == doctest::Approx(0.0));
  PathEnergyOptions po;
  po.time_steps = 200;
  po.angle_nodes = 128;
  const double exact = (kPi / 2) * (kPi / 2) / (0.5 * std::log(0.8 / 0.4));
  const double d = path_energy(h, 0.2, 0.1, 0.2 + kPi / 2, 0.3, po).delta;
  CHECK(std::abs(d - exact) / exact < 0.01);
  const IntegratedHarnack ih = integrated_harnack_gap(h, 1.0, 0.1, 1.0, 0.2);
  CHECK(ih.gap == doctest::Approx(1 / std::sqrt(0.6) - std::sqrt(0.5) / std::sqrt(0.8)).epsilon(1e-6));
  CHECK(ih.gap >= 0.0);
  CHECK(std::abs(integrated_harnack_gap(h, 1.0, 0.2, 1.0, 0.2 + 1e-4).gap) < 1e-3);
  CHECK_THROWS_AS(path_energy(h, 0.0, 0.3, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(path_energy(h, 0.0, 0.1, 1.0, 0.49), std::out_of_range);
}

TEST_CASE("integrated Harnack on the ellipse") {
  const FlowHistory& h = ellipse_flow();
  const double T = extinction_time(make_curve(EllipsePreset{2.0, 1.0}));
  PathEnergyOptions po;
  po.time_steps = 64;
  po.angle_nodes = 64;
  for (auto [a, b] : {std::pair{0.3, 2.5}, std::pair{1.0, 4.0}, std::pair{5.0, 0.2}}) {
    CHECK(integrated_harnack_gap(h, a, 0.1 * T, b, 0.4 * T, po).gap >= -1e-6);
  }
}
