#include "harnack/expander_lab.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>

using namespace harnack;

TEST_CASE("gauge") {
  const SupportCurve circle = make_curve(CirclePreset{1.0});
  const SupportCurve ellipse = make_curve(EllipsePreset{2.0, 1.0});
  CHECK(gauge_function(circle, Vec2(3, 4)) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(gauge_function(circle, Vec2::Zero()) == 0.0);
  CHECK(gauge_function(ellipse, Vec2(2, 0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gauge_function(ellipse, Vec2(0, -3)) == doctest::Approx(3.0).epsilon(1e-10));
  const double s = std::sqrt(0.5);
  CHECK(gauge_function(ellipse, Vec2(2 * s, s)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(gauge_function(ellipse, Vec2(4 * s, 2 * s)) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("cones") {
  const SupportCurve circle = make_curve(CirclePreset{1.0});
  const SupportCurve ellipse = make_curve(EllipsePreset{2.0, 1.0});
  const GridField f1 = build_cone(circle, 1.0, 6.0, 121);
  CHECK(f1.at(60, 60) == 0.0);
  CHECK(f1.at(120, 60) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(f1.lipschitz() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(build_cone(circle, 10.0, 6.0, 121).lipschitz() == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(build_cone(ellipse, 1.0, 12.0, 121).lipschitz() <= 1.0 + 1e-9);
  // Central differences of |y| leave an O(dx^2 / r) defect near the apex.
  CHECK(cone_straightness_defect(f1) < 0.1 * f1.spacing());
  CHECK(cone_straightness_defect(f1, 12) < 0.5 * cone_straightness_defect(f1));
  CHECK_THROWS_AS(build_cone(circle, 1.0, 6.0, 7), std::invalid_argument);
  CHECK_THROWS_AS(build_cone(circle, 0.5, 6.0, 121), std::invalid_argument);
  const GridField sq = squash(build_cone(circle, 4.0, 6.0, 121), 4.0);
  for (std::size_t k = 0; k < sq.values().size(); ++k) CHECK(sq.values()[k] == doctest::Approx(f1.values()[k]).epsilon(1e-14));
}

TEST_CASE("sphere barrier") {
  const double oracle = 0.5 / std::sqrt(2.0);
  CHECK(std::abs(sphere_barrier(make_curve(CirclePreset{1.0})) - oracle) < 1e-6);
  CHECK(std::abs(sphere_barrier(make_curve(EllipsePreset{2.0, 1.0})) - oracle) < 1e-6);
}

TEST_CASE("graphical flow") {
  GridField plane(2.0, 41);
  for (std::size_t j = 0; j < 41; ++j)
    for (std::size_t i = 0; i < 41; ++i) plane.at(i, j) = 0.3 * plane.coord(i) - 1.1 * plane.coord(j) + 0.5;
  const GridField after = graphical_flow(plane, 1.0, 0.2);
  for (std::size_t k = 0; k < after.values().size(); ++k) CHECK(after.values()[k] == doctest::Approx(plane.values()[k]).epsilon(1e-12));
  GraphFlowOptions bad;
  bad.ds = plane.spacing() * plane.spacing();
  CHECK_THROWS_AS(graphical_flow(plane, 1.0, 0.2, bad), std::invalid_argument);
}

TEST_CASE("radial expander") {
  const RadialProfile p = radial_expander(1.0, 12.0);
  CHECK(p.a > 0.0);
  CHECK(p.max_residual(0.05, p.r_max()) <= 1e-6);
  CHECK(std::abs(p.u_r.front()) < 1e-2);
  bool monotone = true, below_slope = true;
  for (std::size_t i = 1; i < p.u_r.size(); ++i) {
    monotone = monotone && p.u_r[i] >= p.u_r[i - 1] - 1e-12;
    below_slope = below_slope && p.u_r[i] < 1.0;
  }
  CHECK(monotone);
  CHECK(below_slope);
  CHECK(p(p.r_max()) - p.r_max() > 0.0);
  const RadialProfile flat = radial_expander(1e-3, 12.0);
  CHECK(flat.a < 1e-2);
}

TEST_CASE("expander over the circle cone") {
  const SupportCurve circle = make_curve(CirclePreset{1.0});
  const ExpanderResult ex = compute_expander(circle, 1.0, 6.0, 121);
  const ExpanderValidation& v = ex.validation;
  CHECK(v.lipschitz_ok);
  CHECK(v.min_ok);
  CHECK(v.asymptotics_ok);
  CHECK(v.min_value <= 2.0 / v.d);
  const GridField rf = radial_field(radial_expander(1.0, 6.0 * std::sqrt(2.0) * 1.01), 6.0, 121);
  double sup = 0.0;
  for (std::size_t k = 0; k < rf.values().size(); ++k) sup = std::max(sup, std::abs(rf.values()[k] - ex.expander.values()[k]));
  CHECK(sup <= 2.0 * rf.spacing());
  // Rotational symmetry of the grid solution.
  CHECK(ex.expander.at(90, 60) == doctest::Approx(ex.expander.at(60, 90)).epsilon(1e-9));
  CHECK(ex.expander.at(30, 60) == doctest::Approx(ex.expander.at(90, 60)).epsilon(1e-9));
  GridConvexityOptions go;
  go.pairs = 2000;
  CHECK(grid_convexity(ex.expander, go).passed);
}

TEST_CASE("level sets of the circle track") {
  const FlowHistory h = run_flow(make_curve(CirclePreset{1.0}), 0.45);
  const Polyline level = scaled_level_curve(h, 2.0);
  for (const auto& p : level) CHECK(p.norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-4));
}
