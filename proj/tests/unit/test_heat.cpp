#include "harnack/heat_harnack.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

using namespace harnack::heat;

namespace {
const double kPi = std::numbers::pi;
PointSourceSolution two_sources() { return PointSourceSolution(1, {{Point(-1, 0), 1.0}, {Point(1, 0), 1.0}}); }
}  // namespace

TEST_CASE("kernel values") {
  CHECK(eval_solution(FundamentalSolution{2}, Point::Zero(), 1.0 / (4 * kPi)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eval_solution(FundamentalSolution{1}, Point::Zero(), 1.0) == doctest::Approx(0.2820947918).epsilon(1e-10));
  const double expect = 2.0 / std::sqrt(4 * kPi) * std::exp(-0.25);
  CHECK(eval_solution(two_sources(), Point::Zero(), 1.0) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(log_solution(two_sources(), Point(40, 0), 0.1) == doctest::Approx(-39.0 * 39.0 / 0.4 + std::log(1.0 / std::sqrt(0.4 * kPi))).epsilon(1e-12));
}

TEST_CASE("log Hessian of the kernel") {
  CHECK(hessian_log(FundamentalSolution{1}, Point(0.7, 0), 1.0).xx == doctest::Approx(-0.5).epsilon(1e-6));
  const SymmetricMatrix2 m = hessian_log(FundamentalSolution{2}, Point(3, -7), 0.25);
  CHECK(std::abs(m.xx + 2) < 1e-5);
  CHECK(std::abs(m.yy + 2) < 1e-5);
  CHECK(std::abs(m.xy) < 1e-5);
  CHECK(hessian_log(two_sources(), Point::Zero(), 1.0).xx >= -0.5);
}

TEST_CASE("matrix Harnack defect") {
  for (double t : {0.1, 0.5, 2.0}) CHECK(std::abs(matrix_harnack_defect(FundamentalSolution{2}, Point(1, -2), t).value) < 1e-6);
  const PointSourceSolution single(2, {{Point::Zero(), 1.0}});
  CHECK(std::abs(matrix_harnack_defect(single, Point(1, 1), 0.5).value) < 1e-6);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(-3, 3), ut(0.1, 2.0);
  const HeatSolution sol = two_sources();
  for (int k = 0; k < 100; ++k) CHECK(matrix_harnack_defect(sol, Point(ux(rng), 0), ut(rng)).value >= -1e-6);
}

TEST_CASE("trace defects") {
  const TraceDefects a = trace_defects(FundamentalSolution{1}, Point::Zero(), 1.0);
  CHECK(std::abs(a.li_yau.value) < 1e-6);
  CHECK(std::abs(a.trace_harnack.value) < 1e-6);
  const TraceDefects b = trace_defects(FundamentalSolution{2}, Point(1, 0), 0.5);
  CHECK(std::abs(b.li_yau.value) < 1e-5);
  CHECK(std::abs(b.trace_harnack.value) < 1e-5);
  const TraceDefects c = trace_defects(two_sources(), Point(0.3, 0), 0.7);
  CHECK(c.li_yau.value >= -1e-6);
  CHECK(c.trace_harnack.value >= -1e-6);
  CHECK(std::abs(c.li_yau.value - c.trace_harnack.value) <= 1e-5);
}

TEST_CASE("classical Harnack") {
  CHECK(std::abs(classical_harnack_gap(FundamentalSolution{2}, Point::Zero(), 0.5, Point::Zero(), 1.0)) < 1e-12);
  CHECK(classical_harnack_gap(FundamentalSolution{1}, Point::Zero(), 0.5, Point(1, 0), 1.0) > 0.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(-3, 3), ut(0.1, 2.0);
  const HeatSolution sol = two_sources();
  for (int k = 0; k < 1000; ++k) {
    double t1 = ut(rng), t2 = ut(rng);
    if (t1 > t2) std::swap(t1, t2);
    if (t1 == t2) continue;
    CHECK(classical_harnack_gap(sol, Point(ux(rng), 0), t1, Point(ux(rng), 0), t2) >= -1e-10);
  }
  CHECK_THROWS_AS(classical_harnack_gap(sol, Point::Zero(), 1.0, Point::Zero(), 0.5), std::invalid_argument);
}

TEST_CASE("log-convexity of u / rho") {
  CHECK(log_ratio_convexity_defect(FundamentalSolution{1}, 1.0, Point(-2, 0), Point(2, 0), 0.3) == 0.0);
  CHECK(log_ratio_convexity_defect(two_sources(), 1.0, Point(-2, 0), Point(2, 0), 0.5) >= 0.0);
  CHECK(std::abs(log_ratio_convexity_defect(two_sources(), 1.0, Point(0.4, 0), Point(0.4, 0), 0.8)) < 1e-12);
  CHECK(log_ratio_hessian_min(two_sources(), Point(0.2, 0), 0.6).value >= -1e-6);
}
