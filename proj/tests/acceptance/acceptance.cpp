// One line per acceptance criterion: PASS/FAIL, measured value, tolerance.
#include "harnack/convexity.hpp"
#include "harnack/csf_flow.hpp"
#include "harnack/expander_lab.hpp"
#include "harnack/heat_harnack.hpp"
#include "harnack/path_energy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

using namespace harnack;
namespace hh = harnack::heat;

namespace {

const double kPi = std::numbers::pi;
int failures = 0;

void report(int id, const std::string& what, bool pass, const std::string& detail, double seconds) {
  std::printf("[%s] %2d %-34s %s (%.1f s)\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  failures += pass ? 0 : 1;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::pair<double, double> ordered_times(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  double a = u(rng), b = u(rng);
  if (a > b) std::swap(a, b);
  if (b - a < 1e-3) b = std::min(a + 1e-3, hi);
  return {a, b};
}

hh::PointSourceSolution three_sources() {
  return hh::PointSourceSolution(2, {{hh::Point(-1, 0), 1.0}, {hh::Point(1, 0.5), 2.0}, {hh::Point(0, -1), 0.5}});
}

void heat_equality() {
  Clock c;
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const double t = 0.1 + (2.0 - 0.1) * k / 4.0;
    for (int j = 0; j < 41; ++j)
      for (int i = 0; i < 41; ++i)
        worst = std::max(worst, std::abs(hh::matrix_harnack_defect(hh::FundamentalSolution{2},
                                                                    hh::Point(-5 + 0.25 * i, -5 + 0.25 * j), t).value));
  }
  report(1, "heat equality for rho", worst <= 1e-6, fmt("max|defect| = %.3g <= 1e-6", worst), c.seconds());
}

void heat_positivity() {
  Clock c;
  const hh::HeatSolution sol = three_sources();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ux(-3, 3), ut(0.1, 2.0), ua(0, 1);
  double mat = INFINITY, tr = INFINITY, cl = INFINITY, lc = INFINITY;
  for (int k = 0; k < 1000; ++k) {
    const hh::Point x(ux(rng), ux(rng));
    const double t = ut(rng);
    mat = std::min(mat, hh::matrix_harnack_defect(sol, x, t).value);
    const hh::TraceDefects d = hh::trace_defects(sol, x, t);
    tr = std::min({tr, d.li_yau.value, d.trace_harnack.value});
    const auto [t1, t2] = ordered_times(rng, 0.1, 2.0);
    cl = std::min(cl, hh::classical_harnack_gap(sol, hh::Point(ux(rng), ux(rng)), t1, hh::Point(ux(rng), ux(rng)), t2));
    lc = std::min(lc, hh::log_ratio_convexity_defect(sol, ut(rng), hh::Point(ux(rng), ux(rng)),
                                                     hh::Point(ux(rng), ux(rng)), std::clamp(ua(rng), 1e-6, 1 - 1e-6)));
  }
  const bool pass = mat >= -1e-6 && tr >= -1e-6 && cl >= -1e-10 && lc >= -1e-10;
  report(2, "heat positivity (3 sources)", pass,
         fmt("min matrix %.3g, min trace %.3g, ", mat, tr) + fmt("min classical %.3g, min log-convex %.3g", cl, lc),
         c.seconds());
}

void heat_sharpness() {
  Clock c;
  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto [t1, t2] = ordered_times(rng, 0.1, 2.0);
    worst = std::max(worst, std::abs(hh::classical_harnack_gap(hh::FundamentalSolution{2}, hh::Point::Zero(), t1,
                                                               hh::Point::Zero(), t2)));
  }
  report(3, "classical Harnack sharp on rho", worst <= 1e-12, fmt("max|gap| = %.3g <= 1e-12", worst), c.seconds());
}

const FlowHistory& circle_flow() {
  static const FlowHistory h = run_flow(make_curve(CirclePreset{1.0}), 0.45);
  return h;
}

const SupportCurve& ellipse() {
  static const SupportCurve e = make_curve(EllipsePreset{2.0, 1.0});
  return e;
}

const FlowHistory& ellipse_flow() {
  static const FlowHistory h = run_flow(ellipse(), 0.9 * extinction_time(ellipse()));
  return h;
}

void shrinking_circle() {
  Clock c;
  double err = 0.0;
  for (const auto& s : circle_flow().snapshots()) {
    if (s.t > 0.4 + 1e-12) break;
    for (double v : s.h) err = std::max(err, std::abs(v - std::sqrt(1 - 2 * s.t)));
  }
  const double A0 = CurveSlice(ellipse().samples()).area();
  double rate = 0.0;
  for (const auto& s : ellipse_flow().snapshots())
    if (s.t > 0) rate = std::max(rate, std::abs((A0 - CurveSlice(s.h).area()) / s.t - 2 * kPi));
  report(4, "shrinking circle, area rate", err <= 1e-4 && rate <= 1e-3,
         fmt("radius err %.3g <= 1e-4, area rate err %.3g <= 1e-3", err, rate), c.seconds());
}

void evolution_identity() {
  Clock c;
  const double T = extinction_time(ellipse());
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uth(0, 2 * kPi), ut(0.05 * T, 0.45 * T);
  double ratio = 0.0;
  bool pass = true;
  for (int k = 0; k < 200; ++k) {
    const double th = uth(rng), t = ut(rng);
    const HarnackGeometry g = geometry_at(ellipse_flow(), th, t);
    const double diff = std::abs(g.dH_dt - g.dH_dt_fixed_theta);
    pass = pass && diff <= 10 * g.truncation + 1e-9;
    ratio = std::max(ratio, diff / g.truncation);
  }
  report(5, "evolution identity", pass, fmt("max |diff| / truncation = %.3g <= 10", ratio), c.seconds());
}

void hamilton_harnack() {
  Clock c;
  const double T = extinction_time(ellipse());
  const HarnackLattice lat = harnack_lattice(ellipse_flow(), 64, 40, 0.05 * T, 0.45 * T);
  const double z = harnack_Z(circle_flow(), 0.0, 0.25, 0.0).Z_min;
  double circle_err = 0.0;
  for (double t : {0.1, 0.25, 0.4}) {
    const double k = 1 / std::sqrt(1 - 2 * t);
    circle_err = std::max(circle_err, std::abs(harnack_Z(circle_flow(), 1.1, t, 0.0).Z_min - (k * k * k + k / (2 * t))));
  }
  report(6, "curve Harnack Z >= 0", lat.Z_min >= -lat.budget && circle_err <= 1e-4,
         fmt("ellipse Z_min %.4g (budget %.2g), circle Z(0.25) = %.6f", lat.Z_min, lat.budget, z), c.seconds());
}

void integrated_harnack() {
  Clock c;
  const double T = extinction_time(ellipse());
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uth(0, 2 * kPi);
  PathEnergyOptions fine, coarse;
  fine.time_steps = 64;
  fine.angle_nodes = 64;
  coarse.time_steps = 32;
  coarse.angle_nodes = 64;
  double worst = INFINITY;
  bool pass = true;
  for (int k = 0; k < 200; ++k) {
    const auto [t1, t2] = ordered_times(rng, 0.05 * T, 0.45 * T);
    const double a = uth(rng), b = uth(rng);
    const IntegratedHarnack ih = integrated_harnack_gap(ellipse_flow(), a, t1, b, t2, fine);
    const double dc = path_energy(ellipse_flow(), a, t1, b, t2, coarse).delta;
    const double budget = 0.25 * ih.H1 * std::sqrt(t1 / t2) * std::exp(-ih.delta / 4) * std::abs(ih.delta - dc) + 1e-10;
    pass = pass && ih.gap >= -budget;
    worst = std::min(worst, ih.gap);
  }
  PathEnergyOptions po;
  po.time_steps = 200;
  po.angle_nodes = 128;
  const double exact = (kPi / 2) * (kPi / 2) / (0.5 * std::log(0.8 / 0.4));
  const double rel = std::abs(path_energy(circle_flow(), 0.3, 0.1, 0.3 + kPi / 2, 0.3, po).delta - exact) / exact;
  report(7, "integrated Harnack, path energy", pass && rel <= 0.01,
         fmt("min gap %.4g, circle Delta rel err %.3g <= 0.01", worst, rel), c.seconds());
}

void expander_validity() {
  Clock c;
  const RadialProfile p = radial_expander(1.0, 6.0 * std::sqrt(2.0) * 1.01);
  const double res = p.max_residual(0.05, p.r_max());
  const ExpanderResult ex = compute_expander(make_curve(CirclePreset{1.0}), 1.0, 6.0, 201);
  const GridField rf = radial_field(p, 6.0, 201);
  double sup = 0.0;
  for (std::size_t k = 0; k < rf.values().size(); ++k) sup = std::max(sup, std::abs(rf.values()[k] - ex.expander.values()[k]));
  report(8, "expander validity", res <= 1e-6 && sup <= 2 * rf.spacing(),
         fmt("radial residual %.3g <= 1e-6, grid vs radial %.3g <= %.3g", res, sup, 2 * rf.spacing()), c.seconds());
}

void lemma_bounds() {
  Clock c;
  bool pass = true;
  double worst_lip = -INFINITY, worst_min = 0.0;
  for (const SupportCurve& curve : {make_curve(CirclePreset{1.0}), ellipse()}) {
    for (double N : {1.0, 5.0, 20.0}) {
      const ExpanderValidation v = compute_expander(curve, N, default_box(curve), 201).validation;
      pass = pass && v.lipschitz_expander <= v.lipschitz_cone + v.lipschitz_tolerance && v.min_value <= v.min_bound;
      worst_lip = std::max(worst_lip, (v.lipschitz_expander - v.lipschitz_cone) / v.lipschitz_tolerance);
      worst_min = std::max(worst_min, v.min_value / v.min_bound);
    }
  }
  report(9, "Lipschitz and infimum bounds", pass,
         fmt("max (Lip excess / tol) %.3g <= 1, max min/bound %.3g <= 1", worst_lip, worst_min), c.seconds());
}

void level_set_limit() {
  Clock c;
  bool pass = true;
  std::string detail;
  for (const SupportCurve& curve : {make_curve(CirclePreset{1.0}), ellipse()}) {
    const FlowHistory h = run_flow(curve, 0.9 * extinction_time(curve));
    const LimitComparison lc = limit_comparison(curve, h, {2, 5, 10, 20}, default_box(curve), 201);
    const bool ok = lc.decreasing && lc.sup_distance.back() <= 5 * lc.grid_tolerance &&
                    lc.max_hausdorff <= 2 * lc.grid_tolerance;
    pass = pass && ok;
    detail += fmt("sup %.3g -> %.3g, hausdorff %.3g; ", lc.sup_distance.front(), lc.sup_distance.back(), lc.max_hausdorff);
  }
  report(10, "level-set flow limit", pass, detail, c.seconds());
}

void canonical_expander() {
  Clock c;
  bool pass = true;
  std::string detail;
  for (const auto& [h, T] : {std::pair{&circle_flow(), 0.5}, std::pair{&ellipse_flow(), extinction_time(ellipse())}}) {
    std::vector<SigmaFit> fits;
    for (double N : {10.0, 20.0, 50.0, 100.0}) fits.push_back(fit_sigma(*h, N, 16, 10, 5, 0.05 * T, 0.45 * T, 2.0));
    bool trend = true;
    for (std::size_t k = 1; k < fits.size(); ++k) trend = trend && std::abs(fits[k].sigma - 1) < std::abs(fits[k - 1].sigma - 1);
    const double ratio = (100 * fits[3].max_residual) / (10 * fits[0].max_residual);
    pass = pass && fits[2].spread <= 0.03 && trend && std::abs(fits[3].sigma - 1) <= 0.02 && ratio <= 2;
    detail += fmt("spread %.2g, sigma100 %.5f, N|E| ratio %.2g; ", fits[2].spread, fits[3].sigma, ratio);
  }
  report(11, "canonical expander sigma_N", pass, detail, c.seconds());
}

void chain() {
  Clock c;
  const ChainReport circle = convexity_chain(preset_samples(CirclePreset{1.0}), {5, 20});
  const ChainReport ell = convexity_chain(preset_samples(EllipsePreset{2.0, 1.0}), {5, 20});
  std::vector<double> bad(256);
  for (std::size_t j = 0; j < bad.size(); ++j) bad[j] = 1.0 + 0.6 * std::cos(4.0 * kPi * double(j) / 256.0);
  const ChainReport broken = convexity_chain(bad, {5, 20});
  auto min_slack = [](const ChainReport& r) {
    double s = INFINITY;
    for (const auto& l : r.links) s = std::min(s, l.slack);
    return s;
  };
  const bool pass = circle.passed && ell.passed && min_slack(circle) > 0 && min_slack(ell) > 0 &&
                    !broken.passed && broken.first_failure == 1;
  report(12, "convexity chain", pass,
         fmt("circle min slack %.3g, ellipse min slack %.3g, non-convex fails at link %.0f", min_slack(circle),
             min_slack(ell), broken.first_failure),
         c.seconds());
}

}  // namespace

int main() {
  using Criterion = void (*)();
  for (Criterion f : {heat_equality, heat_positivity, heat_sharpness, shrinking_circle, evolution_identity,
                      hamilton_harnack, integrated_harnack, expander_validity, lemma_bounds, level_set_limit,
                      canonical_expander, chain}) {
    try {
      f();
    } catch (const std::exception& e) {
      std::printf("[FAIL] criterion raised: %s\n", e.what());
      ++failures;
    }
  }
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
