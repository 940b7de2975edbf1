#include "harnack/experiments.hpp"

#include "harnack/convexity.hpp"
#include "harnack/csf_flow.hpp"
#include "harnack/errors.hpp"
#include "harnack/expander_lab.hpp"
#include "harnack/path_energy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <locale>
#include <numbers>
#include <random>

namespace harnack {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

class Csv {
 public:
  Csv(const fs::path& file, const std::vector<std::string>& header) : os_(file) {
    if (!os_) throw std::runtime_error("cannot open " + file.string());
    os_.imbue(std::locale::classic());
    os_ << std::setprecision(17);
    for (std::size_t k = 0; k < header.size(); ++k) os_ << (k ? "," : "") << header[k];
    os_ << '\n';
  }
  void row(std::initializer_list<double> values) {
    std::size_t k = 0;
    for (double v : values) os_ << (k++ ? "," : "") << v;
    os_ << '\n';
  }

 private:
  std::ofstream os_;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

CheckResult make_check(std::string name, std::string anchor, double margin, double budget, json details = json::object()) {
  CheckResult c;
  c.name = std::move(name);
  c.anchor = std::move(anchor);
  c.margin = margin;
  c.budget = budget;
  c.pass = std::isfinite(margin) && margin >= -budget;
  c.details = std::move(details);
  return c;
}

std::vector<heat::PointSource> default_sources(int dim) {
  if (dim == 1) return {{heat::Point(-1.0, 0.0), 1.0}, {heat::Point(0.5, 0.0), 2.0}, {heat::Point(1.5, 0.0), 0.5}};
  return {{heat::Point(-1.0, 0.0), 1.0}, {heat::Point(1.0, 0.5), 2.0}, {heat::Point(0.0, -1.0), 0.5}};
}

CurvePreset preset_of(const CurveConfig& c) {
  if (c.preset == "circle") return CirclePreset{c.radius};
  if (c.preset == "ellipse") return EllipsePreset{c.a, c.b};
  return GenericPreset{c.samples};
}

std::vector<double> curve_samples(const ExperimentConfig& c) {
  if (c.curve.preset == "generic") return c.curve.samples;
  return preset_samples(preset_of(c.curve), c.curve.M);
}

SupportCurve configured_curve(const ExperimentConfig& c) { return SupportCurve::from_samples(curve_samples(c)); }

FlowHistory configured_flow(const ExperimentConfig& c, const SupportCurve& curve) {
  FlowOptions fo;
  fo.dt = c.flow.dt;
  const double t_end = c.flow.t_end > 0.0 ? c.flow.t_end : fo.stop_fraction * extinction_time(curve);
  return run_flow(curve, t_end, fo);
}

std::vector<double> or_default(const std::vector<double>& v, std::vector<double> fallback) {
  return v.empty() ? fallback : v;
}

}  // namespace

bool SuiteResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult* RunResult::first_failure() const {
  for (const auto& s : suites)
    for (const auto& c : s.checks)
      if (!c.pass) return &c;
  return nullptr;
}

// ------------------------------------------------------------------ heat

SuiteResult run_heat_suite(const ExperimentConfig& c, const std::string& out_dir) {
  using namespace heat;
  SuiteResult suite;
  suite.suite = "heat";
  const int dim = c.heat.dim;
  const HeatSolution rho = FundamentalSolution{dim};
  const HeatSolution sol =
      PointSourceSolution(dim, c.heat.sources.empty() ? default_sources(dim) : c.heat.sources, c.heat.time_shift);
  const Tolerances& tol = c.tolerances;

  std::vector<Point> xs;
  for (int j = 0; j < (dim == 2 ? 41 : 1); ++j)
    for (int i = 0; i < 41; ++i) xs.emplace_back(-5.0 + 0.25 * i, dim == 2 ? -5.0 + 0.25 * j : 0.0);
  const std::vector<double> ts = {0.1, 0.575, 1.05, 1.525, 2.0};

  double eq = 0.0, mat = INFINITY, ly = INFINITY, th = INFINITY, lr = INFINITY, consist = INFINITY;
  double worst_gap = 0.0;
  Csv csv(fs::path(out_dir) / "heat_defects.csv", {"x", "y", "t", "matrix_defect", "li_yau", "trace_harnack", "log_ratio_hessian"});
  for (double t : ts) {
    for (const Point& x : xs) {
      eq = std::max(eq, std::abs(matrix_harnack_defect(rho, x, t).value));
      const Estimate m = matrix_harnack_defect(sol, x, t);
      const TraceDefects d = trace_defects(sol, x, t);
      const Estimate r = log_ratio_hessian_min(sol, x, t);
      mat = std::min(mat, m.value);
      ly = std::min(ly, d.li_yau.value);
      th = std::min(th, d.trace_harnack.value);
      lr = std::min(lr, r.value);
      const double gap = std::abs(d.li_yau.value - d.trace_harnack.value);
      const double allowed = tol.identity_factor * (d.li_yau.truncation + d.trace_harnack.truncation) + 1e-9;
      consist = std::min(consist, allowed - gap);
      worst_gap = std::max(worst_gap, gap);
      csv.row({x.x(), x.y(), t, m.value, d.li_yau.value, d.trace_harnack.value, r.value});
    }
  }
  const std::size_t samples = xs.size() * ts.size();
  suite.checks.push_back(make_check("heat.kernel_equality", "Hess(log rho) + I/(2t) = 0", -eq, tol.heat_equality,
                                    {{"max_abs_defect", eq}, {"samples", samples}}));
  suite.checks.push_back(make_check("heat.matrix_harnack", "Hess(log u) + I/(2t) >= 0", mat, tol.heat_positivity,
                                    {{"min_defect", mat}, {"samples", samples}}));
  suite.checks.push_back(make_check("heat.li_yau", "Laplacian(log u) + n/(2t) >= 0", ly, tol.heat_positivity));
  suite.checks.push_back(
      make_check("heat.trace_harnack", "d/dt log u - |grad log u|^2 + n/(2t) >= 0", th, tol.heat_positivity));
  suite.checks.push_back(make_check("heat.trace_consistency", "d/dt log u = Laplacian(log u) + |grad log u|^2", consist,
                                    0.0, {{"max_difference", worst_gap}, {"factor", tol.identity_factor}}));
  suite.checks.push_back(make_check("heat.log_ratio_hessian", "Hess log(u/rho) >= 0", lr, tol.heat_positivity));

  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> ux(-3.0, 3.0), ut(0.1, 2.0), ua(0.0, 1.0);
  auto rand_point = [&]() { return Point(ux(rng), dim == 2 ? ux(rng) : 0.0); };
  double classical = INFINITY, convex = INFINITY;
  Csv gaps(fs::path(out_dir) / "heat_classical.csv", {"x1", "y1", "t1", "x2", "y2", "t2", "gap"});
  for (std::size_t k = 0; k < c.heat.random_tuples; ++k) {
    double t1 = ut(rng), t2 = ut(rng);
    if (t1 > t2) std::swap(t1, t2);
    if (t1 == t2) t2 = t1 + 1e-3;
    const Point x1 = rand_point(), x2 = rand_point();
    const double g = classical_harnack_gap(sol, x1, t1, x2, t2);
    classical = std::min(classical, g);
    gaps.row({x1.x(), x1.y(), t1, x2.x(), x2.y(), t2, g});
    const Point z1 = rand_point(), z2 = rand_point();
    double a = ua(rng);
    a = std::clamp(a, 1e-6, 1.0 - 1e-6);
    convex = std::min(convex, log_ratio_convexity_defect(sol, ut(rng), z1, z2, a));
  }
  suite.checks.push_back(make_check("heat.classical_harnack",
                                    "u(x2,t2) >= u(x1,t1) (t1/t2)^{n/2} exp(-|x2-x1|^2/(4(t2-t1)))", classical,
                                    tol.classical, {{"tuples", c.heat.random_tuples}}));
  suite.checks.push_back(make_check("heat.log_convexity", "log(u/rho) convex", convex, tol.classical,
                                    {{"segments", c.heat.random_tuples}}));
  double sharp = 0.0;
  for (int k = 0; k < 20; ++k) {
    double t1 = ut(rng), t2 = ut(rng);
    if (t1 > t2) std::swap(t1, t2);
    if (t1 == t2) t2 = t1 + 1e-3;
    sharp = std::max(sharp, std::abs(classical_harnack_gap(rho, Point::Zero(), t1, Point::Zero(), t2)));
  }
  suite.checks.push_back(make_check("heat.classical_sharpness", "equality for rho at x1 = x2 = 0", -sharp,
                                    tol.sharpness, {{"max_abs_gap", sharp}, {"pairs", 20}}));
  return suite;
}

// ------------------------------------------------------------------- csf

SuiteResult run_csf_suite(const ExperimentConfig& c, const std::string& out_dir) {
  SuiteResult suite;
  suite.suite = "csf";
  const Tolerances& tol = c.tolerances;
  FlowOptions fo;
  fo.dt = c.flow.dt;

  // Shrinking unit circle: R(t) = sqrt(1 - 2t).
  const FlowHistory circle = run_flow(make_curve(CirclePreset{1.0}), 0.45, fo);
  double radius_err = 0.0;
  {
    Csv csv(fs::path(out_dir) / "circle_radius.csv", {"t", "radius_min", "radius_max", "exact"});
    for (const auto& s : circle.snapshots()) {
      const double exact = std::sqrt(1.0 - 2.0 * s.t);
      const auto [lo, hi] = std::minmax_element(s.h.begin(), s.h.end());
      csv.row({s.t, *lo, *hi, exact});
      if (s.t <= 0.4 + 1e-12) radius_err = std::max({radius_err, std::abs(*lo - exact), std::abs(*hi - exact)});
    }
  }
  suite.checks.push_back(make_check("csf.circle_radius", "R(t) = sqrt(1 - 2t)", -radius_err, tol.circle_radius,
                                    {{"max_error", radius_err}, {"dt", fo.dt}}));

  double z_err = 0.0;
  for (double t : {0.1, 0.2, 0.25, 0.3, 0.4}) {
    const double k = 1.0 / std::sqrt(1.0 - 2.0 * t);
    for (double theta : {0.0, 1.0, 2.5, 4.0}) {
      const HarnackSample s = harnack_Z(circle, theta, t, 0.0);
      z_err = std::max(z_err, std::abs(s.Z_min - (k * k * k + k / (2.0 * t))));
    }
  }
  suite.checks.push_back(make_check("csf.circle_Z", "Z = kappa^3 + kappa/(2t) on circles", -z_err, tol.circle_Z,
                                    {{"max_error", z_err}, {"value_t0.25", harnack_Z(circle, 0.0, 0.25, 0.0).Z}}));

  {
    PathEnergyOptions po;
    po.time_steps = 200;
    po.angle_nodes = 128;
    const double theta1 = 0.3, t1 = 0.1, t2 = 0.3;
    const PathEnergy pe = path_energy(circle, theta1, t1, theta1 + kPi / 2, t2, po);
    const double exact = (kPi / 2) * (kPi / 2) / (0.5 * std::log((1 - 2 * t1) / (1 - 2 * t2)));
    const double rel = std::abs(pe.delta - exact) / exact;
    suite.checks.push_back(make_check("csf.path_energy_circle", "Delta = inf integral |tangential velocity|^2 dt",
                                      -rel, tol.path_relative,
                                      {{"delta", pe.delta}, {"exact", exact}, {"lattice_delta", pe.lattice_delta}}));
    Csv csv(fs::path(out_dir) / "circle_path.csv", {"t", "theta"});
    for (const auto& p : pe.path) csv.row({p.t, p.theta});
    const PathEnergy zero = path_energy(circle, 1.0, 0.1, 1.0, 0.2, po);
    suite.checks.push_back(make_check("csf.path_energy_zero", "Delta = 0 along fixed normals of a circle", -zero.delta,
                                      1e-10, {{"delta", zero.delta}}));
    const double k1 = 1.0 / std::sqrt(0.8), k2 = 1.0 / std::sqrt(0.6);
    const IntegratedHarnack ih = integrated_harnack_gap(circle, 1.0, 0.1, 1.0, 0.2, po);
    const double expect = k2 - k1 * std::sqrt(0.5);
    suite.checks.push_back(make_check("csf.integrated_circle", "H2 - H1 sqrt(t1/t2) on circles", -std::abs(ih.gap - expect),
                                      1e-6, {{"gap", ih.gap}, {"expected", expect}}));
  }

  // Configured curve.
  const SupportCurve curve = configured_curve(c);
  const FlowHistory hist = configured_flow(c, curve);
  const double T = extinction_time(curve);
  const double A0 = CurveSlice(curve.samples()).area();
  double area_err = 0.0, min_r = INFINITY, iso_rise = 0.0, prev_iso = INFINITY;
  {
    Csv csv(fs::path(out_dir) / "flow_summary.csv", {"t", "area", "length", "isoperimetric_ratio", "min_radius"});
    for (const auto& s : hist.snapshots()) {
      const CurveSlice slice(s.h);
      const double A = slice.area(), Lc = slice.length();
      const double iso = Lc * Lc / (4 * kPi * A);
      if (s.t > 0.0) area_err = std::max(area_err, std::abs((A0 - A) / s.t - 2 * kPi));
      min_r = std::min(min_r, slice.min_radius());
      iso_rise = std::max(iso_rise, iso - prev_iso);
      prev_iso = iso;
      csv.row({s.t, A, Lc, iso, slice.min_radius()});
    }
  }
  suite.checks.push_back(make_check("csf.area_rate", "dA/dt = -2 pi", -area_err, tol.area_rate, {{"max_rate_error", area_err}}));
  suite.checks.push_back(make_check("csf.convexity_preserved", "all M_t convex", min_r, 0.0, {{"min_radius", min_r}}));
  suite.checks.push_back(make_check("csf.isoperimetric_decrease", "L^2/(4 pi A) non-increasing", -std::max(iso_rise, 0.0),
                                    1e-9, {{"max_increase", iso_rise}}));

  const double t_lo = 0.05 * T, t_hi = 0.45 * T;
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> uth(0.0, 2 * kPi), ut(t_lo, t_hi);
  double identity = INFINITY, worst_ratio = 0.0;
  for (int k = 0; k < 200; ++k) {
    const HarnackGeometry g = geometry_at(hist, uth(rng), ut(rng));
    const double diff = std::abs(g.dH_dt - g.dH_dt_fixed_theta);
    identity = std::min(identity, tol.identity_factor * g.truncation + 1e-9 - diff);
    worst_ratio = std::max(worst_ratio, diff / std::max(g.truncation, 1e-300));
  }
  suite.checks.push_back(make_check("csf.evolution_identity", "dH/dt = kappa_ss + kappa^3 (normal gauge)", identity, 0.0,
                                    {{"samples", 200}, {"max_ratio_to_truncation", worst_ratio}}));

  const HarnackLattice lat = harnack_lattice(hist, 64, 40, t_lo, t_hi);
  {
    Csv csv(fs::path(out_dir) / "z_lattice.csv", {"theta", "t", "Z_min", "v_star", "dH_dt", "grad_H", "sff_term", "time_term"});
    for (const auto& s : lat.samples) csv.row({s.theta, s.t, s.Z_min, s.v_star, s.dH_dt, s.grad_H, s.sff_term, s.time_term});
  }
  suite.checks.push_back(make_check("csf.harnack_Z", "Z(V,V) = dH/dt + 2<grad H,V> + h(V,V) + H/(2t) >= 0", lat.Z_min,
                                    lat.budget,
                                    {{"witness_theta", lat.witness.theta}, {"witness_t", lat.witness.t}, {"lattice", "64x40"}}));

  double vertex_err = 0.0;
  for (std::size_t k = 0; k < lat.samples.size(); k += 51) {
    const HarnackGeometry g = geometry_at(hist, lat.samples[k].theta, lat.samples[k].t);
    const double zm = harnack_Z(g, -1.0).Z, z0 = harnack_Z(g, 0.0).Z, zp = harnack_Z(g, 1.0).Z;
    const double vertex = -(zp - zm) / (2.0 * (zp + zm - 2.0 * z0));
    vertex_err = std::max(vertex_err, std::abs(vertex - harnack_Z(g, 0.0).v_star));
  }
  suite.checks.push_back(make_check("csf.quadratic_structure", "argmin_v Z = -kappa_s/kappa", -vertex_err, 1e-10,
                                    {{"max_vertex_error", vertex_err}}));

  // Path energy on the configured flow.
  {
    const double th1 = 0.3, th2 = 2.5, t1 = 0.1 * T, t2 = 0.5 * T;
    std::vector<double> deltas;
    double rise = 0.0;
    for (std::size_t K : {25, 50, 100, 200}) {
      PathEnergyOptions po;
      po.time_steps = K;
      deltas.push_back(path_energy(hist, th1, t1, th2, t2, po).delta);
      if (deltas.size() > 1) rise = std::max(rise, deltas.back() - deltas[deltas.size() - 2]);
    }
    suite.checks.push_back(make_check("csf.path_energy_refinement", "Delta non-increasing under refinement",
                                      -std::max(rise, 0.0), 1e-8, {{"deltas", deltas}}));
    if (c.curve.preset != "generic") {
      PathEnergyOptions po;
      po.time_steps = 100;
      const double a = path_energy(hist, th1, t1, th2, t2, po).delta;
      const double b = path_energy(hist, 2 * kPi - th1, t1, 2 * kPi - th2, t2, po).delta;
      const double rel = std::abs(a - b) / std::max(a, 1e-300);
      suite.checks.push_back(make_check("csf.path_energy_symmetry", "Delta invariant under theta -> -theta", -rel, 1e-6,
                                        {{"delta", a}, {"reflected", b}}));
    }
  }
  {
    double worst = INFINITY, worst_budget = 0.0;
    bool all_ok = true;
    Csv csv(fs::path(out_dir) / "integrated_harnack.csv", {"theta1", "t1", "theta2", "t2", "delta", "gap", "budget"});
    PathEnergyOptions fine, coarse;
    fine.time_steps = 64;
    fine.angle_nodes = 64;
    coarse.time_steps = 32;
    coarse.angle_nodes = 64;
    for (int k = 0; k < 200; ++k) {
      double t1 = ut(rng), t2 = ut(rng);
      if (t1 > t2) std::swap(t1, t2);
      if (t2 - t1 < 1e-3) t2 = std::min(t1 + 1e-3, t_hi);
      const double th1 = uth(rng), th2 = uth(rng);
      const IntegratedHarnack a = integrated_harnack_gap(hist, th1, t1, th2, t2, fine);
      const PathEnergy b = path_energy(hist, th1, t1, th2, t2, coarse);
      const double sens = 0.25 * a.H1 * std::sqrt(t1 / t2) * std::exp(-a.delta / 4.0);
      const double budget = sens * std::abs(a.delta - b.delta) + 1e-10;
      all_ok = all_ok && a.gap >= -budget;
      if (a.gap < worst) {
        worst = a.gap;
        worst_budget = budget;
      }
      csv.row({th1, t1, th2, t2, a.delta, a.gap, budget});
    }
    CheckResult r = make_check("csf.integrated_harnack", "H(x2,t2) >= H(x1,t1) sqrt(t1/t2) exp(-Delta/4)", worst,
                               worst_budget, {{"tuples", 200}, {"lattice", "64x64"}});
    r.pass = r.pass && all_ok;
    suite.checks.push_back(r);
  }
  return suite;
}

// -------------------------------------------------------------- expander

SuiteResult run_expander_suite(const ExperimentConfig& c, const std::string& out_dir) {
  SuiteResult suite;
  suite.suite = "expander";
  const Tolerances& tol = c.tolerances;
  const SupportCurve curve = configured_curve(c);
  const double L = c.grid.L > 0.0 ? c.grid.L : default_box(curve);
  const std::size_t n = c.grid.resolution;
  const std::vector<double> Ns = or_default(c.N_sequence, {1, 5, 20});

  const Gauge mu(curve);
  {
    const CurveSlice slice(curve.samples());
    double err = 0.0;
    for (std::size_t j = 0; j < curve.size(); ++j) err = std::max(err, std::abs(mu(slice.point(curve.angle(j)).position) - 1.0));
    suite.checks.push_back(make_check("expander.gauge_on_curve", "mu = 1 on M0", -err, 1e-10, {{"max_error", err}}));
  }

  const double C = 1.0 / mu.min_support();
  ExpanderResult last;
  {
    Csv csv(fs::path(out_dir) / "expander_bounds.csv",
            {"N", "lipschitz_cone", "lipschitz_expander", "min_expander", "min_bound", "d", "boundary_gap", "apex_gap"});
    for (double N : Ns) {
      ExpanderResult ex = compute_expander(curve, N, L, n);
      const ExpanderValidation& v = ex.validation;
      const std::string tag = "[N=" + json(N).dump() + "]";
      const double dx = ex.cone.spacing();
      suite.checks.push_back(make_check("expander.cone_lipschitz" + tag, "Lip(f_N) <= C(M0) N", C * N - v.lipschitz_cone,
                                        1e-9 * N, {{"lipschitz", v.lipschitz_cone}, {"bound", C * N}}));
      const double straight = cone_straightness_defect(ex.cone);
      suite.checks.push_back(make_check("expander.cone_straight" + tag, "<z, nu> = 0 on the cone", -straight, N * dx,
                                        {{"max_defect", straight}}));
      suite.checks.push_back(make_check("expander.lipschitz" + tag, "sup |D v~_N| <= Lip(f_N)",
                                        v.lipschitz_cone - v.lipschitz_expander, v.lipschitz_tolerance,
                                        {{"lipschitz_cone", v.lipschitz_cone}, {"lipschitz_expander", v.lipschitz_expander}}));
      suite.checks.push_back(make_check("expander.min_bound" + tag, "min v~_N <= sqrt(2(n+1)) N / d(M0)",
                                        v.min_bound - v.min_value, 0.0,
                                        {{"min", v.min_value}, {"bound", v.min_bound}, {"d", v.d}}));
      suite.checks.push_back(make_check("expander.asymptotic" + tag, "v~_N - f_N -> 0 toward infinity",
                                        v.interior_gap - v.boundary_gap, 0.0,
                                        {{"boundary_gap", v.boundary_gap}, {"apex_gap", v.interior_gap}}));
      const GridField sq = squash(ex.expander, N);
      const double ratio = sq.lipschitz() * N / ex.expander.lipschitz();
      suite.checks.push_back(make_check("expander.squash_scaling" + tag, "Lip(v~_N / N) = Lip(v~_N) / N",
                                        -std::abs(ratio - 1.0), 1e-12, {{"ratio", ratio}}));
      csv.row({N, v.lipschitz_cone, v.lipschitz_expander, v.min_value, v.min_bound, v.d, v.boundary_gap, v.interior_gap});
      last = std::move(ex);
    }
  }
  const fs::path grid_file = fs::path(out_dir) / (c.grid.format == "bin" ? "gridfield.bin" : "gridfield.csv");
  if (c.grid.format == "bin") {
    last.expander.write_binary(grid_file);
  } else {
    last.expander.write_csv(grid_file);
  }

  {
    const double Lc = default_box(make_curve(CirclePreset{1.0}));
    const RadialProfile prof = radial_expander(1.0, Lc * std::sqrt(2.0) * 1.01);
    const double res = prof.max_residual(0.05, prof.r_max());
    suite.checks.push_back(make_check("expander.radial_residual", "H + <x, nu>/2 = 0 (rotational)", -res,
                                      tol.radial_residual, {{"max_residual", res}, {"apex", prof.a}, {"N", 1.0}}));
    const ExpanderResult ex = compute_expander(make_curve(CirclePreset{1.0}), 1.0, Lc, n);
    const GridField rf = radial_field(prof, Lc, n);
    double sup = 0.0;
    for (std::size_t k = 0; k < rf.values().size(); ++k) sup = std::max(sup, std::abs(rf.values()[k] - ex.expander.values()[k]));
    suite.checks.push_back(make_check("expander.radial_agreement", "grid expander = rotational expander", -sup,
                                      2.0 * rf.spacing(), {{"sup_distance", sup}}));
    Csv csv(fs::path(out_dir) / "radial_profile.csv", {"r", "u", "u_r", "residual"});
    for (std::size_t i = 1; i + 1 < prof.r.size(); i += 10) csv.row({prof.r[i], prof.u[i], prof.u_r[i], prof.residual(prof.r[i])});
  }

  {
    const GridField cone = squash(build_cone(curve, 1.0, L, n), 1.0);
    GridField start = cone;
    start.set_boundary(BoundaryKind::linear_extension);
    GraphFlowOptions go;
    go.reference = [&mu](double x, double y) { return mu(Vec2(x, y)); };
    const auto snaps = graphical_flow_snapshots(start, 1.0, {0.25, 0.5, 1.0}, go);
    const double d1 = self_similarity_defect(snaps[0], 0.25, snaps[2], 0.25 * L);
    const double d2 = self_similarity_defect(snaps[1], 0.5, snaps[2], 0.25 * L);
    const double worst = std::max(d1, d2);
    suite.checks.push_back(make_check("expander.self_similarity", "V(x,s) = sqrt(s) V(x/sqrt(s), 1)", -worst,
                                      cone.spacing(), {{"defect_s0.25", d1}, {"defect_s0.5", d2}}));
  }

  {
    const FlowHistory hist = configured_flow(c, curve);
    const LimitComparison lc = limit_comparison(curve, hist, c.limit_N, L, n);
    {
      Csv csv(fs::path(out_dir) / "limit_distance.csv", {"N", "sup_distance", "grid_tolerance"});
      for (std::size_t k = 0; k < lc.N.size(); ++k) csv.row({lc.N[k], lc.sup_distance[k], lc.grid_tolerance});
    }
    {
      Csv csv(fs::path(out_dir) / "level_sets.csv", {"alpha", "x0", "y0", "x1", "y1"});
      for (const auto& ls : lc.level_sets) {
        const Polyline seg = contour_segments(lc.track.field, ls.alpha);
        for (std::size_t k = 0; k + 1 < seg.size(); k += 2) csv.row({ls.alpha, seg[k].x(), seg[k].y(), seg[k + 1].x(), seg[k + 1].y()});
      }
    }
    const fs::path track_file = fs::path(out_dir) / (c.grid.format == "bin" ? "track_gridfield.bin" : "track_gridfield.csv");
    if (c.grid.format == "bin") {
      lc.track.field.write_binary(track_file);
    } else {
      lc.track.field.write_csv(track_file);
    }
    CheckResult dec = make_check("expander.limit_decreasing", "v_N -> v_inf locally uniformly",
                                 lc.sup_distance.front() - lc.sup_distance.back(), 0.0,
                                 {{"N", lc.N}, {"sup_distance", lc.sup_distance}});
    dec.pass = dec.pass && lc.decreasing;
    suite.checks.push_back(dec);
    suite.checks.push_back(make_check("expander.limit_small", "v_N -> v_inf locally uniformly", -lc.sup_distance.back(),
                                      5.0 * lc.grid_tolerance, {{"sub_box", lc.sub_box}}));
    json levels = json::array();
    for (const auto& ls : lc.level_sets)
      levels.push_back({{"alpha", ls.alpha}, {"hausdorff", ls.hausdorff}, {"hausdorff_expander", ls.hausdorff_expander}});
    CheckResult lv = make_check("expander.level_sets", "{v_inf = alpha} = alpha M_{alpha^-2}", -lc.max_hausdorff,
                                2.0 * lc.grid_tolerance, {{"levels", levels}});
    lv.pass = lv.pass && lc.level_sets_ok;
    suite.checks.push_back(lv);

    // Gamma_N: Z / (sqrt(t) h(W,W)) is a single constant sigma_N -> 1.
    std::vector<SigmaFit> fits;
    Csv csv(fs::path(out_dir) / "sigma.csv", {"N", "sigma", "spread", "max_residual", "N_times_residual"});
    for (double N : c.sigma_N) {
      fits.push_back(fit_sigma(hist, N, 16, 10, 5, 0.05 * extinction_time(curve), 0.45 * extinction_time(curve), 2.0));
      const SigmaFit& f = fits.back();
      csv.row({N, f.sigma, f.spread, f.max_residual, N * f.max_residual});
    }
    const auto at50 = std::find_if(fits.begin(), fits.end(), [](const SigmaFit& f) { return f.N == 50.0; });
    const SigmaFit& ref = at50 != fits.end() ? *at50 : fits.back();
    suite.checks.push_back(make_check("expander.sigma_constant", "h(V + d/dt, V + d/dt) = Z(V,V) / (sigma_N sqrt(t))",
                                      -ref.spread, tol.sigma_spread, {{"N", ref.N}, {"sigma", ref.sigma}, {"samples", ref.samples}}));
    bool trend = true;
    json sig = json::array();
    for (std::size_t k = 0; k < fits.size(); ++k) {
      sig.push_back({{"N", fits[k].N}, {"sigma", fits[k].sigma}});
      if (k > 0) trend = trend && std::abs(fits[k].sigma - 1.0) < std::abs(fits[k - 1].sigma - 1.0);
    }
    CheckResult st = make_check("expander.sigma_limit", "sigma_N -> 1", -std::abs(fits.back().sigma - 1.0),
                                tol.sigma_final, {{"fits", sig}, {"monotone", trend}});
    st.pass = st.pass && trend;
    suite.checks.push_back(st);
    const double ratio = (fits.back().N * fits.back().max_residual) / (fits.front().N * fits.front().max_residual);
    suite.checks.push_back(make_check("expander.residual_bounded", "N |E_N| bounded", tol.residual_ratio - ratio, 0.0,
                                      {{"ratio", ratio}, {"first", fits.front().N * fits.front().max_residual},
                                       {"last", fits.back().N * fits.back().max_residual}}));
  }
  return suite;
}

// ----------------------------------------------------------------- chain

SuiteResult run_chain_suite(const ExperimentConfig& c, const std::string& out_dir) {
  SuiteResult suite;
  suite.suite = "chain";
  ChainOptions opt;
  opt.L = c.grid.L;
  opt.resolution = c.grid.resolution;
  opt.flow_dt = c.flow.dt;
  const std::vector<double> samples = curve_samples(c);
  const ChainReport rep = convexity_chain(samples, or_default(c.N_sequence, {5, 20}), opt);
  Csv csv(fs::path(out_dir) / "chain.csv", {"link", "evaluated", "margin", "budget", "slack", "pass"});
  for (const auto& l : rep.links) {
    csv.row({double(l.index), double(l.evaluated), l.margin, l.budget, l.slack, double(l.passed)});
    CheckResult r = make_check("chain.link" + std::to_string(l.index) + "." + l.name, l.statement, l.slack, 0.0, l);
    r.margin = l.margin;
    r.budget = l.budget;
    r.pass = l.evaluated && l.passed;
    suite.checks.push_back(std::move(r));
  }
  return suite;
}

// ------------------------------------------------------------------- run

RunResult run_experiment(const ExperimentConfig& c) {
  validate(c);
  const bool need_flow = c.experiment != "chain" && c.experiment != "heat";
  if (need_flow) {
    try {
      (void)configured_curve(c);
    } catch (const InvalidCurveError& e) {
      throw ConfigError("curve.samples", e.what());
    }
  }
  fs::create_directories(c.output);
  const std::string out = c.output;
  const auto started = fs::file_time_type::clock::now() - std::chrono::seconds(1);

  std::vector<std::pair<std::string, SuiteResult (*)(const ExperimentConfig&, const std::string&)>> plan;
  if (c.experiment == "heat" || c.experiment == "all") plan.emplace_back("heat", run_heat_suite);
  if (c.experiment == "csf" || c.experiment == "all") plan.emplace_back("csf", run_csf_suite);
  if (c.experiment == "expander" || c.experiment == "all") plan.emplace_back("expander", run_expander_suite);
  if (c.experiment == "chain" || c.experiment == "all") plan.emplace_back("chain", run_chain_suite);

  RunResult result;
  for (const auto& [name, fn] : plan) {
    Stopwatch sw;
    SuiteResult s;
    try {
      s = fn(c, out);
    } catch (const std::exception& e) {
      s.suite = name;
      CheckResult r = make_check(name + ".error", "numerical failure", -INFINITY, 0.0, {{"message", e.what()}});
      r.pass = false;
      s.checks.push_back(r);
    }
    s.seconds = sw.seconds();
    result.suites.push_back(std::move(s));
  }

  json suites = json::array();
  result.pass = true;
  for (const auto& s : result.suites) {
    json checks = json::array();
    for (const auto& k : s.checks) {
      checks.push_back({{"name", k.name},
                        {"anchor", k.anchor},
                        {"margin", k.margin},
                        {"budget", k.budget},
                        {"verdict", k.pass ? "pass" : "fail"},
                        {"details", k.details}});
    }
    json e = {{"suite", s.suite}, {"pass", s.pass()}, {"checks", checks}};
    if (!c.stable_output) e["seconds"] = s.seconds;
    suites.push_back(std::move(e));
    result.pass = result.pass && s.pass();
  }
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(out))
    if (entry.is_regular_file() && entry.path().filename() != "report.json" && entry.last_write_time() >= started)
      files.push_back(entry.path().filename().string());
  std::sort(files.begin(), files.end());
  result.report = {{"tool", "harnack-lab"},  {"schema_version", 1},    {"experiment", c.experiment},
                   {"seed", c.seed},         {"config", config_to_json(c)}, {"suites", suites},
                   {"pass", result.pass},    {"files", files}};
  std::ofstream os(fs::path(out) / "report.json");
  os << result.report.dump(2) << '\n';
  return result;
}

}  // namespace harnack
