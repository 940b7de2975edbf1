#include "harnack/expander_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace harnack {

namespace {

double report_slack(const ConvexityReport& r) {
  double s = r.min_margin + r.tolerance_budget;
  if (r.has_midpoint) s = std::min(s, r.midpoint_min_margin + r.midpoint_budget);
  return s;
}

std::string label_for(double N) {
  std::ostringstream os;
  os << "N=" << N;
  return os.str();
}

void settle(ChainLink& link) {
  link.evaluated = true;
  link.slack = std::numeric_limits<double>::infinity();
  link.passed = !link.reports.empty();
  for (const auto& [label, r] : link.reports) {
    const double s = report_slack(r);
    if (s < link.slack) {
      link.slack = s;
      link.margin = r.has_midpoint ? std::min(r.min_margin, r.midpoint_min_margin) : r.min_margin;
      link.budget = r.tolerance_budget;
    }
    link.passed = link.passed && r.passed;
  }
  link.passed = link.passed && link.slack > 0.0;
}

ChainLink make_link(int index, std::string name, std::string statement) {
  ChainLink l;
  l.index = index;
  l.name = std::move(name);
  l.statement = std::move(statement);
  return l;
}

}  // namespace

ChainReport convexity_chain(std::span<const double> samples, const std::vector<double>& N_sequence,
                            const ChainOptions& opt) {
  ChainReport rep;
  rep.links = {
      make_link(1, "curve", "initial curve is convex"),
      make_link(2, "cone", "cone over the curve is convex"),
      make_link(3, "expander", "self-expander over the cone is convex"),
      make_link(4, "squashed", "squashed expander v_N is convex"),
      make_link(5, "limit", "limit v_inf is convex"),
      make_link(6, "track", "space-time track is convex"),
      make_link(7, "canonical", "canonical self-expander Gamma_N is convex"),
      make_link(8, "harnack", "Z(V,V) >= 0"),
  };
  auto finish = [&]() {
    rep.passed = true;
    rep.first_failure = 0;
    for (const auto& l : rep.links) {
      if (!(l.evaluated && l.passed)) {
        rep.passed = false;
        if (rep.first_failure == 0) rep.first_failure = l.index;
      }
    }
    return rep;
  };

  ChainLink& l1 = rep.links[0];
  l1.reports.emplace_back("curve", curve_convexity(samples));
  settle(l1);
  if (!l1.passed) return finish();

  const SupportCurve curve = SupportCurve::from_samples(std::vector<double>(samples.begin(), samples.end()));
  const double L = opt.L > 0.0 ? opt.L : default_box(curve);
  const double T = extinction_time(curve);
  FlowOptions fo;
  fo.dt = opt.flow_dt;
  const FlowHistory history = run_flow(curve, fo.stop_fraction * T, fo);

  GridConvexityOptions cone_opt;
  GridConvexityOptions smooth_opt;
  smooth_opt.apex_cells = 0;
  for (double N : N_sequence) {
    const ExpanderResult ex = compute_expander(curve, N, L, opt.resolution);
    rep.links[1].reports.emplace_back(label_for(N), grid_convexity(ex.cone, cone_opt));
    rep.links[2].reports.emplace_back(label_for(N), grid_convexity(ex.expander, smooth_opt));
    rep.links[3].reports.emplace_back(label_for(N), grid_convexity(squash(ex.expander, N), smooth_opt));
  }
  settle(rep.links[1]);
  settle(rep.links[2]);
  settle(rep.links[3]);

  const SpaceTimeTrack track = spacetime_track(history, L, opt.resolution);
  GridConvexityOptions track_opt = smooth_opt;
  track_opt.mask = track.covered_mask();
  rep.links[4].reports.emplace_back("v_inf", grid_convexity(track.field, track_opt));
  settle(rep.links[4]);

  std::vector<std::array<double, 2>> lattice;
  const double t_lo = opt.t_lo_fraction * T, t_hi = opt.t_hi_fraction * T;
  for (std::size_t jt = 0; jt < opt.lattice_t; ++jt) {
    const double t = opt.lattice_t > 1 ? t_lo + (t_hi - t_lo) * double(jt) / double(opt.lattice_t - 1) : t_lo;
    for (std::size_t jth = 0; jth < opt.lattice_theta; ++jth)
      lattice.push_back({2.0 * std::numbers::pi * double(jth) / double(opt.lattice_theta), t});
  }
  rep.links[5].reports.emplace_back("Gamma_1", surface_convexity(SpaceTimeSurface(history, 1.0).parametric(), lattice));
  settle(rep.links[5]);
  for (double N : N_sequence) {
    rep.links[6].reports.emplace_back(label_for(N),
                                      surface_convexity(SpaceTimeSurface(history, N).parametric(), lattice));
  }
  settle(rep.links[6]);

  const HarnackLattice z = harnack_lattice(history, opt.z_theta, opt.z_t, t_lo, t_hi);
  ChainLink& l8 = rep.links[7];
  l8.evaluated = true;
  l8.margin = z.Z_min;
  l8.budget = z.budget;
  l8.slack = z.Z_min + z.budget;
  // Strict: the raw lattice minimum itself must be positive.
  l8.passed = z.Z_min > 0.0;
  return finish();
}

void to_json(nlohmann::json& j, const ChainLink& l) {
  j = nlohmann::json{{"index", l.index},   {"name", l.name},     {"statement", l.statement},
                     {"evaluated", l.evaluated}, {"margin", l.margin}, {"budget", l.budget},
                     {"slack", l.slack},   {"pass", l.passed}};
  nlohmann::json reports = nlohmann::json::array();
  for (const auto& [label, r] : l.reports) {
    nlohmann::json e = r;
    e["label"] = label;
    reports.push_back(std::move(e));
  }
  j["reports"] = std::move(reports);
}

void to_json(nlohmann::json& j, const ChainReport& r) {
  j = nlohmann::json{{"pass", r.passed}, {"first_failure", r.first_failure}, {"links", r.links}};
}

}  // namespace harnack
