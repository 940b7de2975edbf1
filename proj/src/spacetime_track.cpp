#include "harnack/expander_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace harnack {

std::vector<std::uint8_t> SpaceTimeTrack::covered_mask() const {
  std::vector<std::uint8_t> m(flags.size());
  for (std::size_t k = 0; k < flags.size(); ++k) m[k] = flags[k] == std::uint8_t(TrackFlag::covered);
  return m;
}

namespace {

// g(t) = max_theta <y, n> - t^{-1/2} h(theta, t), increasing in t.
struct Excess {
  double g;
  double dg;
};

Excess excess(const CurveSlice& slice, const Vec2& y, double t) {
  const double s = 1.0 / std::sqrt(t);
  const auto [g, th] = slice.support_excess_argmax(y, s);
  const CurvePoint p = slice.point(th);
  // Envelope theorem; h_t = -kappa at fixed theta.
  return {g, 0.5 * s * s * s * p.h + s * p.kappa};
}

}  // namespace

SpaceTimeTrack spacetime_track(const FlowHistory& history, double L, std::size_t resolution) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < history.size(); ++k)
    if (history.snapshot(k).t > 0.0) idx.push_back(k);
  if (idx.size() < 2) throw std::invalid_argument("spacetime_track: history needs two positive times");
  std::vector<CurveSlice> slices;
  std::vector<double> times;
  for (std::size_t k : idx) {
    slices.emplace_back(history.snapshot(k).h);
    times.push_back(history.snapshot(k).t);
  }
  const SupportCurve initial = SupportCurve::from_samples(history.snapshot(0).h);
  const Gauge mu(initial);

  SpaceTimeTrack out;
  out.field = GridField(L, resolution, BoundaryKind::linear_extension, 1.0);
  out.flags.assign(resolution * resolution, std::uint8_t(TrackFlag::covered));
  out.alpha_min = 1.0 / std::sqrt(times.back());
  out.alpha_max = 1.0 / std::sqrt(times.front());
  const std::size_t last = times.size() - 1;

  for (std::size_t j = 0; j < resolution; ++j) {
    for (std::size_t i = 0; i < resolution; ++i) {
      const Vec2 y(out.field.coord(i), out.field.coord(j));
      const std::size_t node = j * resolution + i;
      auto g_at = [&](std::size_t k) { return slices[k].support_excess(y, 1.0 / std::sqrt(times[k])); };
      if (g_at(0) > 0.0) {
        out.field.at(i, j) = mu(y);
        out.flags[node] = std::uint8_t(TrackFlag::exterior);
        ++out.exterior;
        continue;
      }
      if (g_at(last) < 0.0) {
        out.field.at(i, j) = out.alpha_min;
        out.flags[node] = std::uint8_t(TrackFlag::interior);
        ++out.interior;
        continue;
      }
      std::size_t lo = 0, hi = last;
      while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (g_at(mid) <= 0.0 ? lo : hi) = mid;
      }
      // Safeguarded Newton on exact (interpolated) slices.
      double a = times[lo], b = times[hi];
      const Excess ea = excess(slices[lo], y, a), eb = excess(slices[hi], y, b);
      double t = a - ea.g * (b - a) / (eb.g - ea.g);
      if (!(t > a && t < b)) t = 0.5 * (a + b);
      for (int it = 0; it < 30; ++it) {
        const Excess e = excess(history.slice(t), y, t);
        if (e.g == 0.0) break;
        (e.g < 0.0 ? a : b) = t;
        double next = t - e.g / e.dg;
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        const bool done = std::abs(next - t) < 1e-14 * t;
        t = next;
        if (done || b - a < 1e-15) break;
      }
      out.field.at(i, j) = 1.0 / std::sqrt(t);
    }
  }
  return out;
}

Polyline contour_segments(const GridField& f, double level) {
  Polyline out;
  const std::size_t n = f.resolution();
  auto cross = [&](std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1) {
    const double a = f.at(i0, j0) - level, b = f.at(i1, j1) - level;
    const double s = a / (a - b);
    return Vec2(f.coord(i0) + s * (f.coord(i1) - f.coord(i0)), f.coord(j0) + s * (f.coord(j1) - f.coord(j0)));
  };
  for (std::size_t j = 0; j + 1 < n; ++j) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      // Corners counter-clockwise: (i,j) (i+1,j) (i+1,j+1) (i,j+1).
      const std::array<std::pair<std::size_t, std::size_t>, 4> c = {
          std::pair{i, j}, std::pair{i + 1, j}, std::pair{i + 1, j + 1}, std::pair{i, j + 1}};
      std::vector<Vec2> pts;
      for (int e = 0; e < 4; ++e) {
        const auto [i0, j0] = c[e];
        const auto [i1, j1] = c[(e + 1) % 4];
        const bool above0 = f.at(i0, j0) >= level, above1 = f.at(i1, j1) >= level;
        if (above0 != above1) pts.push_back(cross(i0, j0, i1, j1));
      }
      if (pts.size() == 2) {
        out.push_back(pts[0]);
        out.push_back(pts[1]);
      } else if (pts.size() == 4) {
        // Saddle: pair edges according to the centre value.
        const double centre = 0.25 * (f.at(i, j) + f.at(i + 1, j) + f.at(i + 1, j + 1) + f.at(i, j + 1));
        const bool first_above = f.at(i, j) >= level;
        if ((centre >= level) == first_above) {
          out.insert(out.end(), {pts[0], pts[1], pts[2], pts[3]});
        } else {
          out.insert(out.end(), {pts[0], pts[3], pts[1], pts[2]});
        }
      }
    }
  }
  return out;
}

namespace {

double point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double s = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + s * ab)).norm();
}

}  // namespace

double hausdorff_distance(const Polyline& segments, const Polyline& curve) {
  if (segments.size() < 2 || curve.size() < 2) return std::numeric_limits<double>::infinity();
  double d1 = 0.0;
  for (std::size_t k = 0; k + 1 < segments.size(); k += 2) {
    for (const Vec2& p : {segments[k], segments[k + 1], Vec2(0.5 * (segments[k] + segments[k + 1]))}) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t m = 0; m < curve.size(); ++m)
        best = std::min(best, point_segment(p, curve[m], curve[(m + 1) % curve.size()]));
      d1 = std::max(d1, best);
    }
  }
  double d2 = 0.0;
  for (const Vec2& p : curve) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < segments.size(); k += 2)
      best = std::min(best, point_segment(p, segments[k], segments[k + 1]));
    d2 = std::max(d2, best);
  }
  return std::max(d1, d2);
}

Polyline scaled_level_curve(const FlowHistory& history, double alpha) {
  const CurveSlice slice = history.slice(1.0 / (alpha * alpha));
  constexpr std::size_t kPoints = 1024;
  Polyline out(kPoints);
  for (std::size_t k = 0; k < kPoints; ++k) out[k] = alpha * slice.point(grid_angle(k, kPoints)).position;
  return out;
}

LimitComparison limit_comparison(const SupportCurve& curve, const FlowHistory& history,
                                 const std::vector<double>& N_sequence, double L, std::size_t resolution) {
  if (N_sequence.empty()) throw std::invalid_argument("limit_comparison: empty N sequence");
  LimitComparison out;
  out.track = spacetime_track(history, L, resolution);
  const GridField& vinf = out.track.field;
  out.grid_tolerance = vinf.spacing();
  out.sub_box = 0.5 * L;
  for (double N : N_sequence) {
    const ExpanderResult ex = compute_expander(curve, N, L, resolution);
    GridField vN = squash(ex.expander, N);
    double sup = 0.0;
    for (std::size_t j = 0; j < resolution; ++j) {
      for (std::size_t i = 0; i < resolution; ++i) {
        if (std::abs(vinf.coord(i)) > out.sub_box || std::abs(vinf.coord(j)) > out.sub_box) continue;
        if (out.track.flags[j * resolution + i] != std::uint8_t(TrackFlag::covered)) continue;
        sup = std::max(sup, std::abs(vN.at(i, j) - vinf.at(i, j)));
      }
    }
    out.N.push_back(N);
    out.sup_distance.push_back(sup);
    out.last_squashed = std::move(vN);
  }
  out.decreasing = true;
  for (std::size_t k = 1; k < out.sup_distance.size(); ++k)
    out.decreasing = out.decreasing && out.sup_distance[k] < out.sup_distance[k - 1];
  out.final_small = out.sup_distance.back() <= 5.0 * out.grid_tolerance;

  // Levels whose curves sit inside the sub-box.
  const auto h0 = curve.samples();
  const double a_lo = out.track.alpha_min * 1.05;
  const double a_hi = std::min(out.track.alpha_max, 0.9 * out.sub_box / *std::max_element(h0.begin(), h0.end()));
  constexpr int kLevels = 5;
  out.max_hausdorff = 0.0;
  for (int k = 0; k < kLevels && a_hi > a_lo; ++k) {
    LevelSetCheck c;
    c.alpha = a_lo * std::pow(a_hi / a_lo, double(k) / double(kLevels - 1));
    const Polyline exact = scaled_level_curve(history, c.alpha);
    c.hausdorff = hausdorff_distance(contour_segments(vinf, c.alpha), exact);
    c.hausdorff_expander = hausdorff_distance(contour_segments(out.last_squashed, c.alpha), exact);
    out.max_hausdorff = std::max(out.max_hausdorff, c.hausdorff);
    out.level_sets.push_back(c);
  }
  out.level_sets_ok = !out.level_sets.empty() && out.max_hausdorff <= 2.0 * out.grid_tolerance;
  return out;
}

}  // namespace harnack
