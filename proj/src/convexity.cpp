#include "harnack/convexity.hpp"

#include "harnack/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace harnack {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double min_eig(double xx, double xy, double yy) {
  const double m = 0.5 * (xx + yy);
  const double d = std::hypot(0.5 * (xx - yy), xy);
  return m - d;
}

}  // namespace

std::string to_string(ConvexityKind kind) {
  switch (kind) {
    case ConvexityKind::curve:
      return "curve";
    case ConvexityKind::grid_field:
      return "grid_field";
    case ConvexityKind::surface:
      return "surface";
  }
  return "unknown";
}

void to_json(nlohmann::json& j, const ConvexityReport& r) {
  j = nlohmann::json{{"kind", to_string(r.kind)},
                     {"min_margin", r.min_margin},
                     {"witness", r.witness},
                     {"tolerance_budget", r.tolerance_budget},
                     {"pass", r.passed},
                     {"points_checked", r.points_checked}};
  if (r.has_midpoint) {
    j["hessian_pass"] = r.hessian_passed;
    j["midpoint"] = {{"min_margin", r.midpoint_min_margin},
                     {"witness", r.midpoint_witness},
                     {"tolerance_budget", r.midpoint_budget},
                     {"pairs", r.pairs},
                     {"seed", r.seed},
                     {"pass", r.midpoint_passed}};
  }
}

ConvexityReport curve_convexity(std::span<const double> h) {
  const std::vector<double> r = radius_of_curvature(h);
  const auto it = std::min_element(r.begin(), r.end());
  ConvexityReport rep;
  rep.kind = ConvexityKind::curve;
  rep.min_margin = *it;
  rep.witness = {grid_angle(std::size_t(it - r.begin()), r.size())};
  rep.points_checked = r.size();
  rep.passed = rep.min_margin > 0.0;
  return rep;
}

ConvexityReport curve_convexity(const SupportCurve& curve) { return curve_convexity(curve.samples()); }

ConvexityReport grid_convexity(const GridField& f, const GridConvexityOptions& opt) {
  const std::size_t n = f.resolution();
  if (n < 5) throw std::invalid_argument("grid_convexity: resolution must be at least 5");
  if (!opt.mask.empty() && opt.mask.size() != n * n) {
    throw std::invalid_argument("grid_convexity: mask size does not match the grid");
  }
  const double dx = f.spacing();
  const std::size_t band = std::max<std::size_t>(opt.boundary_band, 2);
  double vmax = 0.0;
  for (double v : f.values()) vmax = std::max(vmax, std::abs(v));
  const double floor = 64.0 * kEps * std::max(vmax, 1.0) / (dx * dx);

  auto marked = [&](std::size_t i, std::size_t j) { return opt.mask.empty() || opt.mask[j * n + i]; };
  // Centre index of the apex; the box is symmetric so it is the middle node.
  const double c = 0.5 * double(n - 1);

  ConvexityReport rep;
  rep.kind = ConvexityKind::grid_field;
  rep.has_midpoint = true;
  rep.min_margin = std::numeric_limits<double>::infinity();
  double richardson = 0.0;

  auto lam = [&](std::size_t i, std::size_t j, std::size_t s) {
    const double h = dx * double(s);
    const double v = f.at(i, j);
    const double xx = (f.at(i + s, j) - 2 * v + f.at(i - s, j)) / (h * h);
    const double yy = (f.at(i, j + s) - 2 * v + f.at(i, j - s)) / (h * h);
    const double xy = (f.at(i + s, j + s) - f.at(i + s, j - s) - f.at(i - s, j + s) +
                       f.at(i - s, j - s)) /
                      (4 * h * h);
    return min_eig(xx, xy, yy);
  };

  for (std::size_t j = band; j + band < n; ++j) {
    for (std::size_t i = band; i + band < n; ++i) {
      if (opt.apex_cells > 0 && std::abs(double(i) - c) <= double(opt.apex_cells) &&
          std::abs(double(j) - c) <= double(opt.apex_cells)) {
        continue;
      }
      bool ok = true;
      for (long dj = -2; dj <= 2 && ok; ++dj)
        for (long di = -2; di <= 2 && ok; ++di) ok = marked(std::size_t(long(i) + di), std::size_t(long(j) + dj));
      if (!ok) continue;
      const double l1 = lam(i, j, 1);
      const double l2 = lam(i, j, 2);
      richardson = std::max(richardson, std::abs(l1 - l2) / 3.0);
      ++rep.points_checked;
      if (l1 < rep.min_margin) {
        rep.min_margin = l1;
        rep.witness = {f.coord(i), f.coord(j)};
      }
    }
  }
  if (rep.points_checked == 0) rep.min_margin = 0.0;
  rep.tolerance_budget = 2.0 * richardson + floor;
  rep.hessian_passed = rep.min_margin >= -rep.tolerance_budget;

  // Midpoint tier: pairs with even index offsets so the midpoint is a node.
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::size_t> pick(band, n - 1 - band);
  rep.seed = opt.seed;
  rep.midpoint_min_margin = std::numeric_limits<double>::infinity();
  std::size_t done = 0;
  for (std::size_t attempt = 0; done < opt.pairs && attempt < 20 * opt.pairs; ++attempt) {
    const std::size_t i1 = pick(rng), j1 = pick(rng), i2 = pick(rng), j2 = pick(rng);
    if ((i1 + i2) % 2 || (j1 + j2) % 2 || (i1 == i2 && j1 == j2)) continue;
    const std::size_t im = (i1 + i2) / 2, jm = (j1 + j2) / 2;
    const double d2 = (std::pow(double(i1) - double(i2), 2) + std::pow(double(j1) - double(j2), 2)) * dx * dx;
    const double gap = 0.5 * (f.at(i1, j1) + f.at(i2, j2)) - f.at(im, jm);
    const double m = gap / (d2 / 8.0);
    ++done;
    if (m < rep.midpoint_min_margin) {
      rep.midpoint_min_margin = m;
      rep.midpoint_witness = {f.coord(i1), f.coord(j1), f.coord(i2), f.coord(j2)};
    }
  }
  rep.pairs = done;
  if (done == 0) rep.midpoint_min_margin = 0.0;
  rep.midpoint_budget = rep.tolerance_budget;
  rep.midpoint_passed = rep.midpoint_min_margin >= -rep.midpoint_budget;
  rep.passed = rep.hessian_passed && rep.midpoint_passed;
  return rep;
}

ParametricSurface make_surface(std::function<Vec3(double, double)> map, double step_a,
                               double step_b, InsideHint inside) {
  return {std::move(map), [step_a, step_b](double, double) { return std::array<double, 2>{step_a, step_b}; },
          inside};
}

ParametricSurface graph_surface(const GridField& field) {
  const double dx = field.spacing();
  return make_surface(
      [field](double x, double y) { return Vec3(x, y, field.interpolate(Eigen::Vector2d(x, y))); }, dx, dx,
      InsideHint::direction(Vec3::UnitZ()));
}

SurfaceCurvature surface_curvature(const ParametricSurface& s, double a, double b, double ha, double hb) {
  const auto& F = s.map;
  const Vec3 p = F(a, b);
  const Vec3 pa_ = F(a + ha, b), ma_ = F(a - ha, b), pb_ = F(a, b + hb), mb_ = F(a, b - hb);
  const Vec3 Fa = (pa_ - ma_) / (2 * ha);
  const Vec3 Fb = (pb_ - mb_) / (2 * hb);
  const Vec3 Faa = (pa_ - 2 * p + ma_) / (ha * ha);
  const Vec3 Fbb = (pb_ - 2 * p + mb_) / (hb * hb);
  const Vec3 Fab = (F(a + ha, b + hb) - F(a + ha, b - hb) - F(a - ha, b + hb) + F(a - ha, b - hb)) / (4 * ha * hb);

  SurfaceCurvature out;
  out.point = p;
  out.metric << Fa.dot(Fa), Fa.dot(Fb), Fa.dot(Fb), Fb.dot(Fb);
  const double det = out.metric.determinant();
  if (!(det >= 1e-12)) throw DegenerateMetricError("surface_curvature: degenerate first fundamental form", det);
  Vec3 nu = Fa.cross(Fb).normalized();
  const Vec3 hint = s.inside.is_point ? Vec3(s.inside.vector - p) : s.inside.vector;
  if (nu.dot(hint) < 0.0) nu = -nu;
  out.normal = nu;
  out.sff << Faa.dot(nu), Fab.dot(nu), Fab.dot(nu), Fbb.dot(nu);
  // Shape operator eigenvalues: generalized problem sff v = k g v.
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(out.sff, out.metric);
  out.k_min = es.eigenvalues()(0);
  out.k_max = es.eigenvalues()(1);
  out.mean_curvature = out.k_min + out.k_max;
  return out;
}

SurfaceCurvature surface_curvature(const ParametricSurface& s, double a, double b) {
  const auto h = s.steps(a, b);
  return surface_curvature(s, a, b, h[0], h[1]);
}

double surface_sff(const ParametricSurface& s, double a, double b, double c_a, double c_b) {
  const SurfaceCurvature k = surface_curvature(s, a, b);
  const Eigen::Vector2d c(c_a, c_b);
  return c.dot(k.sff * c);
}

ConvexityReport surface_convexity(const ParametricSurface& s, std::span<const std::array<double, 2>> lattice) {
  ConvexityReport rep;
  rep.kind = ConvexityKind::surface;
  rep.min_margin = std::numeric_limits<double>::infinity();
  double richardson = 0.0, scale = 0.0;
  for (const auto& q : lattice) {
    const auto h = s.steps(q[0], q[1]);
    const SurfaceCurvature k1 = surface_curvature(s, q[0], q[1], h[0], h[1]);
    const SurfaceCurvature k2 = surface_curvature(s, q[0], q[1], 2 * h[0], 2 * h[1]);
    richardson = std::max(richardson, std::abs(k1.k_min - k2.k_min) / 3.0);
    scale = std::max(scale, std::abs(k1.k_max));
    ++rep.points_checked;
    if (k1.k_min < rep.min_margin) {
      rep.min_margin = k1.k_min;
      rep.witness = {q[0], q[1]};
    }
  }
  if (rep.points_checked == 0) rep.min_margin = 0.0;
  rep.tolerance_budget = 2.0 * richardson + 1e-9 * std::max(scale, 1.0);
  rep.passed = rep.min_margin >= -rep.tolerance_budget;
  return rep;
}

}  // namespace harnack
