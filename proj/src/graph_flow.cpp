#include "harnack/errors.hpp"
#include "harnack/expander_lab.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>

namespace harnack {

namespace {

// Field with one ghost layer, index (i + 1, j + 1).
class Padded {
 public:
  explicit Padded(const GridField& f) : n_(f.resolution()), w_(n_ + 2), v_(w_ * w_, 0.0) {
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t i = 0; i < n_; ++i) at(long(i), long(j)) = f.at(i, j);
  }
  double& at(long i, long j) { return v_[std::size_t(j + 1) * w_ + std::size_t(i + 1)]; }
  double at(long i, long j) const { return v_[std::size_t(j + 1) * w_ + std::size_t(i + 1)]; }

  // Ghost layer from linear extrapolation of v - ref (ref padded too).
  void extrapolate(const Padded* ref) {
    const long n = long(n_);
    auto r = [&](long i, long j) { return ref ? ref->at(i, j) : 0.0; };
    auto ex = [&](long gi, long gj, long i0, long j0, long i1, long j1) {
      at(gi, gj) = r(gi, gj) + 2 * (at(i0, j0) - r(i0, j0)) - (at(i1, j1) - r(i1, j1));
    };
    for (long j = 0; j < n; ++j) {
      ex(-1, j, 0, j, 1, j);
      ex(n, j, n - 1, j, n - 2, j);
    }
    for (long i = -1; i <= n; ++i) {
      ex(i, -1, i, 0, i, 1);
      ex(i, n, i, n - 1, i, n - 2);
    }
  }

  void copy_to(GridField& f) const {
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t i = 0; i < n_; ++i) f.at(i, j) = at(long(i), long(j));
  }

 private:
  std::size_t n_, w_;
  std::vector<double> v_;
};

class GraphFlow {
 public:
  GraphFlow(const GridField& field, double eps, const GraphFlowOptions& opt)
      : field_(field), cur_(field), next_(field), eps2_(eps * eps) {
    if (!(eps >= 0.0)) throw std::invalid_argument("graphical_flow: N_inv must be nonnegative");
    const double dx = field.spacing();
    ds_ = opt.ds > 0.0 ? opt.ds : 0.2 * dx * dx;
    if (ds_ > 0.25 * dx * dx) throw std::invalid_argument("graphical_flow: ds exceeds dx^2 / 4");
    floor_ = eps == 0.0 ? opt.degenerate_floor : 0.0;
    if (opt.reference) {
      ref_.emplace(field);
      const long n = long(field.resolution());
      for (long j = -1; j <= n; ++j)
        for (long i = -1; i <= n; ++i)
          ref_->at(i, j) = opt.reference(-field.L() + dx * double(i), -field.L() + dx * double(j));
    }
    scale_ = 1.0;
    for (double v : field.values()) scale_ = std::max(scale_, std::abs(v));
  }

  void advance(double s_end) {
    if (s_end < s_) throw std::invalid_argument("graphical_flow: times must ascend");
    const double span = s_end - s_;
    if (span <= 0.0) return;
    const long steps = long(std::ceil(span / ds_ - 1e-9));
    const double ds = span / double(steps);
    const long n = long(field_.resolution());
    const double dx = field_.spacing();
    const double inv_dx2 = 1.0 / (dx * dx);
    const bool extend = field_.boundary() == BoundaryKind::linear_extension;
    const long lo = extend ? 0 : 1;
    const long hi = extend ? n : n - 1;
    for (long k = 0; k < steps; ++k) {
      if (extend) cur_.extrapolate(ref_ ? &*ref_ : nullptr);
      double worst = 0.0;
      for (long j = lo; j < hi; ++j) {
        for (long i = lo; i < hi; ++i) {
          const double c = cur_.at(i, j);
          const double vx = 0.5 * (cur_.at(i + 1, j) - cur_.at(i - 1, j)) / dx;
          const double vy = 0.5 * (cur_.at(i, j + 1) - cur_.at(i, j - 1)) / dx;
          const double vxx = (cur_.at(i + 1, j) - 2 * c + cur_.at(i - 1, j)) * inv_dx2;
          const double vyy = (cur_.at(i, j + 1) - 2 * c + cur_.at(i, j - 1)) * inv_dx2;
          const double vxy = 0.25 * (cur_.at(i + 1, j + 1) - cur_.at(i + 1, j - 1) - cur_.at(i - 1, j + 1) +
                                     cur_.at(i - 1, j - 1)) *
                             inv_dx2;
          const double denom = eps2_ + vx * vx + vy * vy + floor_;
          double rate = vxx + vyy;
          if (denom > 0.0) rate -= (vxx * vx * vx + 2 * vxy * vx * vy + vyy * vy * vy) / denom;
          const double v = c + ds * rate;
          next_.at(i, j) = v;
          worst = std::max(worst, std::abs(v));
        }
      }
      ++step_;
      if (!std::isfinite(worst) || worst > 1e6 * scale_) {
        throw InstabilityError("graphical_flow: values blew up", step_);
      }
      for (long j = lo; j < hi; ++j)
        for (long i = lo; i < hi; ++i) cur_.at(i, j) = next_.at(i, j);
    }
    s_ = s_end;
  }

  GridField result() const {
    GridField out = field_;
    cur_.copy_to(out);
    return out;
  }

 private:
  GridField field_;
  Padded cur_, next_;
  std::optional<Padded> ref_;
  double eps2_;
  double ds_ = 0.0;
  double floor_ = 0.0;
  double scale_ = 1.0;
  double s_ = 0.0;
  long step_ = 0;
};

}  // namespace

GridField graphical_flow(const GridField& field, double N_inv, double s_end, const GraphFlowOptions& options) {
  if (!(s_end >= 0.0)) throw std::invalid_argument("graphical_flow: s_end must be nonnegative");
  GraphFlow flow(field, N_inv, options);
  flow.advance(s_end);
  return flow.result();
}

std::vector<GridField> graphical_flow_snapshots(const GridField& field, double N_inv,
                                                const std::vector<double>& times,
                                                const GraphFlowOptions& options) {
  GraphFlow flow(field, N_inv, options);
  std::vector<GridField> out;
  for (double s : times) {
    flow.advance(s);
    out.push_back(flow.result());
  }
  return out;
}

double self_similarity_defect(const GridField& at_s, double s, const GridField& at_one, double sub_box) {
  const double root = std::sqrt(s);
  double worst = 0.0;
  for (std::size_t j = 0; j < at_s.resolution(); ++j) {
    for (std::size_t i = 0; i < at_s.resolution(); ++i) {
      const Vec2 x(at_s.coord(i), at_s.coord(j));
      if (std::abs(x.x()) > sub_box || std::abs(x.y()) > sub_box) continue;
      const Vec2 y = x / root;
      if (!at_one.contains(y)) continue;
      worst = std::max(worst, std::abs(at_s.at(i, j) - root * at_one.interpolate(y)));
    }
  }
  return worst;
}

ExpanderResult compute_expander(const SupportCurve& curve, double N, double L, std::size_t resolution,
                                BoundaryKind boundary, const GraphFlowOptions& options) {
  ExpanderResult out;
  out.cone = build_cone(curve, N, L, resolution);
  GridField start = squash(out.cone, N);
  start.set_boundary(boundary);
  GraphFlowOptions opt = options;
  if (!opt.reference) {
    const auto mu = std::make_shared<Gauge>(curve);
    opt.reference = [mu](double x, double y) { return (*mu)(Vec2(x, y)); };
  }
  GridField v = graphical_flow(start, 1.0 / N, 1.0, opt);
  for (double& x : v.values()) x *= N;
  v.set_N(N);
  out.expander = std::move(v);

  ExpanderValidation& val = out.validation;
  const double dx = out.cone.spacing();
  val.lipschitz_cone = out.cone.lipschitz();
  val.lipschitz_expander = out.expander.lipschitz();
  val.lipschitz_tolerance = 2.0 * N * dx;
  val.lipschitz_ok = val.lipschitz_expander <= val.lipschitz_cone + val.lipschitz_tolerance;
  val.min_value = out.expander.min_value();
  val.d = sphere_barrier(curve);
  val.min_bound = std::sqrt(2.0 * 2.0) * N / val.d;
  val.min_ok = val.min_value <= val.min_bound;
  const std::size_t n = resolution;
  double edge = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (auto [i, j] : {std::pair{k, std::size_t(0)}, {k, n - 1}, {std::size_t(0), k}, {n - 1, k}}) {
      edge = std::max(edge, std::abs(out.expander.at(i, j) - out.cone.at(i, j)));
    }
  }
  val.boundary_gap = edge;
  val.interior_gap = std::abs(out.expander.at(n / 2, n / 2) - out.cone.at(n / 2, n / 2));
  val.asymptotics_ok = val.boundary_gap < val.interior_gap;
  return out;
}

}  // namespace harnack
