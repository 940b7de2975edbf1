#include "harnack/csf_flow.hpp"

#include "harnack/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace harnack {

namespace {

using cplx = std::complex<double>;

class Fourier {
 public:
  explicit Fourier(std::size_t m) : m_(m), k2_(m) {
    for (std::size_t k = 0; k < m; ++k) {
      const double w = k <= m / 2 ? double(k) : double(k) - double(m);
      k2_[k] = w * w;
    }
  }

  std::vector<cplx> forward(const std::vector<double>& in) {
    std::vector<cplx> out;
    fft_.fwd(out, in);
    return out;
  }

  std::vector<double> inverse(const std::vector<cplx>& in) {
    std::vector<double> out;
    fft_.inv(out, in);
    return out;
  }

  double k2(std::size_t k) const { return k2_[k]; }
  std::size_t size() const { return m_; }

 private:
  std::size_t m_;
  std::vector<double> k2_;
  Eigen::FFT<double> fft_;
};

// -1 / (h'' + h) on the grid together with max kappa^2.
std::vector<double> speed(Fourier& f, const std::vector<double>& h, double& max_k2) {
  std::vector<cplx> hh = f.forward(h);
  for (std::size_t k = 0; k < f.size(); ++k) hh[k] *= (1.0 - f.k2(k));
  std::vector<double> r = f.inverse(hh);
  max_k2 = 0.0;
  for (double& v : r) {
    const double kappa = 1.0 / v;
    max_k2 = std::max(max_k2, kappa * kappa);
    v = -kappa;
  }
  return r;
}

void check_convex(const std::vector<double>& h, double t, double last_good) {
  const std::size_t m = h.size();
  for (double v : h) {
    if (!std::isfinite(v)) {
      throw ConvexityLossError("flow produced non-finite support values at t = " + std::to_string(t),
                               last_good);
    }
  }
  const std::vector<double> r = radius_of_curvature(h);
  for (std::size_t j = 0; j < m; ++j) {
    if (!(r[j] > 0.0) || !(h[j] > 0.0)) {
      std::ostringstream msg;
      msg << "convexity lost at t = " << t << ", theta = " << grid_angle(j, m)
          << " (h'' + h = " << r[j] << ")";
      throw ConvexityLossError(msg.str(), last_good);
    }
  }
}

FlowSnapshot make_snapshot(double t, const std::vector<double>& h) {
  FlowSnapshot s;
  s.t = t;
  s.h = h;
  const CurveSlice slice(h);
  std::vector<double> kappa, kt, ktt;
  slice.kappa_derivatives(kappa, kt, ktt);
  s.h_t.resize(h.size());
  s.h_tt.resize(h.size());
  for (std::size_t j = 0; j < h.size(); ++j) {
    s.h_t[j] = -kappa[j];
    s.h_tt[j] = -kappa[j] * kappa[j] * (ktt[j] + kappa[j]);
  }
  return s;
}

std::vector<double> semi_implicit_euler(Fourier& f, const std::vector<double>& h, double dt) {
  double c = 0.0;
  const std::vector<cplx> fh = f.forward(speed(f, h, c));
  std::vector<cplx> hh = f.forward(h);
  for (std::size_t k = 0; k < f.size(); ++k) hh[k] += dt * fh[k] / (1.0 + c * dt * f.k2(k));
  return f.inverse(hh);
}

std::vector<double> explicit_euler(Fourier& f, const std::vector<double>& h, double dt) {
  double c = 0.0;
  std::vector<double> v = speed(f, h, c);
  std::vector<double> out(h);
  for (std::size_t j = 0; j < h.size(); ++j) out[j] += dt * v[j];
  return out;
}

}  // namespace

double explicit_step_bound(const SupportCurve& curve) {
  const double r = CurveSlice(curve.samples()).min_radius();
  const double dth = grid_angle(1, curve.size());
  return 0.2 * r * r * dth * dth;
}

SupportCurve step_flow(const SupportCurve& curve, double dt, TimeScheme scheme) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_flow: dt must be positive");
  const std::vector<double> h(curve.samples().begin(), curve.samples().end());
  Fourier f(h.size());
  std::vector<double> next;
  if (scheme == TimeScheme::explicit_euler) {
    const double bound = explicit_step_bound(curve);
    if (dt > bound) {
      throw std::invalid_argument("step_flow: explicit dt = " + std::to_string(dt) +
                                  " exceeds stability bound " + std::to_string(bound));
    }
    next = explicit_euler(f, h, dt);
  } else {
    next = semi_implicit_euler(f, h, dt);
  }
  check_convex(next, dt, 0.0);
  return SupportCurve::from_samples(std::move(next));
}

double extinction_time(const SupportCurve& curve) {
  return CurveSlice(curve.samples()).area() / (2.0 * std::numbers::pi);
}

FlowHistory::FlowHistory(std::vector<FlowSnapshot> snapshots, double dt, std::string descriptor)
    : snapshots_(std::move(snapshots)), dt_(dt), descriptor_(std::move(descriptor)) {
  if (snapshots_.empty()) throw std::invalid_argument("FlowHistory: no snapshots");
}

std::vector<double> FlowHistory::support_at(double t) const {
  if (t < t_begin() - 1e-14 || t > t_end() + 1e-14) {
    throw std::out_of_range("FlowHistory: t = " + std::to_string(t) + " outside [" +
                            std::to_string(t_begin()) + ", " + std::to_string(t_end()) + "]");
  }
  if (snapshots_.size() == 1) return snapshots_.front().h;
  auto it = std::upper_bound(snapshots_.begin(), snapshots_.end(), t,
                             [](double v, const FlowSnapshot& s) { return v < s.t; });
  std::size_t i1 = static_cast<std::size_t>(it - snapshots_.begin());
  i1 = std::clamp<std::size_t>(i1, 1, snapshots_.size() - 1);
  const FlowSnapshot& a = snapshots_[i1 - 1];
  const FlowSnapshot& b = snapshots_[i1];
  const double H = b.t - a.t;
  const double s = std::clamp((t - a.t) / H, 0.0, 1.0);
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  const double p0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
  const double v0 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
  const double a0 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
  const double a1 = 0.5 * s3 - s4 + 0.5 * s5;
  const double v1 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
  const double p1 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
  std::vector<double> h(a.h.size());
  for (std::size_t j = 0; j < h.size(); ++j) {
    h[j] = p0 * a.h[j] + v0 * H * a.h_t[j] + a0 * H * H * a.h_tt[j] + a1 * H * H * b.h_tt[j] +
           v1 * H * b.h_t[j] + p1 * b.h[j];
  }
  return h;
}

FlowHistory run_flow(const SupportCurve& curve, double t_end, const FlowOptions& options) {
  if (!(options.dt > 0.0)) throw std::invalid_argument("run_flow: dt must be positive");
  if (!(t_end >= 0.0)) throw std::invalid_argument("run_flow: t_end must be >= 0");
  const double t_stop = options.stop_fraction * extinction_time(curve);
  if (t_end > t_stop) {
    throw std::invalid_argument("run_flow: t_end = " + std::to_string(t_end) + " exceeds " +
                                std::to_string(options.stop_fraction) + " * A0/(2 pi) = " +
                                std::to_string(t_stop));
  }
  std::vector<double> h(curve.samples().begin(), curve.samples().end());
  std::vector<FlowSnapshot> snaps{make_snapshot(0.0, h)};
  std::ostringstream desc;
  desc << "M=" << h.size() << " dt=" << options.dt;
  if (t_end == 0.0) return FlowHistory(std::move(snaps), options.dt, desc.str());

  const long steps = std::max(1L, static_cast<long>(std::ceil(t_end / options.dt - 1e-9)));
  const double dt = t_end / static_cast<double>(steps);
  const long stride = std::max(1L, std::lround(options.snapshot_spacing / dt));

  Fourier f(h.size());
  const std::size_t m = h.size();
  std::vector<double> prev;
  std::vector<cplx> prev_speed_hat;
  double t = 0.0;
  double last_good = 0.0;

  for (long n = 1; n <= steps; ++n) {
    std::vector<double> next;
    if (options.scheme == TimeScheme::explicit_euler) {
      const SupportCurve current = SupportCurve::from_samples(h);
      if (dt > explicit_step_bound(current)) {
        throw ConvexityLossError("explicit step exceeds the stability bound at t = " + std::to_string(t),
                                 last_good);
      }
      next = explicit_euler(f, h, dt);
    } else if (prev.empty()) {
      double c = 0.0;
      prev_speed_hat = f.forward(speed(f, h, c));
      next = semi_implicit_euler(f, h, dt);
    } else {
      // Stabilized second-order backward differentiation.
      double c = 0.0;
      std::vector<cplx> speed_hat = f.forward(speed(f, h, c));
      const std::vector<cplx> hh = f.forward(h);
      const std::vector<cplx> hp = f.forward(prev);
      std::vector<cplx> out(m);
      for (std::size_t k = 0; k < m; ++k) {
        const cplx extrap = 2.0 * hh[k] - hp[k];
        const cplx rhs = (4.0 * hh[k] - hp[k]) / (2.0 * dt) + 2.0 * speed_hat[k] - prev_speed_hat[k] +
                         c * f.k2(k) * extrap;
        out[k] = rhs / (1.5 / dt + c * f.k2(k));
      }
      next = f.inverse(out);
      prev_speed_hat = std::move(speed_hat);
    }
    t = dt * static_cast<double>(n);
    check_convex(next, t, last_good);
    prev = std::move(h);
    h = std::move(next);
    last_good = t;
    if (n % stride == 0 || n == steps) snaps.push_back(make_snapshot(t, h));
  }
  return FlowHistory(std::move(snaps), dt, desc.str());
}

HarnackGeometry geometry_at(const FlowHistory& history, double theta, double t,
                            const GeometryOptions& options) {
  const double d = options.time_step;
  if (!(d > 0.0)) throw std::invalid_argument("geometry_at: time step must be positive");
  if (t - 2.0 * d < history.t_begin() || t + 2.0 * d > history.t_end()) {
    throw std::out_of_range("geometry_at: t = " + std::to_string(t) +
                            " has no centered time stencil inside the history");
  }
  const CurveSlice slice = history.slice(t);
  const CurvePoint p = slice.point(theta);
  HarnackGeometry g;
  g.theta = theta;
  g.t = t;
  g.kappa = p.kappa;
  g.kappa_s = p.kappa_s;
  g.kappa_ss = p.kappa_ss;
  g.dH_dt = p.kappa_ss + p.kappa * p.kappa * p.kappa;

  auto kappa_at = [&](double s) { return history.slice(s).point(theta).kappa; };
  const double drift = p.kappa * p.kappa_theta * p.kappa_theta;
  const double fine = (kappa_at(t + d) - kappa_at(t - d)) / (2.0 * d) + drift;
  const double coarse = (kappa_at(t + 2.0 * d) - kappa_at(t - 2.0 * d)) / (4.0 * d) + drift;
  g.dH_dt_fixed_theta = fine;
  // kappa_ss ~ kappa^4 h'''' picks up the roundoff carried by the top modes.
  const double k4 = p.kappa * p.kappa * p.kappa * p.kappa;
  g.truncation = std::abs(fine - coarse) / 3.0 + k4 * slice.series().tail_derivative_bound(4);
  return g;
}

HarnackSample harnack_Z(const HarnackGeometry& g, double v) {
  if (!(g.t > 0.0)) throw std::invalid_argument("harnack_Z: t must be positive");
  HarnackSample s;
  s.theta = g.theta;
  s.t = g.t;
  s.v = v;
  s.dH_dt = g.dH_dt;
  s.grad_H = g.kappa_s;
  s.sff_term = g.kappa;
  s.time_term = g.kappa / (2.0 * g.t);
  s.Z = s.dH_dt + 2.0 * v * s.grad_H + s.sff_term * v * v + s.time_term;
  s.v_star = -g.kappa_s / g.kappa;
  s.Z_min = s.dH_dt - g.kappa_s * g.kappa_s / g.kappa + s.time_term;
  s.truncation = g.truncation + std::abs(g.dH_dt - g.dH_dt_fixed_theta);
  return s;
}

HarnackSample harnack_Z(const FlowHistory& history, double theta, double t, double v,
                        const GeometryOptions& options) {
  return harnack_Z(geometry_at(history, theta, t, options), v);
}

HarnackLattice harnack_lattice(const FlowHistory& history, std::size_t n_theta, std::size_t n_t,
                               double t_lo, double t_hi, const GeometryOptions& options) {
  if (n_theta == 0 || n_t < 2 || !(t_lo < t_hi)) {
    throw std::invalid_argument("harnack_lattice: need n_theta >= 1, n_t >= 2, t_lo < t_hi");
  }
  HarnackLattice out;
  out.Z_min = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < n_t; ++it) {
    const double t = t_lo + (t_hi - t_lo) * double(it) / double(n_t - 1);
    const CurveSlice slice = history.slice(t);
    const CurveSlice plus = history.slice(t + options.time_step);
    const CurveSlice minus = history.slice(t - options.time_step);
    const CurveSlice plus2 = history.slice(t + 2.0 * options.time_step);
    const CurveSlice minus2 = history.slice(t - 2.0 * options.time_step);
    const double tail = slice.series().tail_derivative_bound(4);
    for (std::size_t ith = 0; ith < n_theta; ++ith) {
      const double theta = 2.0 * std::numbers::pi * double(ith) / double(n_theta);
      const CurvePoint p = slice.point(theta);
      HarnackGeometry g;
      g.theta = theta;
      g.t = t;
      g.kappa = p.kappa;
      g.kappa_s = p.kappa_s;
      g.kappa_ss = p.kappa_ss;
      g.dH_dt = p.kappa_ss + p.kappa * p.kappa * p.kappa;
      const double d = options.time_step;
      const double drift = p.kappa * p.kappa_theta * p.kappa_theta;
      const double fine = (plus.point(theta).kappa - minus.point(theta).kappa) / (2.0 * d) + drift;
      const double coarse = (plus2.point(theta).kappa - minus2.point(theta).kappa) / (4.0 * d) + drift;
      g.dH_dt_fixed_theta = fine;
      g.truncation = std::abs(fine - coarse) / 3.0 + p.kappa * p.kappa * p.kappa * p.kappa * tail;
      HarnackSample s = harnack_Z(g, 0.0);
      out.budget = std::max(out.budget, s.truncation);
      if (s.Z_min < out.Z_min) {
        out.Z_min = s.Z_min;
        out.witness = s;
      }
      out.samples.push_back(s);
    }
  }
  return out;
}

}  // namespace harnack
