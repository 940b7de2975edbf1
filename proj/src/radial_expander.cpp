#include "harnack/expander_lab.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace harnack {

namespace {

namespace ode = boost::numeric::odeint;
using State = std::array<double, 2>;  // u, u_r

void rhs(const State& x, State& dxdr, double r) {
  const double u = x[0], p = x[1];
  dxdr[0] = p;
  dxdr[1] = (1.0 + p * p) * (0.5 * (u - r * p) - p / r);
}

State series_start(double a, double r0) { return {a + a * r0 * r0 / 8.0, a * r0 / 4.0}; }

// Slope at r_end, or +inf once it runs away.
double shoot(double a, double r0, double r_end, double tol) {
  State x = series_start(a, r0);
  auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_dopri5<State>());
  double r = r0, dr = 1e-3;
  while (r < r_end) {
    if (r + dr > r_end) dr = r_end - r;
    if (stepper.try_step(rhs, x, r, dr) == ode::success && std::abs(x[1]) > 1e6) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return x[1];
}

double far_slope(double N, double r) {
  const double c3 = N * (1.0 - N * N) / (2.0 * (1.0 + N * N));
  return N - N / (r * r) - 3.0 * c3 / std::pow(r, 4);
}

}  // namespace

RadialProfile radial_expander(double N, double R_max, const RadialOptions& opt) {
  if (!(N > 0.0)) throw std::invalid_argument("radial_expander: N must be positive");
  if (!(R_max > opt.r0)) throw std::invalid_argument("radial_expander: R_max too small");
  const double r_shoot = std::max(R_max, 25.0);
  const double target = far_slope(N, r_shoot);
  RadialProfile prof;
  prof.N = N;
  prof.r_shoot = r_shoot;

  double lo = 0.0, hi = std::max(1.0, N);
  int grow = 0;
  while (shoot(hi, opt.r0, r_shoot, opt.ode_tolerance) < target) {
    lo = hi;
    hi *= 2.0;
    if (++grow > 60) {
      std::ostringstream os;
      os << "radial_expander: no bracket for N = " << N << " in [" << lo << ", " << hi << "]";
      throw std::runtime_error(os.str());
    }
  }
  double a = 0.5 * (lo + hi), mismatch = 0.0;
  int it = 0;
  for (; it < 200; ++it) {
    a = 0.5 * (lo + hi);
    const double slope = shoot(a, opt.r0, r_shoot, opt.ode_tolerance);
    mismatch = slope - target;
    if (std::abs(mismatch) <= opt.tolerance || hi - lo <= 1e-15 * hi) break;
    (mismatch < 0.0 ? lo : hi) = a;
  }
  prof.a = a;
  prof.slope_mismatch = mismatch;
  prof.iterations = it + 1;

  const std::size_t count = std::size_t(std::ceil(R_max / opt.dr)) + 1;
  prof.r.resize(count);
  for (std::size_t i = 0; i < count; ++i) prof.r[i] = opt.dr * double(i);
  prof.u.resize(count);
  prof.u_r.resize(count);
  std::vector<double> times;
  for (double r : prof.r)
    if (r >= opt.r0) times.push_back(r);
  std::size_t first = count - times.size();
  for (std::size_t i = 0; i < first; ++i) {
    const State s = series_start(a, prof.r[i]);
    prof.u[i] = s[0];
    prof.u_r[i] = s[1];
  }
  State x = series_start(a, times.front());
  std::size_t k = first;
  ode::integrate_times(ode::make_dense_output(opt.ode_tolerance, opt.ode_tolerance, ode::runge_kutta_dopri5<State>()),
                       rhs, x, times.begin(), times.end(), 1e-4, [&](const State& s, double) {
                         prof.u[k] = s[0];
                         prof.u_r[k] = s[1];
                         ++k;
                       });
  return prof;
}

double RadialProfile::operator()(double radius) const {
  if (radius < 0.0 || radius > r.back()) throw std::out_of_range("radial profile: radius outside samples");
  const double dr = r[1] - r[0];
  const std::size_t i = std::min<std::size_t>(std::size_t(radius / dr), r.size() - 2);
  const double s = (radius - r[i]) / dr;
  // Cubic Hermite with the sampled slopes.
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  return h00 * u[i] + h10 * dr * u_r[i] + h01 * u[i + 1] + h11 * dr * u_r[i + 1];
}

double RadialProfile::residual(double radius) const {
  const double dr = r[1] - r[0];
  std::size_t i = std::size_t(std::lround(radius / dr));
  i = std::clamp<std::size_t>(i, 1, r.size() - 2);
  const double rr = r[i];
  const double ur = (u[i + 1] - u[i - 1]) / (2 * dr);
  const double urr = (u[i + 1] - 2 * u[i] + u[i - 1]) / (dr * dr);
  const double W = std::sqrt(1 + ur * ur);
  const double H = (urr / (1 + ur * ur) + ur / rr) / W;
  const double zn = (u[i] - rr * ur) / W;
  return H - 0.5 * zn;
}

double RadialProfile::max_residual(double r_lo, double r_hi) const {
  const double dr = r[1] - r[0];
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    if (r[i] < r_lo - 0.5 * dr || r[i] > r_hi + 0.5 * dr) continue;
    worst = std::max(worst, std::abs(residual(r[i])));
  }
  return worst;
}

GridField radial_field(const RadialProfile& profile, double L, std::size_t resolution) {
  GridField f(L, resolution, BoundaryKind::linear_extension, profile.N);
  for (std::size_t j = 0; j < resolution; ++j)
    for (std::size_t i = 0; i < resolution; ++i) f.at(i, j) = profile(std::hypot(f.coord(i), f.coord(j)));
  return f;
}

}  // namespace harnack
