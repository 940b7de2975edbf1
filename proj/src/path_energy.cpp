#include "harnack/path_energy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace harnack {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Four-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 4> kNodes = {0.0694318442029737, 0.3300094782075719,
                                          0.6699905217924281, 0.9305681557970263};
constexpr std::array<double, 4> kWeights = {0.1739274225687269, 0.3260725774312731,
                                            0.3260725774312731, 0.1739274225687269};

double wrap_pi(double a) {
  a = std::fmod(a + std::numbers::pi, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a - std::numbers::pi;
}

struct Integrand {
  double r, r_theta, drift, drift_theta;  // drift = kappa_theta
};

Integrand integrand_at(const CurveSlice& slice, double theta) {
  const CurvePoint p = slice.point(theta);
  return {p.r, p.r_theta, p.kappa_theta, p.kappa_thetatheta};
}

// Quadrature slices for every segment of the time mesh.
class SegmentQuadrature {
 public:
  SegmentQuadrature(const FlowHistory& history, double t1, double dt, std::size_t steps) {
    slices_.reserve(steps * kNodes.size());
    for (std::size_t k = 0; k < steps; ++k) {
      for (double node : kNodes) slices_.push_back(history.slice(t1 + (double(k) + node) * dt));
    }
  }
  const CurveSlice& at(std::size_t k, std::size_t q) const { return slices_[k * kNodes.size() + q]; }

 private:
  std::vector<CurveSlice> slices_;
};

double segment_energy(const SegmentQuadrature& quad, std::size_t k, double a, double b, double dt) {
  const double s = (b - a) / dt;
  double e = 0.0;
  for (std::size_t q = 0; q < kNodes.size(); ++q) {
    const Integrand g = integrand_at(quad.at(k, q), a + kNodes[q] * (b - a));
    const double w = g.r * s - g.drift;
    e += kWeights[q] * w * w;
  }
  return e * dt;
}

double path_total(const SegmentQuadrature& quad, const std::vector<double>& th, double dt) {
  double e = 0.0;
  for (std::size_t k = 0; k + 1 < th.size(); ++k) e += segment_energy(quad, k, th[k], th[k + 1], dt);
  return e;
}

// Gauss-Newton on the interior nodes; the normal matrix is tridiagonal.
int polish(const SegmentQuadrature& quad, std::vector<double>& th, double dt, int max_iter) {
  const std::size_t K = th.size() - 1;
  if (K < 2) return 0;
  const std::size_t n = K - 1;
  double energy = path_total(quad, th, dt);
  int it = 0;
  for (; it < max_iter; ++it) {
    std::vector<double> diag(n, 0.0), off(n, 0.0), grad(n, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
      const double a = th[k], b = th[k + 1];
      const double s = (b - a) / dt;
      for (std::size_t q = 0; q < kNodes.size(); ++q) {
        const double lam = kNodes[q];
        const Integrand g = integrand_at(quad.at(k, q), a + lam * (b - a));
        const double sw = std::sqrt(kWeights[q] * dt);
        const double res = sw * (g.r * s - g.drift);
        const double common = g.r_theta * s - g.drift_theta;
        const double ja = sw * (common * (1.0 - lam) - g.r / dt);
        const double jb = sw * (common * lam + g.r / dt);
        // Variable index of node k is k - 1.
        if (k >= 1) {
          diag[k - 1] += ja * ja;
          grad[k - 1] += ja * res;
        }
        if (k + 1 <= n) {
          diag[k] += jb * jb;
          grad[k] += jb * res;
        }
        if (k >= 1 && k + 1 <= n) off[k - 1] += ja * jb;
      }
    }
    // Thomas algorithm for (J^T J) d = -J^T r.
    std::vector<double> c(n), d(n);
    double denom = diag[0];
    c[0] = n > 1 ? off[0] / denom : 0.0;
    d[0] = -grad[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
      denom = diag[i] - off[i - 1] * c[i - 1];
      c[i] = i + 1 < n ? off[i] / denom : 0.0;
      d[i] = (-grad[i] - off[i - 1] * d[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];

    double step = 1.0;
    std::vector<double> trial(th);
    double trial_energy = energy;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      for (std::size_t i = 0; i < n; ++i) trial[i + 1] = th[i + 1] + step * d[i];
      trial_energy = path_total(quad, trial, dt);
      if (trial_energy <= energy) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    double dmax = 0.0;
    for (double v : d) dmax = std::max(dmax, std::abs(step * v));
    const double decrease = energy - trial_energy;
    th.swap(trial);
    energy = trial_energy;
    if (dmax < 1e-13 || decrease <= 1e-16 * std::max(1.0, energy)) break;
  }
  return it + 1;
}

}  // namespace

PathEnergy path_energy(const FlowHistory& history, double theta1, double t1, double theta2,
                       double t2, const PathEnergyOptions& options) {
  if (!(t1 > 0.0) || !(t1 < t2)) throw std::invalid_argument("path_energy: need 0 < t1 < t2");
  if (t1 < history.t_begin() || t2 > history.t_end()) {
    throw std::out_of_range("path_energy: times outside the history");
  }
  const std::size_t K = std::max<std::size_t>(options.time_steps, 1);
  const std::size_t M = std::max<std::size_t>(options.angle_nodes, 4);
  const long band = options.band == 0 ? long(M / 4) : long(options.band);
  const double dt = (t2 - t1) / double(K);
  const double dth = kTwoPi / double(M);

  // r and kappa_theta at segment midpoints on the half lattice.
  std::vector<std::vector<Integrand>> mid(K);
  for (std::size_t k = 0; k + 1 < K; ++k) {
    const CurveSlice slice = history.slice(t1 + (double(k) + 0.5) * dt);
    mid[k].resize(2 * M);
    for (std::size_t i = 0; i < 2 * M; ++i) mid[k][i] = integrand_at(slice, theta1 + 0.5 * dth * double(i));
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cost(M, inf), next(M);
  cost[0] = 0.0;
  std::vector<std::vector<long>> from(K, std::vector<long>(M, 0));

  // Jumps ordered by size so ties keep the smallest angle change.
  std::vector<long> jumps{0};
  for (long j = 1; j <= band; ++j) {
    jumps.push_back(-j);
    jumps.push_back(j);
  }

  for (std::size_t k = 0; k + 1 < K; ++k) {
    std::fill(next.begin(), next.end(), inf);
    for (std::size_t i = 0; i < M; ++i) {
      for (long j : jumps) {
        const long src = ((long(i) - j) % long(M) + long(M)) % long(M);
        if (cost[src] == inf) continue;
        const std::size_t h = std::size_t(((2 * src + j) % long(2 * M) + long(2 * M)) % long(2 * M));
        const Integrand& g = mid[k][h];
        const double w = g.r * (double(j) * dth / dt) - g.drift;
        const double c = cost[src] + w * w * dt;
        if (c < next[i]) {
          next[i] = c;
          from[k + 1][i] = j;
        }
      }
    }
    cost.swap(next);
  }

  // Last segment ends exactly at theta2.
  const CurveSlice last = history.slice(t2 - 0.5 * dt);
  double best = inf;
  std::size_t best_i = 0;
  double best_jump = 0.0;
  for (std::size_t i = 0; i < M; ++i) {
    if (cost[i] == inf) continue;
    const double from_theta = theta1 + dth * double(i);
    const double jump = wrap_pi(theta2 - from_theta);
    const Integrand g = integrand_at(last, from_theta + 0.5 * jump);
    const double w = g.r * jump / dt - g.drift;
    const double c = cost[i] + w * w * dt;
    if (c < best || (c == best && std::abs(jump) < std::abs(best_jump))) {
      best = c;
      best_i = i;
      best_jump = jump;
    }
  }

  // Back-track into a lifted polyline.
  std::vector<long> steps(K, 0);
  std::size_t node = best_i;
  for (std::size_t k = K - 1; k >= 1; --k) {
    const long j = from[k][node];
    steps[k - 1] = j;
    node = std::size_t(((long(node) - j) % long(M) + long(M)) % long(M));
  }
  std::vector<double> th(K + 1);
  th[0] = theta1;
  for (std::size_t k = 0; k + 1 < K; ++k) th[k + 1] = th[k] + double(steps[k]) * dth;
  th[K] = th[K - 1] + best_jump;

  const SegmentQuadrature quad(history, t1, dt, K);
  PathEnergy out;
  out.lattice_delta = path_total(quad, th, dt);
  if (options.refine) out.iterations = polish(quad, th, dt, options.max_iterations);
  out.delta = path_total(quad, th, dt);
  out.path.resize(K + 1);
  for (std::size_t k = 0; k <= K; ++k) out.path[k] = {t1 + double(k) * dt, th[k]};
  out.path.back().t = t2;
  return out;
}

IntegratedHarnack integrated_harnack_gap(const FlowHistory& history, double theta1, double t1,
                                         double theta2, double t2, const PathEnergyOptions& options) {
  const PathEnergy pe = path_energy(history, theta1, t1, theta2, t2, options);
  IntegratedHarnack out;
  out.delta = pe.delta;
  out.H1 = history.slice(t1).point(theta1).kappa;
  out.H2 = history.slice(t2).point(theta2).kappa;
  out.gap = out.H2 - out.H1 * std::sqrt(t1 / t2) * std::exp(-pe.delta / 4.0);
  return out;
}

}  // namespace harnack
