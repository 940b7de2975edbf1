#include "harnack/heat_harnack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace harnack::heat {

namespace {

void require_dim(int dim) {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("heat: dimension must be 1 or 2, got " + std::to_string(dim));
  }
}

void require_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("heat: time must be positive, got " + std::to_string(t));
  }
}

double squared_norm(const Point& x, int dim) {
  return dim == 1 ? x[0] * x[0] : x.squaredNorm();
}

double log_kernel(int dim, double r2, double t) {
  return -0.5 * dim * std::log(4.0 * std::numbers::pi * t) - r2 / (4.0 * t);
}

// log of sum_i w_i rho(x - y_i, tau) via log-sum-exp.
double log_mixture(const PointSourceSolution& sol, const Point& x, double tau) {
  const int dim = sol.dim();
  double peak = -std::numeric_limits<double>::infinity();
  std::vector<double> terms;
  terms.reserve(sol.sources().size());
  for (const auto& s : sol.sources()) {
    const double e = std::log(s.weight) - squared_norm(x - s.location, dim) / (4.0 * tau);
    terms.push_back(e);
    peak = std::max(peak, e);
  }
  double sum = 0.0;
  for (double e : terms) sum += std::exp(e - peak);
  return peak + std::log(sum) - 0.5 * dim * std::log(4.0 * std::numbers::pi * tau);
}

double checked(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::domain_error(std::string("heat: non-finite evaluation in ") + what);
  }
  return v;
}

SymmetricMatrix2 hessian_of(const auto& f, const Point& x, int dim, double h) {
  SymmetricMatrix2 out;
  out.dim = dim;
  const double f0 = f(x);
  const Point ex(h, 0.0);
  out.xx = (f(x + ex) - 2.0 * f0 + f(x - ex)) / (h * h);
  if (dim == 2) {
    const Point ey(0.0, h);
    out.yy = (f(x + ey) - 2.0 * f0 + f(x - ey)) / (h * h);
    out.xy = (f(x + ex + ey) - f(x + ex - ey) - f(x - ex + ey) + f(x - ex - ey)) / (4.0 * h * h);
  }
  checked(out.xx + out.xy + out.yy, "Hessian");
  return out;
}

// Extrapolated value; the truncation is the size of the removed h^2 term.
Estimate richardson(double fine, double coarse) {
  return {(4.0 * fine - coarse) / 3.0, std::abs(fine - coarse) / 3.0};
}

double shifted_min_eig(SymmetricMatrix2 m, double shift) {
  m.xx += shift;
  if (m.dim == 2) m.yy += shift;
  return m.min_eigenvalue();
}

}  // namespace

PointSourceSolution::PointSourceSolution(int dim, std::vector<PointSource> sources, double time_shift)
    : dim_(dim), sources_(std::move(sources)), time_shift_(time_shift) {
  require_dim(dim_);
  if (sources_.empty()) throw std::invalid_argument("PointSourceSolution: need at least one source");
  for (const auto& s : sources_) {
    if (!(s.weight > 0.0) || !std::isfinite(s.weight)) {
      throw std::invalid_argument("PointSourceSolution: weights must be strictly positive");
    }
    if (!s.location.allFinite()) throw std::invalid_argument("PointSourceSolution: non-finite location");
  }
  if (!(time_shift_ >= 0.0)) throw std::invalid_argument("PointSourceSolution: time shift must be >= 0");
}

int dimension(const HeatSolution& sol) {
  return std::visit([](const auto& s) {
    if constexpr (std::is_same_v<std::decay_t<decltype(s)>, FundamentalSolution>) {
      return s.dim;
    } else {
      return s.dim();
    }
  }, sol);
}

double log_solution(const HeatSolution& sol, const Point& x, double t) {
  require_time(t);
  return std::visit([&](const auto& s) -> double {
    if constexpr (std::is_same_v<std::decay_t<decltype(s)>, FundamentalSolution>) {
      require_dim(s.dim);
      return log_kernel(s.dim, squared_norm(x, s.dim), t);
    } else {
      return log_mixture(s, x, t + s.time_shift());
    }
  }, sol);
}

double eval_solution(const HeatSolution& sol, const Point& x, double t) {
  return std::exp(log_solution(sol, x, t));
}

double SymmetricMatrix2::min_eigenvalue() const {
  if (dim == 1) return xx;
  const double mean = 0.5 * (xx + yy);
  const double radius = std::hypot(0.5 * (xx - yy), xy);
  return mean - radius;
}

SymmetricMatrix2 hessian_log(const HeatSolution& sol, const Point& x, double t, double step) {
  require_time(t);
  if (!(step > 0.0)) throw std::invalid_argument("hessian_log: step must be positive");
  const int dim = dimension(sol);
  auto f = [&](const Point& p) { return checked(log_solution(sol, p, t), "log u"); };
  return hessian_of(f, x, dim, step);
}

Estimate matrix_harnack_defect(const HeatSolution& sol, const Point& x, double t, double step) {
  const double shift = 1.0 / (2.0 * t);
  const double fine = shifted_min_eig(hessian_log(sol, x, t, step), shift);
  const double coarse = shifted_min_eig(hessian_log(sol, x, t, 2.0 * step), shift);
  return richardson(fine, coarse);
}

TraceDefects trace_defects(const HeatSolution& sol, const Point& x, double t, double step) {
  require_time(t);
  const int dim = dimension(sol);
  const double n_over_2t = dim / (2.0 * t);
  auto f = [&](const Point& p, double s) { return checked(log_solution(sol, p, s), "log u"); };

  auto li_yau_at = [&](double h) {
    return hessian_log(sol, x, t, h).trace() + n_over_2t;
  };
  auto harnack_at = [&](double h) {
    // Relative time step keeps t - ht > 0.
    const double ht = h * std::min(1.0, t);
    const double dlogu_dt = (f(x, t + ht) - f(x, t - ht)) / (2.0 * ht);
    double grad2 = 0.0;
    for (int d = 0; d < dim; ++d) {
      Point e = Point::Zero();
      e[d] = h;
      const double g = (f(x + e, t) - f(x - e, t)) / (2.0 * h);
      grad2 += g * g;
    }
    return dlogu_dt - grad2 + n_over_2t;
  };

  TraceDefects out;
  out.li_yau = richardson(li_yau_at(step), li_yau_at(2.0 * step));
  out.trace_harnack = richardson(harnack_at(step), harnack_at(2.0 * step));
  return out;
}

double classical_harnack_gap(const HeatSolution& sol, const Point& x1, double t1,
                             const Point& x2, double t2) {
  if (!(t1 > 0.0)) throw std::invalid_argument("classical_harnack_gap: t1 must be positive");
  if (!(t1 < t2)) throw std::invalid_argument("classical_harnack_gap: need t1 < t2");
  const int dim = dimension(sol);
  const double log_u1 = log_solution(sol, x1, t1);
  const double log_u2 = log_solution(sol, x2, t2);
  const double log_bound = log_u1 + 0.5 * dim * std::log(t1 / t2) -
                           squared_norm(x2 - x1, dim) / (4.0 * (t2 - t1));
  return std::exp(log_u2) - std::exp(log_bound);
}

double log_ratio_convexity_defect(const HeatSolution& sol, double t, const Point& x,
                                  const Point& z, double alpha) {
  require_time(t);
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("log_ratio_convexity_defect: alpha must lie in (0,1)");
  }
  const int dim = dimension(sol);
  const FundamentalSolution rho{dim};
  auto log_f = [&](const Point& p) { return log_solution(sol, p, t) - log_solution(rho, p, t); };
  const Point mid = alpha * x + (1.0 - alpha) * z;
  if (x == z) return 0.0;
  return alpha * log_f(x) + (1.0 - alpha) * log_f(z) - log_f(mid);
}

Estimate log_ratio_hessian_min(const HeatSolution& sol, const Point& x, double t, double step) {
  require_time(t);
  const int dim = dimension(sol);
  const FundamentalSolution rho{dim};
  auto log_f = [&](const Point& p) {
    return checked(log_solution(sol, p, t) - log_solution(rho, p, t), "log(u/rho)");
  };
  const double fine = hessian_of(log_f, x, dim, step).min_eigenvalue();
  const double coarse = hessian_of(log_f, x, dim, 2.0 * step).min_eigenvalue();
  return richardson(fine, coarse);
}

}  // namespace harnack::heat
