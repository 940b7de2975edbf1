#pragma once

#include <Eigen/Core>

#include <variant>
#include <vector>

namespace harnack::heat {

/// A point of R^n, n <= 2. For n = 1 only the first coordinate is used.
using Point = Eigen::Vector2d;

/// Gaussian heat kernel (4 pi t)^{-n/2} exp(-|x|^2 / 4t) on R^n.
struct FundamentalSolution {
  int dim = 1;
};

struct PointSource {
  Point location = Point::Zero();
  double weight = 1.0;
};

/// u(x,t) = sum_i w_i rho(x - y_i, t + eps), a positive solution built from
/// finitely many translated kernels.
class PointSourceSolution {
 public:
  PointSourceSolution(int dim, std::vector<PointSource> sources, double time_shift = 0.0);

  int dim() const noexcept { return dim_; }
  const std::vector<PointSource>& sources() const noexcept { return sources_; }
  double time_shift() const noexcept { return time_shift_; }

 private:
  int dim_;
  std::vector<PointSource> sources_;
  double time_shift_;
};

using HeatSolution = std::variant<FundamentalSolution, PointSourceSolution>;

int dimension(const HeatSolution& sol);

/// log u(x,t), computed without leaving log-space.
double log_solution(const HeatSolution& sol, const Point& x, double t);
double eval_solution(const HeatSolution& sol, const Point& x, double t);

/// Upper triangle of a symmetric matrix of size dim <= 2.
struct SymmetricMatrix2 {
  int dim = 1;
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  double trace() const { return dim == 1 ? xx : xx + yy; }
  double min_eigenvalue() const;
};

/// Richardson-extrapolated finite-difference value and the size of the removed term.
struct Estimate {
  double value = 0.0;
  double truncation = 0.0;
};

constexpr double kDefaultStep = 1e-3;

/// Central second differences of log u at spacing `step`.
SymmetricMatrix2 hessian_log(const HeatSolution& sol, const Point& x, double t,
                             double step = kDefaultStep);

/// Smallest eigenvalue of Hess(log u) + I/(2t). Nonnegative for every
/// positive solution, zero for the kernel itself.
Estimate matrix_harnack_defect(const HeatSolution& sol, const Point& x, double t,
                               double step = kDefaultStep);

struct TraceDefects {
  Estimate li_yau;         // Laplacian(log u) + n/(2t)
  Estimate trace_harnack;  // d/dt log u - |grad log u|^2 + n/(2t)
};

TraceDefects trace_defects(const HeatSolution& sol, const Point& x, double t,
                           double step = kDefaultStep);

/// u(x2,t2) - u(x1,t1) (t1/t2)^{n/2} exp(-|x2-x1|^2 / 4(t2-t1)).
double classical_harnack_gap(const HeatSolution& sol, const Point& x1, double t1,
                             const Point& x2, double t2);

/// With F = u/rho at time t: a log F(x) + (1-a) log F(z) - log F(a x + (1-a) z).
double log_ratio_convexity_defect(const HeatSolution& sol, double t, const Point& x,
                                  const Point& z, double alpha);

/// Smallest eigenvalue of Hess log(u/rho) by central differences.
Estimate log_ratio_hessian_min(const HeatSolution& sol, const Point& x, double t,
                               double step = kDefaultStep);

}  // namespace harnack::heat
