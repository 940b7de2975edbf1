#pragma once

#include "harnack/csf_flow.hpp"

#include <cstddef>
#include <vector>

namespace harnack {

struct PathEnergyOptions {
  std::size_t time_steps = 200;   // rows of the (t, theta) lattice
  std::size_t angle_nodes = 128;  // columns, theta1 + 2 pi i / angle_nodes
  /// Largest lattice jump per row; 0 means angle_nodes / 4.
  std::size_t band = 0;
  /// Continuous Gauss-Newton polish of the lattice path.
  bool refine = true;
  int max_iterations = 200;
};

struct PathPoint {
  double t = 0.0;
  double theta = 0.0;  // lifted, not reduced mod 2 pi
};

struct PathEnergy {
  /// Energy of the returned path: integral of |tangential velocity|^2 dt,
  /// exact Gauss quadrature on each linear segment.
  double delta = 0.0;
  /// Same functional on the lattice path before polishing.
  double lattice_delta = 0.0;
  std::vector<PathPoint> path;
  int iterations = 0;
};

/// Minimal tangential energy of paths gamma(t) = x(theta(t), t) on the
/// moving curve from (theta1, t1) to (theta2, t2). The tangential velocity
/// of such a path is r theta' - kappa_theta (fixed-theta drift included).
PathEnergy path_energy(const FlowHistory& history, double theta1, double t1, double theta2,
                       double t2, const PathEnergyOptions& options = {});

struct IntegratedHarnack {
  double gap = 0.0;  // H2 - H1 sqrt(t1/t2) exp(-Delta/4)
  double H1 = 0.0;
  double H2 = 0.0;
  double delta = 0.0;
};

IntegratedHarnack integrated_harnack_gap(const FlowHistory& history, double theta1, double t1,
                                         double theta2, double t2,
                                         const PathEnergyOptions& options = {});

}  // namespace harnack
