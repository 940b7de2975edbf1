#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace harnack {

enum class BoundaryKind : std::uint32_t {
  dirichlet_cone = 0,
  linear_extension = 1,
};

std::string to_string(BoundaryKind kind);
BoundaryKind boundary_kind_from_string(const std::string& name);

/// Heights over the uniform grid on [-L, L]^2, row-major with the y index
/// outermost: value(i, j) = values[j * n + i] at (x(i), x(j)).
class GridField {
 public:
  GridField() = default;
  GridField(double L, std::size_t resolution, BoundaryKind boundary = BoundaryKind::dirichlet_cone,
            double N = 1.0);

  double L() const noexcept { return L_; }
  std::size_t resolution() const noexcept { return n_; }
  double spacing() const noexcept { return 2.0 * L_ / double(n_ - 1); }
  double coord(std::size_t i) const { return -L_ + spacing() * double(i); }
  BoundaryKind boundary() const noexcept { return boundary_; }
  void set_boundary(BoundaryKind kind) noexcept { boundary_ = kind; }
  /// Cone slope the field was built for; 1 after squashing.
  double N() const noexcept { return N_; }
  void set_N(double N) noexcept { N_ = N; }

  double& at(std::size_t i, std::size_t j) { return values_[j * n_ + i]; }
  double at(std::size_t i, std::size_t j) const { return values_[j * n_ + i]; }
  std::vector<double>& values() noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  bool contains(const Eigen::Vector2d& y) const;
  /// Bilinear interpolation; y must lie in the box.
  double interpolate(const Eigen::Vector2d& y) const;

  /// Largest one-sided difference quotient over grid edges and diagonals.
  double lipschitz() const;
  double min_value() const;
  bool all_finite() const;

  void write_binary(const std::filesystem::path& path) const;
  static GridField read_binary(const std::filesystem::path& path);
  void write_csv(const std::filesystem::path& path) const;
  static GridField read_csv(const std::filesystem::path& path);

 private:
  double L_ = 1.0;
  std::size_t n_ = 0;
  BoundaryKind boundary_ = BoundaryKind::dirichlet_cone;
  double N_ = 1.0;
  std::vector<double> values_;
};

}  // namespace harnack
