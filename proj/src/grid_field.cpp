#include "harnack/grid_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace harnack {

namespace {

constexpr char kMagic[4] = {'H', 'L', 'G', 'F'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  os.write(buf, sizeof(T));
}

template <class T>
T get(std::istream& is) {
  char buf[sizeof(T)];
  if (!is.read(buf, sizeof(T))) throw std::runtime_error("grid field: truncated file");
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace

std::string to_string(BoundaryKind kind) {
  return kind == BoundaryKind::dirichlet_cone ? "dirichlet_cone" : "linear_extension";
}

BoundaryKind boundary_kind_from_string(const std::string& name) {
  if (name == "dirichlet_cone") return BoundaryKind::dirichlet_cone;
  if (name == "linear_extension") return BoundaryKind::linear_extension;
  throw std::invalid_argument("unknown boundary kind '" + name + "'");
}

GridField::GridField(double L, std::size_t resolution, BoundaryKind boundary, double N)
    : L_(L), n_(resolution), boundary_(boundary), N_(N), values_(resolution * resolution, 0.0) {
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("grid field: L must be positive");
  if (resolution < 3) throw std::invalid_argument("grid field: resolution must be at least 3");
}

bool GridField::contains(const Eigen::Vector2d& y) const {
  const double edge = L_ * (1.0 + 1e-12);
  return std::abs(y.x()) <= edge && std::abs(y.y()) <= edge;
}

double GridField::interpolate(const Eigen::Vector2d& y) const {
  if (!contains(y)) throw std::out_of_range("grid field: point outside the box");
  const double dx = spacing();
  const double top = double(n_ - 1);
  const double fx = std::clamp((y.x() + L_) / dx, 0.0, top);
  const double fy = std::clamp((y.y() + L_) / dx, 0.0, top);
  const std::size_t i = std::min<std::size_t>(std::size_t(std::floor(fx)), n_ - 2);
  const std::size_t j = std::min<std::size_t>(std::size_t(std::floor(fy)), n_ - 2);
  const double a = fx - double(i);
  const double b = fy - double(j);
  return (1 - a) * (1 - b) * at(i, j) + a * (1 - b) * at(i + 1, j) + (1 - a) * b * at(i, j + 1) +
         a * b * at(i + 1, j + 1);
}

double GridField::lipschitz() const {
  const double dx = spacing();
  const double diag = dx * std::sqrt(2.0);
  double lip = 0.0;
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t i = 0; i < n_; ++i) {
      const double v = at(i, j);
      if (i + 1 < n_) lip = std::max(lip, std::abs(at(i + 1, j) - v) / dx);
      if (j + 1 < n_) lip = std::max(lip, std::abs(at(i, j + 1) - v) / dx);
      if (i + 1 < n_ && j + 1 < n_) lip = std::max(lip, std::abs(at(i + 1, j + 1) - v) / diag);
      if (i > 0 && j + 1 < n_) lip = std::max(lip, std::abs(at(i - 1, j + 1) - v) / diag);
    }
  }
  return lip;
}

double GridField::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

bool GridField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void GridField::write_binary(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kVersion);
  put<double>(os, L_);
  put<std::uint32_t>(os, std::uint32_t(n_));
  put<std::uint32_t>(os, std::uint32_t(boundary_));
  put<double>(os, N_);
  for (double v : values_) put<double>(os, v);
}

GridField GridField::read_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("grid field: bad magic in " + path.string());
  }
  if (get<std::uint32_t>(is) != kVersion) throw std::runtime_error("grid field: unsupported version");
  const double L = get<double>(is);
  const std::uint32_t n = get<std::uint32_t>(is);
  const std::uint32_t kind = get<std::uint32_t>(is);
  if (kind > 1) throw std::runtime_error("grid field: bad boundary kind");
  const double N = get<double>(is);
  GridField f(L, n, BoundaryKind(kind), N);
  for (double& v : f.values_) v = get<double>(is);
  return f;
}

void GridField::write_csv(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << std::setprecision(17);
  os << "L,resolution,boundary_kind,N\n";
  os << L_ << ',' << n_ << ',' << to_string(boundary_) << ',' << N_ << '\n';
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t i = 0; i < n_; ++i) {
      if (i) os << ',';
      os << at(i, j);
    }
    os << '\n';
  }
}

GridField GridField::read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(is, line);
  if (line != "L,resolution,boundary_kind,N") throw std::runtime_error("grid field: bad csv header");
  std::getline(is, line);
  std::stringstream hs(line);
  std::string tok;
  std::getline(hs, tok, ',');
  const double L = std::stod(tok);
  std::getline(hs, tok, ',');
  const std::size_t n = std::stoul(tok);
  std::getline(hs, tok, ',');
  const BoundaryKind kind = boundary_kind_from_string(tok);
  std::getline(hs, tok, ',');
  const double N = std::stod(tok);
  GridField f(L, n, kind, N);
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::getline(is, line)) throw std::runtime_error("grid field: truncated csv");
    std::stringstream rs(line);
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::getline(rs, tok, ',')) throw std::runtime_error("grid field: short csv row");
      f.at(i, j) = std::stod(tok);
    }
  }
  return f;
}

}  // namespace harnack
