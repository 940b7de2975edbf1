#include "harnack/convexity.hpp"
#include "harnack/errors.hpp"
#include "harnack/grid_field.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace harnack;

namespace {
GridField field_of(double L, std::size_t n, double (*f)(double, double)) {
  GridField g(L, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) g.at(i, j) = f(g.coord(i), g.coord(j));
  return g;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("harnack_unit_" + name);
}
}  // namespace

TEST_CASE("grid convexity") {
  GridConvexityOptions opt;
  opt.pairs = 2000;
  const GridField norm = field_of(2.0, 81, [](double x, double y) { return std::hypot(x, y); });
  const ConvexityReport r = grid_convexity(norm, opt);
  CHECK(r.passed);
  CHECK(r.has_midpoint);
  CHECK(r.midpoint_passed);

  GridConvexityOptions smooth = opt;
  smooth.apex_cells = 0;
  const GridField concave = field_of(2.0, 81, [](double x, double y) { return -(x * x + y * y); });
  const ConvexityReport c = grid_convexity(concave, smooth);
  CHECK_FALSE(c.passed);
  CHECK(c.min_margin == doctest::Approx(-2.0).epsilon(1e-9));

  const GridField bowl = field_of(2.0, 81, [](double x, double y) { return x * x + 0.5 * y * y; });
  GridField scaled = bowl;
  for (double& v : scaled.values()) v *= 3.0;
  const double m1 = grid_convexity(bowl, smooth).min_margin;
  CHECK(grid_convexity(scaled, smooth).min_margin == doctest::Approx(3.0 * m1).epsilon(1e-12));
  CHECK(m1 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("second fundamental form") {
  const double R = 2.0;
  const ParametricSurface sphere = make_surface(
      [R](double a, double b) { return Vec3(R * std::sin(a) * std::cos(b), R * std::sin(a) * std::sin(b), R * std::cos(a)); },
      1e-3, 1e-3, InsideHint::point(Vec3::Zero()));
  const SurfaceCurvature s = surface_curvature(sphere, 1.0, 0.4);
  CHECK(s.k_min == doctest::Approx(1.0 / R).epsilon(1e-5));
  CHECK(s.k_max == doctest::Approx(1.0 / R).epsilon(1e-5));
  CHECK(s.mean_curvature == doctest::Approx(2.0 / R).epsilon(1e-5));
  // Unit tangent directions: |Phi_a| = R, |Phi_b| = R sin a.
  for (double phi : {0.0, 0.9, 2.0}) {
    const double ca = std::cos(phi) / R, cb = std::sin(phi) / (R * std::sin(1.0));
    CHECK(surface_sff(sphere, 1.0, 0.4, ca, cb) == doctest::Approx(1.0 / R).epsilon(1e-5));
  }

  const ParametricSurface cylinder = make_surface(
      [R](double a, double z) { return Vec3(R * std::cos(a), R * std::sin(a), z); }, 1e-3, 1e-3,
      InsideHint::point(Vec3::Zero()));
  CHECK(std::abs(surface_sff(cylinder, 0.3, 0.5, 0.0, 1.0)) < 1e-6);
  CHECK(surface_sff(cylinder, 0.3, 0.5, 1.0 / R, 0.0) == doctest::Approx(1.0 / R).epsilon(1e-5));

  const ParametricSurface plane = make_surface([](double a, double b) { return Vec3(a, b, 0.2 * a - b); }, 1e-3,
                                               1e-3, InsideHint::direction(Vec3::UnitZ()));
  CHECK(std::abs(surface_sff(plane, 0.1, 0.2, 1.0, 1.0)) < 1e-9);

  const ParametricSurface saddle = make_surface([](double a, double b) { return Vec3(a, b, a * a - b * b); }, 1e-3,
                                                1e-3, InsideHint::direction(Vec3::UnitZ()));
  const SurfaceCurvature sd = surface_curvature(saddle, 0.0, 0.0);
  CHECK(sd.k_min == doctest::Approx(-2.0).epsilon(1e-5));
  CHECK(sd.k_max == doctest::Approx(2.0).epsilon(1e-5));

  const ParametricSurface pinched = make_surface([](double a, double) { return Vec3(a, 0, a * a); }, 1e-3, 1e-3,
                                                 InsideHint::direction(Vec3::UnitZ()));
  CHECK_THROWS_AS(surface_curvature(pinched, 0.1, 0.1), DegenerateMetricError);
}

TEST_CASE("surface convexity") {
  const ParametricSurface sphere = make_surface(
      [](double a, double b) { return Vec3(std::sin(a) * std::cos(b), std::sin(a) * std::sin(b), std::cos(a)); }, 1e-3,
      1e-3, InsideHint::point(Vec3::Zero()));
  std::vector<std::array<double, 2>> lattice;
  for (int i = 1; i < 8; ++i)
    for (int j = 0; j < 8; ++j) lattice.push_back({0.35 * i, 0.8 * j});
  const ConvexityReport r = surface_convexity(sphere, lattice);
  CHECK(r.passed);
  CHECK(r.min_margin == doctest::Approx(1.0).epsilon(1e-5));

  // Graph of a smooth convex function: surface and grid verdicts agree.
  const GridField bowl = field_of(1.0, 41, [](double x, double y) { return x * x + y * y + 0.3 * x * y; });
  std::vector<std::array<double, 2>> nodes;
  for (std::size_t j = 2; j < 39; j += 3)
    for (std::size_t i = 2; i < 39; i += 3) nodes.push_back({bowl.coord(i), bowl.coord(j)});
  GridConvexityOptions smooth;
  smooth.apex_cells = 0;
  smooth.pairs = 1000;
  CHECK(surface_convexity(graph_surface(bowl), nodes).passed == grid_convexity(bowl, smooth).passed);
}

TEST_CASE("grid field io") {
  GridField g(3.5, 17, BoundaryKind::linear_extension, 7.0);
  for (std::size_t k = 0; k < g.values().size(); ++k) g.values()[k] = std::sin(0.37 * double(k)) / 3.0;
  const auto bin = temp_file("g.bin");
  g.write_binary(bin);
  const GridField b = GridField::read_binary(bin);
  CHECK(b.L() == g.L());
  CHECK(b.resolution() == g.resolution());
  CHECK(b.boundary() == g.boundary());
  CHECK(b.N() == g.N());
  CHECK(b.values() == g.values());
  CHECK(std::filesystem::file_size(bin) == 4 + 4 + 8 + 4 + 4 + 8 + 8 * 17 * 17);

  const auto csv = temp_file("g.csv");
  g.write_csv(csv);
  const GridField c = GridField::read_csv(csv);
  CHECK(c.values() == g.values());
  CHECK(c.boundary() == BoundaryKind::linear_extension);
  std::ifstream is(csv);
  std::string header;
  std::getline(is, header);
  CHECK(header == "L,resolution,boundary_kind,N");

  std::ofstream(temp_file("junk.bin"), std::ios::binary) << "XXXX";
  CHECK_THROWS(GridField::read_binary(temp_file("junk.bin")));
  CHECK(boundary_kind_from_string(to_string(BoundaryKind::dirichlet_cone)) == BoundaryKind::dirichlet_cone);
  CHECK(g.interpolate(Vec2(g.coord(3), g.coord(5))) == doctest::Approx(g.at(3, 5)).epsilon(1e-14));
}
