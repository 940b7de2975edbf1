#include "harnack/experiments.hpp"

#include "doctest.h"

using namespace harnack;
using nlohmann::json;

namespace {
std::string field_of(const json& j) {
  try {
    validate(config_from_json(j));
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}
}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = config_from_json(json::parse(R"({"curve": {"preset": "circle", "radius": 2},
      "flow": {"dt": 2e-5}, "N_sequence": [1, 5], "seed": 3})"));
  CHECK(c.curve.preset == "circle");
  CHECK(c.curve.radius == 2.0);
  CHECK(c.flow.dt == 2e-5);
  CHECK(c.N_sequence == std::vector<double>{1, 5});
  CHECK(c.seed == 3);
  const ExperimentConfig back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
}

TEST_CASE("config errors name the field") {
  CHECK(field_of(json::parse(R"({"flow": {"dt": -1}})")) == "flow.dt");
  CHECK(field_of(json::parse(R"({"curve": {"preset": "square"}})")) == "curve.preset");
  CHECK(field_of(json::parse(R"({"grid": {"resolution": 2}})")) == "grid.resolution");
  CHECK(field_of(json::parse(R"({"flow": {"dtt": 1}})")) == "flow.dtt");
  CHECK(field_of(json::parse(R"({"curve": {"preset": "ellipse", "a": 0}})")) == "curve.a");
  CHECK(field_of(json::parse(R"({"seed": "x"})")) == "seed");
  CHECK(field_of(json::object()) == "");
}

TEST_CASE("source lists") {
  int dim = 0;
  const auto s = parse_sources("(-1,1);(1,1)", dim);
  CHECK(dim == 1);
  REQUIRE(s.size() == 2);
  CHECK(s[0].location.x() == -1.0);
  CHECK(s[1].weight == 1.0);
  const auto t = parse_sources("(0, 1, 2); (1.5, -2, 0.5)", dim);
  CHECK(dim == 2);
  CHECK(t[1].location.y() == -2.0);
  CHECK_THROWS(parse_sources("(1,2);(1,2,3)", dim));
  CHECK(parse_list("5,20") == std::vector<double>{5, 20});
}
