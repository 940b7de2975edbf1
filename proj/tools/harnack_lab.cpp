// harnack-lab: run verification suites and write report.json plus plot data.
#include "harnack/experiments.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <optional>

namespace {

using harnack::ConfigError;
using harnack::ExperimentConfig;

struct Overrides {
  std::string config;
  std::optional<std::string> curve, sources, grid_format, out, N;
  std::optional<double> radius, a, b, L, dt, t_end;
  std::optional<int> dim;
  std::optional<std::size_t> resolution;
  std::optional<std::uint64_t> seed;
  bool stable = false;
};

void add_options(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config, "JSON config file");
  app.add_option("--curve", o.curve, "circle | ellipse | generic");
  app.add_option("--radius", o.radius, "circle radius");
  app.add_option("--a", o.a, "ellipse semi-axis along x");
  app.add_option("--b", o.b, "ellipse semi-axis along y");
  app.add_option("--N", o.N, "comma-separated N sequence");
  app.add_option("--sources", o.sources, "point sources, e.g. \"(-1,1);(1,1)\"");
  app.add_option("--dim", o.dim, "heat dimension (1 or 2)");
  app.add_option("--L", o.L, "grid half-width");
  app.add_option("--resolution", o.resolution, "grid nodes per side");
  app.add_option("--dt", o.dt, "flow time step");
  app.add_option("--t-end", o.t_end, "flow end time");
  app.add_option("--grid-format", o.grid_format, "bin | csv");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--seed", o.seed, "RNG seed");
  app.add_flag("--stable-output", o.stable, "omit timings from report.json");
}

ExperimentConfig build_config(const std::string& experiment, const Overrides& o) {
  ExperimentConfig c;
  if (!o.config.empty()) {
    std::ifstream is(o.config);
    if (!is) throw ConfigError("config", "cannot open " + o.config);
    nlohmann::json j;
    try {
      is >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config", e.what());
    }
    c = harnack::config_from_json(j);
  }
  c.experiment = experiment;
  if (o.curve) c.curve.preset = *o.curve;
  if (o.radius) c.curve.radius = *o.radius;
  if (o.a) c.curve.a = *o.a;
  if (o.b) c.curve.b = *o.b;
  try {
    if (o.N) c.N_sequence = harnack::parse_list(*o.N);
  } catch (const std::exception& e) {
    throw ConfigError("N_sequence", e.what());
  }
  if (o.sources) {
    int dim = 0;
    try {
      c.heat.sources = harnack::parse_sources(*o.sources, dim);
    } catch (const std::exception& e) {
      throw ConfigError("heat.sources", e.what());
    }
    c.heat.dim = dim;
  }
  if (o.dim) c.heat.dim = *o.dim;
  if (o.L) c.grid.L = *o.L;
  if (o.resolution) c.grid.resolution = *o.resolution;
  if (o.dt) c.flow.dt = *o.dt;
  if (o.t_end) c.flow.t_end = *o.t_end;
  if (o.grid_format) c.grid.format = *o.grid_format;
  if (o.out) c.output = *o.out;
  if (o.seed) c.seed = *o.seed;
  if (o.stable) c.stable_output = true;
  harnack::validate(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harnack inequality and expander laboratory"};
  app.require_subcommand(1);
  Overrides o;
  std::string chosen;
  for (const char* name : {"heat", "csf", "expander", "chain", "all"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " suite");
    add_options(*sub, o);
    sub->callback([&chosen, name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  ExperimentConfig cfg;
  try {
    cfg = build_config(chosen, o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  harnack::RunResult res;
  try {
    res = harnack::run_experiment(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  for (const auto& s : res.suites) {
    std::size_t passed = 0;
    for (const auto& k : s.checks) passed += k.pass;
    std::cout << s.suite << ": " << passed << "/" << s.checks.size() << " checks passed\n";
  }
  if (const auto* f = res.first_failure()) {
    std::cerr << "FAILED " << f->name << " (margin " << f->margin << ", budget " << f->budget << ")\n";
    return 1;
  }
  std::cout << "report: " << cfg.output << "/report.json\n";
  return 0;
}
