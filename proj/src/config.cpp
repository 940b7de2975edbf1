#include "harnack/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <regex>
#include <set>
#include <sstream>

namespace harnack {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where.empty() ? "config" : where, "expected an object");
  const std::set<std::string> known(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw ConfigError(where.empty() ? k : where + "." + k, "unknown key");
  }
}

std::string path(const std::string& where, const char* key) { return where.empty() ? key : where + "." + key; }

template <class T>
void read(const json& j, const std::string& where, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path(where, key), "wrong type");
  }
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  reject_unknown(j, "", {"experiment", "curve", "heat", "N_sequence", "limit_N", "sigma_N", "grid", "flow",
                         "tolerances", "output", "seed", "stable_output"});
  read(j, "", "experiment", c.experiment);
  read(j, "", "N_sequence", c.N_sequence);
  read(j, "", "limit_N", c.limit_N);
  read(j, "", "sigma_N", c.sigma_N);
  read(j, "", "output", c.output);
  read(j, "", "seed", c.seed);
  read(j, "", "stable_output", c.stable_output);
  if (j.contains("curve")) {
    const json& k = j["curve"];
    reject_unknown(k, "curve", {"preset", "radius", "a", "b", "samples", "M"});
    read(k, "curve", "preset", c.curve.preset);
    read(k, "curve", "radius", c.curve.radius);
    read(k, "curve", "a", c.curve.a);
    read(k, "curve", "b", c.curve.b);
    read(k, "curve", "samples", c.curve.samples);
    read(k, "curve", "M", c.curve.M);
  }
  if (j.contains("heat")) {
    const json& k = j["heat"];
    reject_unknown(k, "heat", {"dim", "sources", "time_shift", "random_tuples"});
    read(k, "heat", "dim", c.heat.dim);
    read(k, "heat", "time_shift", c.heat.time_shift);
    read(k, "heat", "random_tuples", c.heat.random_tuples);
    if (k.contains("sources")) {
      if (!k["sources"].is_array()) throw ConfigError("heat.sources", "expected an array");
      for (std::size_t i = 0; i < k["sources"].size(); ++i) {
        const json& s = k["sources"][i];
        const std::string where = "heat.sources[" + std::to_string(i) + "]";
        reject_unknown(s, where, {"location", "weight"});
        std::vector<double> loc;
        heat::PointSource p;
        read(s, where, "location", loc);
        read(s, where, "weight", p.weight);
        require(loc.size() == std::size_t(c.heat.dim), where + ".location", "length must equal heat.dim");
        p.location = heat::Point::Zero();
        for (std::size_t d = 0; d < loc.size(); ++d) p.location[Eigen::Index(d)] = loc[d];
        c.heat.sources.push_back(p);
      }
    }
  }
  if (j.contains("grid")) {
    const json& k = j["grid"];
    reject_unknown(k, "grid", {"L", "resolution", "format"});
    read(k, "grid", "L", c.grid.L);
    read(k, "grid", "resolution", c.grid.resolution);
    read(k, "grid", "format", c.grid.format);
  }
  if (j.contains("flow")) {
    const json& k = j["flow"];
    reject_unknown(k, "flow", {"dt", "t_end"});
    read(k, "flow", "dt", c.flow.dt);
    read(k, "flow", "t_end", c.flow.t_end);
  }
  if (j.contains("tolerances")) {
    const json& k = j["tolerances"];
    Tolerances& t = c.tolerances;
    reject_unknown(k, "tolerances",
                   {"heat_equality", "heat_positivity", "classical", "sharpness", "circle_radius", "area_rate",
                    "identity_factor", "circle_Z", "path_relative", "sigma_spread", "sigma_final",
                    "residual_ratio", "radial_residual"});
    read(k, "tolerances", "heat_equality", t.heat_equality);
    read(k, "tolerances", "heat_positivity", t.heat_positivity);
    read(k, "tolerances", "classical", t.classical);
    read(k, "tolerances", "sharpness", t.sharpness);
    read(k, "tolerances", "circle_radius", t.circle_radius);
    read(k, "tolerances", "area_rate", t.area_rate);
    read(k, "tolerances", "identity_factor", t.identity_factor);
    read(k, "tolerances", "circle_Z", t.circle_Z);
    read(k, "tolerances", "path_relative", t.path_relative);
    read(k, "tolerances", "sigma_spread", t.sigma_spread);
    read(k, "tolerances", "sigma_final", t.sigma_final);
    read(k, "tolerances", "residual_ratio", t.residual_ratio);
    read(k, "tolerances", "radial_residual", t.radial_residual);
  }
  validate(c);
  return c;
}

void validate(const ExperimentConfig& c) {
  static const std::set<std::string> experiments = {"heat", "csf", "expander", "chain", "all"};
  require(experiments.count(c.experiment) > 0, "experiment", "must be one of heat, csf, expander, chain, all");
  require(c.curve.preset == "circle" || c.curve.preset == "ellipse" || c.curve.preset == "generic", "curve.preset",
          "must be circle, ellipse or generic");
  require(positive(c.curve.radius), "curve.radius", "must be positive");
  require(positive(c.curve.a), "curve.a", "must be positive");
  require(positive(c.curve.b), "curve.b", "must be positive");
  require(c.curve.M >= 64 && (c.curve.M & (c.curve.M - 1)) == 0, "curve.M", "must be a power of two >= 64");
  if (c.curve.preset == "generic") {
    require(c.curve.samples.size() >= 64 && (c.curve.samples.size() & (c.curve.samples.size() - 1)) == 0,
            "curve.samples", "need a power-of-two count >= 64");
  }
  require(c.heat.dim == 1 || c.heat.dim == 2, "heat.dim", "must be 1 or 2");
  for (std::size_t i = 0; i < c.heat.sources.size(); ++i)
    require(positive(c.heat.sources[i].weight), "heat.sources[" + std::to_string(i) + "].weight", "must be positive");
  require(std::isfinite(c.heat.time_shift) && c.heat.time_shift >= 0.0, "heat.time_shift", "must be nonnegative");
  require(c.heat.random_tuples >= 1, "heat.random_tuples", "must be at least 1");
  for (const auto& [name, seq] : {std::pair{"N_sequence", &c.N_sequence}, {"limit_N", &c.limit_N}, {"sigma_N", &c.sigma_N}}) {
    for (double N : *seq) require(std::isfinite(N) && N >= 1.0, name, "entries must be >= 1");
  }
  require(c.limit_N.size() >= 2, "limit_N", "need at least two values");
  require(c.sigma_N.size() >= 2, "sigma_N", "need at least two values");
  require(std::isfinite(c.grid.L) && c.grid.L >= 0.0, "grid.L", "must be nonnegative (0 picks the default)");
  require(c.grid.resolution >= 5 && c.grid.resolution % 2 == 1, "grid.resolution", "must be odd and >= 5");
  require(c.grid.format == "bin" || c.grid.format == "csv", "grid.format", "must be bin or csv");
  require(positive(c.flow.dt), "flow.dt", "must be positive");
  require(std::isfinite(c.flow.t_end) && c.flow.t_end >= 0.0, "flow.t_end", "must be nonnegative");
  const Tolerances& t = c.tolerances;
  for (const auto& [name, v] :
       {std::pair{"tolerances.heat_equality", t.heat_equality}, {"tolerances.heat_positivity", t.heat_positivity},
        {"tolerances.classical", t.classical}, {"tolerances.sharpness", t.sharpness},
        {"tolerances.circle_radius", t.circle_radius}, {"tolerances.area_rate", t.area_rate},
        {"tolerances.identity_factor", t.identity_factor}, {"tolerances.circle_Z", t.circle_Z},
        {"tolerances.path_relative", t.path_relative}, {"tolerances.sigma_spread", t.sigma_spread},
        {"tolerances.sigma_final", t.sigma_final}, {"tolerances.residual_ratio", t.residual_ratio},
        {"tolerances.radial_residual", t.radial_residual}}) {
    require(positive(v), name, "must be positive");
  }
  require(!c.output.empty(), "output", "must not be empty");
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  json sources = json::array();
  for (const auto& s : c.heat.sources) {
    std::vector<double> loc(s.location.data(), s.location.data() + c.heat.dim);
    sources.push_back({{"location", loc}, {"weight", s.weight}});
  }
  const Tolerances& t = c.tolerances;
  return json{{"experiment", c.experiment},
              {"curve",
               {{"preset", c.curve.preset},
                {"radius", c.curve.radius},
                {"a", c.curve.a},
                {"b", c.curve.b},
                {"samples", c.curve.samples},
                {"M", c.curve.M}}},
              {"heat",
               {{"dim", c.heat.dim},
                {"sources", sources},
                {"time_shift", c.heat.time_shift},
                {"random_tuples", c.heat.random_tuples}}},
              {"N_sequence", c.N_sequence},
              {"limit_N", c.limit_N},
              {"sigma_N", c.sigma_N},
              {"grid", {{"L", c.grid.L}, {"resolution", c.grid.resolution}, {"format", c.grid.format}}},
              {"flow", {{"dt", c.flow.dt}, {"t_end", c.flow.t_end}}},
              {"tolerances",
               {{"heat_equality", t.heat_equality},
                {"heat_positivity", t.heat_positivity},
                {"classical", t.classical},
                {"sharpness", t.sharpness},
                {"circle_radius", t.circle_radius},
                {"area_rate", t.area_rate},
                {"identity_factor", t.identity_factor},
                {"circle_Z", t.circle_Z},
                {"path_relative", t.path_relative},
                {"sigma_spread", t.sigma_spread},
                {"sigma_final", t.sigma_final},
                {"residual_ratio", t.residual_ratio},
                {"radial_residual", t.radial_residual}}},
              {"output", c.output},
              {"seed", c.seed},
              {"stable_output", c.stable_output}};
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(std::remove_if(tok.begin(), tok.end(), ::isspace), tok.end());
    if (tok.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw std::invalid_argument("not a number: '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<heat::PointSource> parse_sources(const std::string& text, int& dim) {
  static const std::regex tuple(R"(\(([^()]*)\))");
  std::vector<heat::PointSource> out;
  dim = 0;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), tuple); it != std::sregex_iterator(); ++it) {
    const std::vector<double> v = parse_list((*it)[1].str());
    if (v.size() < 2 || v.size() > 3) throw std::invalid_argument("source tuples need 2 or 3 numbers");
    const int d = int(v.size()) - 1;
    if (dim != 0 && d != dim) throw std::invalid_argument("sources mix dimensions");
    dim = d;
    heat::PointSource p;
    p.location = heat::Point::Zero();
    for (int k = 0; k < d; ++k) p.location[k] = v[std::size_t(k)];
    p.weight = v.back();
    out.push_back(p);
  }
  if (out.empty()) throw std::invalid_argument("no source tuples found");
  return out;
}

}  // namespace harnack
