#include "capflow/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "capflow/errors.hpp"
#include "json.hpp"

namespace capflow::config {

using nlohmann::json;

bool RunConfig::emits(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
T get(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("wrong type for '") + key + "'");
  }
}

double get_number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return obj.at(key).get<double>();
}

int get_int(const json& obj, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer");
  return obj.at(key).get<int>();
}

mobius::ConvexityRequirement parse_convexity(const std::string& s) {
  if (s == "strict") return mobius::ConvexityRequirement::strict;
  if (s == "weak") return mobius::ConvexityRequirement::weak;
  if (s == "none") return mobius::ConvexityRequirement::none;
  throw ConfigError("unknown convexity requirement '" + s + "'");
}

void parse_flow(const json& j, flow::FlowConfig& f) {
  check_keys(j, "flow", {"kind", "curvature", "dt_safety", "t_max", "monitor_every", "max_steps", "stop"});
  f.kind = flow::parse_flow_kind(get<std::string>(j, "kind", "icf"));
  if (j.contains("curvature")) {
    const auto& c = j.at("curvature");
    check_keys(c, "flow.curvature", {"k", "l"});
    f.spec.k = get_int(c, "k", 1);
    f.spec.l = get_int(c, "l", 0);
  }
  f.dt_safety = get_number(j, "dt_safety", f.dt_safety);
  f.t_max = get_number(j, "t_max", f.t_max);
  f.monitor_every = get_int(j, "monitor_every", f.monitor_every);
  if (j.contains("max_steps")) {
    if (!j.at("max_steps").is_number_integer()) throw ConfigError("'max_steps' must be an integer");
    f.max_steps = j.at("max_steps").get<long>();
  }
  if (j.contains("stop")) {
    const auto& s = j.at("stop");
    check_keys(s, "flow.stop", {"min_F", "max_abs_u", "max_angle_residual"});
    f.stop.min_F = get_number(s, "min_F", f.stop.min_F);
    f.stop.max_abs_u = get_number(s, "max_abs_u", f.stop.max_abs_u);
    f.stop.max_angle_residual = get_number(s, "max_angle_residual", f.stop.max_angle_residual);
  }
}

void parse_initial(const json& j, RunConfig& cfg) {
  check_keys(j, "initial", {"kind", "radius", "epsilon", "bump_power", "xi_amplitude", "coefficients", "convexity"});
  auto& s = cfg.initial;
  s.kind = mobius::parse_initial_kind(get<std::string>(j, "kind", "cap"));
  s.cap.theta = cfg.flow.theta;
  if (j.contains("radius") && !j.at("radius").is_null()) {
    if (!j.at("radius").is_number()) throw ConfigError("'radius' must be a number or null");
    s.cap.radius = j.at("radius").get<double>();
  } else if (j.contains("radius")) {
    s.cap.radius.reset();
  } else {
    s.cap.radius = 1.0;
  }
  s.epsilon = get_number(j, "epsilon", 0.0);
  s.bump_power = get_int(j, "bump_power", 2);
  s.xi_amplitude = get_number(j, "xi_amplitude", 0.0);
  s.coefficients = get<std::vector<double>>(j, "coefficients", {});
  s.convexity = parse_convexity(get<std::string>(j, "convexity", "strict"));
}

void parse_verify(const json& j, RunConfig& cfg) {
  check_keys(j, "verify", {"samples", "af_tolerance", "table_tolerance", "quermass"});
  cfg.samples = get_int(j, "samples", cfg.samples);
  if (cfg.samples < 1) throw ConfigError("'samples' must be positive");
  cfg.af_tolerance = get_number(j, "af_tolerance", cfg.af_tolerance);
  cfg.table_tolerance = get_number(j, "table_tolerance", cfg.table_tolerance);
  if (!(cfg.af_tolerance >= 0 && cfg.table_tolerance >= 0)) throw ConfigError("tolerances must be nonnegative");
  if (j.contains("quermass")) {
    const auto& q = j.at("quermass");
    check_keys(q, "verify.quermass", {"analytic", "W"});
    QuermassFixture fx;
    if (q.contains("analytic")) {
      fx.analytic = get<std::string>(q, "analytic", "");
      if (*fx.analytic != "flat_ball") throw ConfigError("unknown analytic fixture '" + *fx.analytic + "'");
    }
    fx.W = get<std::vector<double>>(q, "W", {});
    if (fx.analytic.has_value() == !fx.W.empty()) throw ConfigError("verify.quermass needs exactly one of analytic or W");
    if (!fx.W.empty() && fx.W.size() != static_cast<std::size_t>(cfg.flow.n + 2))
      throw ConfigError("verify.quermass.W needs n+2 entries");
    cfg.quermass = fx;
  }
}

void parse_captable(const json& j, RunConfig& cfg) {
  check_keys(j, "captable", {"k", "radii", "n_beta"});
  cfg.captable.ks = get<std::vector<int>>(j, "k", {});
  if (j.contains("radii")) cfg.captable.radii = get<std::vector<double>>(j, "radii", {});
  cfg.captable.n_beta = get_int(j, "n_beta", cfg.captable.n_beta);
}

}  // namespace

void set_formats(RunConfig& cfg, const std::string& format) {
  if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
  cfg.formats = {format};
}

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  check_keys(j, "config", {"flow", "n", "theta", "theta_over_pi", "grid", "initial", "output_dir", "formats", "seed",
                           "verify", "captable"});
  RunConfig cfg;
  cfg.flow.n = get_int(j, "n", 2);
  if (j.contains("theta") && j.contains("theta_over_pi")) throw ConfigError("give theta or theta_over_pi, not both");
  if (j.contains("theta_over_pi")) {
    const double f = get_number(j, "theta_over_pi", 0.5);
    cfg.flow.theta = f == 0.5 ? std::numbers::pi / 2 : f * std::numbers::pi;
  } else {
    cfg.flow.theta = get_number(j, "theta", std::numbers::pi / 2);
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    check_keys(g, "grid", {"mode", "n_beta", "n_xi"});
    try {
      cfg.flow.mode = geometry::parse_grid_mode(get<std::string>(g, "mode", "axisymmetric"));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    cfg.flow.n_beta = get_int(g, "n_beta", cfg.flow.n_beta);
    cfg.flow.n_xi = get_int(g, "n_xi", cfg.flow.n_xi);
  }
  if (j.contains("flow")) parse_flow(j.at("flow"), cfg.flow);
  cfg.flow.validate();
  try {
    parse_initial(j.contains("initial") ? j.at("initial") : json::object(), cfg);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  cfg.output_dir = get<std::string>(j, "output_dir", "out");
  if (j.contains("formats")) {
    cfg.formats = get<std::vector<std::string>>(j, "formats", {});
    if (cfg.formats.empty()) throw ConfigError("formats must not be empty");
    for (const auto& f : cfg.formats)
      if (f != "csv" && f != "json") throw ConfigError("unknown format '" + f + "'");
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !(j.at("seed").is_number_integer() && j.at("seed").get<long long>() >= 0))
      throw ConfigError("'seed' must be a nonnegative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("verify")) parse_verify(j.at("verify"), cfg);
  if (j.contains("captable")) parse_captable(j.at("captable"), cfg);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

geometry::HalfSphereGrid initial_grid(const RunConfig& cfg) {
  auto grid = cfg.flow.make_grid();
  mobius::initial_data(cfg.initial, grid);
  return grid;
}

quermass::QuermassVector fixture_quermass(const RunConfig& cfg) {
  const int n = cfg.flow.n;
  const double theta = cfg.flow.theta;
  if (cfg.quermass) {
    if (cfg.quermass->analytic) return quermass::flat_ball_reference(n, theta);
    quermass::QuermassVector q;
    q.n = n;
    q.theta = theta;
    q.Wtheta = cfg.quermass->W;
    return q;
  }
  const auto coarse = quermass::assemble_W(geometry::fundamental_forms(initial_grid(cfg)));
  if (cfg.flow.mode != geometry::GridMode::axisymmetric) return coarse;
  RunConfig fine = cfg;
  fine.flow.n_beta *= 2;
  return quermass::richardson(coarse, quermass::assemble_W(geometry::fundamental_forms(initial_grid(fine))));
}

}  // namespace capflow::config
