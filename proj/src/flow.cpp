#include "capflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "capflow/errors.hpp"
#include "capflow/parallel.hpp"

namespace capflow::flow {

using geometry::GridMode;
using geometry::HalfSphereGrid;

FlowKind parse_flow_kind(const std::string& s) {
  if (s == "icf") return FlowKind::icf;
  if (s == "mcf") return FlowKind::mcf;
  throw ConfigError("unknown flow kind '" + s + "'");
}

std::string to_string(FlowKind k) { return k == FlowKind::icf ? "icf" : "mcf"; }

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::t_max: return "t_max";
    case StopReason::min_F: return "min_F";
    case StopReason::max_u: return "max_u";
    case StopReason::angle_residual: return "angle_residual";
    case StopReason::convexity_loss: return "convexity_loss";
    case StopReason::max_steps: return "max_steps";
  }
  return "unknown";
}

void FlowConfig::validate() const {
  if (n < 2) throw ConfigError("dimension n must be at least 2");
  if (!(theta > 0 && theta <= std::numbers::pi / 2 + 1e-15)) throw ConfigError("theta must lie in (0, pi/2]");
  if (!(dt_safety > 0 && dt_safety <= 1)) throw ConfigError("dt_safety must lie in (0, 1]");
  if (!(t_max > 0) || !std::isfinite(t_max)) throw ConfigError("t_max must be positive and finite");
  if (!(stop.min_F > 0 && stop.max_abs_u > 0 && stop.max_angle_residual > 0))
    throw ConfigError("stop thresholds must be positive");
  if (monitor_every < 1) throw ConfigError("monitor cadence must be at least 1");
  if (max_steps < 1) throw ConfigError("max_steps must be at least 1");
  if (mode == GridMode::full2d && n != 2) throw ConfigError("full2d grids require n = 2");
  try {
    spec.validate(n);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

HalfSphereGrid FlowConfig::make_grid() const {
  validate();
  try {
    return HalfSphereGrid(n, mode, n_beta, mode == GridMode::full2d ? n_xi : 1, theta);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

std::vector<geometry::BoundaryGhost> fill_boundary_ghosts(const HalfSphereGrid& grid) {
  const double th = grid.theta();
  if (!(th > 0 && th <= std::numbers::pi / 2 + 1e-15)) throw ConfigError("theta must lie in (0, pi/2]");
  return geometry::boundary_ghosts(grid);
}

namespace {

SpeedField evaluate(const HalfSphereGrid& grid, FlowKind kind, const symfunc::CurvatureFunctionSpec& spec) {
  const auto jets = geometry::node_jets(grid);
  const std::size_t count = jets.size();
  SpeedField out;
  out.normal_speed.assign(count, 0.0);
  out.dudt.assign(count, 0.0);
  out.diffusion.assign(count, 0.0);
  std::vector<double> Fvals(count, 0.0);
  const int n = grid.n();
  parallel_for(count, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto c = geometry::conformal_node(jets[i], grid.mode());
      const auto kappa = geometry::expand_kappa(c.kappa, n, grid.mode());
      const double scale = c.rho * c.conformal;
      double f = 0, d = 0;
      if (kind == FlowKind::icf) {
        if (!symfunc::in_cone_of(kappa, spec))
          throw ConvexityLoss("curvature left the admissible cone at node " + std::to_string(i));
        const double F = symfunc::curvature_F(kappa, spec);
        double sumFi = 0;
        for (double g : symfunc::curvature_F_gradient(kappa, spec)) sumFi += g;
        f = 1 / F;
        d = sumFi / (F * F * scale * scale);
        Fvals[i] = F;
      } else {
        double H = 0;
        for (double k : kappa.values()) H += k;
        f = -H;
        d = n / (scale * scale);
      }
      const bool boundary = jets[i].j == grid.n_beta();
      out.normal_speed[i] = f;
      out.dudt[i] = -c.v * f / scale;
      out.diffusion[i] = boundary ? 2 * d : d;
    }
  });
  if (kind == FlowKind::icf)
    for (double F : Fvals) out.min_F = std::min(out.min_F, F);
  return out;
}

}  // namespace

SpeedField icf_speed(const HalfSphereGrid& grid, const symfunc::CurvatureFunctionSpec& spec) {
  spec.validate(grid.n());
  return evaluate(grid, FlowKind::icf, spec);
}

SpeedField mcf_speed(const HalfSphereGrid& grid) { return evaluate(grid, FlowKind::mcf, {}); }

SpeedField evaluate_speed(const HalfSphereGrid& grid, const FlowConfig& config) {
  return config.kind == FlowKind::icf ? icf_speed(grid, config.spec) : mcf_speed(grid);
}

double dt_control(const HalfSphereGrid& grid, const SpeedField& speed, const FlowConfig& config) {
  if (!(config.dt_safety > 0 && config.dt_safety <= 1)) throw ConfigError("dt_safety must lie in (0, 1]");
  double smax = 0, vmax = 0;
  for (double d : speed.diffusion) smax = std::max(smax, d);
  for (double v : speed.dudt) vmax = std::max(vmax, std::abs(v));
  if (!(smax > 0) || !std::isfinite(smax)) throw NumericalFailure("diffusion scale is not positive");
  double h = grid.h_beta();
  if (grid.mode() == GridMode::full2d) h = std::min(h, std::sin(grid.h_beta()) * grid.h_xi());
  double dt = config.dt_safety * h * h / (2 * smax);
  if (vmax > 0) dt = std::min(dt, 0.1 / vmax);
  return dt;
}

namespace {

void apply(HalfSphereGrid& grid, const std::vector<double>& base, const std::vector<double>& dudt, double dt) {
  auto& u = grid.values();
  const int M = grid.n_xi();
  if (grid.mode() == GridMode::axisymmetric) {
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = base[i] + dt * dudt[i];
  } else {
    for (int m = 0; m < M; ++m) u[grid.index(0, m)] = base[grid.index(0, m)] + dt * dudt[0];
    for (int j = 1; j <= grid.n_beta(); ++j)
      for (int m = 0; m < M; ++m) {
        const std::size_t node = 1 + static_cast<std::size_t>(j - 1) * M + m;
        u[grid.index(j, m)] = base[grid.index(j, m)] + dt * dudt[node];
      }
  }
  for (double x : u)
    if (!std::isfinite(x)) throw NumericalFailure("non-finite graph value after a step");
}

}  // namespace

void step(HalfSphereGrid& grid, const FlowConfig& config, double dt, const SpeedField* first) {
  if (!(dt >= 0) || !std::isfinite(dt)) throw NumericalFailure("invalid time step");
  if (dt == 0) return;
  const std::vector<double> base = grid.values();
  const SpeedField s1 = first ? *first : evaluate_speed(grid, config);
  apply(grid, base, s1.dudt, 0.5 * dt);
  const SpeedField s2 = evaluate_speed(grid, config);
  apply(grid, base, s2.dudt, dt);
}

double q_monitor(const quermass::QuermassVector& W) {
  const int n = W.n;
  if (n < 3) return std::numeric_limits<double>::quiet_NaN();
  const double W1 = W.W(1), W3 = W.W(3);
  return std::pow(W1, -static_cast<double>(n - 2) / n) * (W3 + static_cast<double>(n - 2) / (n - 1) * W1);
}

double q_limit(int n) {
  const double omega = symfunc::sphere_area(n - 1);
  return std::pow(n, static_cast<double>(n - 2) / n) / (n - 1) * std::pow(omega / (n + 1), 2.0 / n);
}

double af_deficit(const quermass::QuermassVector& W, int k) {
  const int n = W.n;
  const double W1 = W.W(1);
  return (W.W(2 * k + 1) - symfunc::af_rhs_A(n, k, W1)) / std::pow(W1, static_cast<double>(n - 2 * k) / n);
}

FlowTraceRow monitors(const geometry::GeometryFields& fields, const quermass::QuermassVector& W, double t,
                      const FlowConfig& config) {
  FlowTraceRow row;
  row.t = t;
  row.W = W;
  const int n = fields.n;
  row.Q = q_monitor(W);
  for (int k = 1; 2 * k + 1 <= n; ++k) row.phi.push_back(af_deficit(W, k));

  const auto rep = geometry::convexity_report(fields);
  row.kappa_min = rep.kappa_min;
  row.umbilicity = rep.umbilicity;
  row.height_min = rep.height_min;
  row.height_max = rep.height_max;
  row.lambda = -rep.nu_dot_e_max;

  const std::size_t count = fields.nodes.size();
  std::vector<double> f(count, 0.0);
  bool strict = rep.htilde_max.has_value() && rep.height_min > 0;
  double conv = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    const auto& kappa = fields.nodes[i].kappa;
    double H = 0;
    for (double k : kappa.values()) H += k;
    row.max_H = std::max(row.max_H, H);
    const bool admissible = symfunc::in_cone_of(kappa, config.spec);
    if (admissible) row.max_F = std::max(row.max_F, symfunc::curvature_F(kappa, config.spec));
    if (config.kind == FlowKind::icf)
      f[i] = admissible ? 1 / symfunc::curvature_F(kappa, config.spec) : std::numeric_limits<double>::quiet_NaN();
    else
      f[i] = -H;
    if (strict) {
      double ht = 0;
      for (double k : kappa.values()) ht += 1 / k;
      conv = std::max(conv, std::log(ht) - std::log(fields.nodes[i].X[2]));
    }
  }
  if (strict) {
    row.convexity_monitor = conv;
    row.log_htilde_max = std::log(*rep.htilde_max);
    row.log_height_min = std::log(rep.height_min);
  }
  for (int k = 0; k <= n; ++k) {
    std::vector<double> integrand(count);
    for (std::size_t i = 0; i < count; ++i)
      integrand[i] = symfunc::elementary(fields.nodes[i].kappa.values(), k) * f[i];
    row.flux.push_back(quermass::surface_integral(fields, integrand));
  }
  for (const auto& b : fields.boundary) row.angle_residual = std::max(row.angle_residual, std::abs(b.contact_residual));
  if (config.kind == FlowKind::icf && config.spec.is_mean() && std::abs(fields.theta - std::numbers::pi / 2) < 1e-12) {
    const double bn = symfunc::double_factorial_constants(n).ball_volume;
    row.tstar_remaining = std::log(bn / W.area()) / n;
  }
  return row;
}

FlowTrace run(const FlowConfig& config, HalfSphereGrid grid) {
  config.validate();
  if (grid.n() != config.n || grid.mode() != config.mode || grid.n_beta() != config.n_beta ||
      std::abs(grid.theta() - config.theta) > 1e-12)
    throw ConfigError("grid does not match the flow configuration");

  FlowTrace trace;
  trace.config = config;
  double t = 0, last_dt = 0;
  long steps = 0;
  const double t_eps = 1e-12 * std::max(1.0, config.t_max);

  auto record = [&]() {
    const auto fields = geometry::fundamental_forms(grid);
    auto row = monitors(fields, quermass::assemble_W(fields), t, config);
    row.step = steps;
    row.dt = last_dt;
    trace.rows.push_back(std::move(row));
  };

  while (true) {
    SpeedField speed;
    try {
      speed = evaluate_speed(grid, config);
    } catch (const ConvexityLoss& e) {
      if (trace.rows.empty() || trace.rows.back().step != steps) record();
      trace.reason = StopReason::convexity_loss;
      trace.message = e.what();
      break;
    }
    const bool done_time = config.t_max - t <= t_eps;
    double umax = 0;
    for (double x : grid.values()) umax = std::max(umax, std::abs(x));
    const bool stop_F = config.kind == FlowKind::icf && speed.min_F < config.stop.min_F;
    const bool stop_u = umax > config.stop.max_abs_u;
    const bool stop_steps = steps >= config.max_steps;
    if (steps % config.monitor_every == 0 || done_time || stop_F || stop_u || stop_steps) record();
    if (stop_F) {
      trace.reason = StopReason::min_F;
      trace.message = "min F fell below the threshold";
      break;
    }
    if (stop_u) {
      trace.reason = StopReason::max_u;
      trace.message = "graph function left the admissible range";
      break;
    }
    if (trace.rows.back().step == steps && trace.rows.back().angle_residual > config.stop.max_angle_residual) {
      trace.reason = StopReason::angle_residual;
      trace.message = "contact-angle residual exceeded the threshold";
      break;
    }
    if (done_time) {
      trace.reason = StopReason::t_max;
      break;
    }
    if (stop_steps) {
      trace.reason = StopReason::max_steps;
      trace.message = "step budget exhausted";
      break;
    }
    double dt = dt_control(grid, speed, config);
    dt = std::min(dt, config.t_max - t);
    try {
      step(grid, config, dt, &speed);
    } catch (const ConvexityLoss& e) {
      record();
      trace.reason = StopReason::convexity_loss;
      trace.message = e.what();
      break;
    }
    t += dt;
    last_dt = dt;
    ++steps;
  }
  trace.steps = steps;
  return trace;
}

std::vector<std::string> trace_columns(int n) {
  std::vector<std::string> cols{"t"};
  for (int k = 0; k <= n + 1; ++k) cols.push_back("W" + std::to_string(k));
  cols.insert(cols.end(), {"maxF", "maxH", "Q"});
  for (int k = 1; 2 * k + 1 <= n; ++k) cols.push_back("phi_" + std::to_string(k));
  cols.insert(cols.end(), {"height_min", "height_max", "angle_residual", "kappa_min", "dt"});
  return cols;
}

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string trace_csv(const FlowTrace& trace) {
  const int n = trace.config.n;
  std::ostringstream os;
  const auto cols = trace_columns(n);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : trace.rows) {
    os << num(r.t);
    for (int k = 0; k <= n + 1; ++k) os << ',' << num(r.W.W(k));
    os << ',' << num(r.max_F) << ',' << num(r.max_H) << ',' << num(r.Q);
    for (double p : r.phi) os << ',' << num(p);
    os << ',' << num(r.height_min) << ',' << num(r.height_max) << ',' << num(r.angle_residual) << ','
       << num(r.kappa_min) << ',' << num(r.dt) << '\n';
  }
  return os.str();
}

}  // namespace capflow::flow
