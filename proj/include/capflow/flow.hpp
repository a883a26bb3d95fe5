#pragma once

#include <limits>
#include <string>
#include <vector>

#include "capflow/geometry.hpp"
#include "capflow/quermass.hpp"
#include "capflow/symfunc.hpp"

namespace capflow::flow {

enum class FlowKind { icf, mcf };
FlowKind parse_flow_kind(const std::string& s);
std::string to_string(FlowKind k);

struct StopThresholds {
  double min_F = 0.02;
  double max_abs_u = 6;
  double max_angle_residual = 0.1;
};

struct FlowConfig {
  FlowKind kind = FlowKind::icf;
  symfunc::CurvatureFunctionSpec spec;
  double theta = 1.5707963267948966;
  int n = 2;
  geometry::GridMode mode = geometry::GridMode::axisymmetric;
  int n_beta = 100;
  int n_xi = 32;
  double dt_safety = 0.9;
  double t_max = 1.0;
  StopThresholds stop;
  int monitor_every = 1;
  long max_steps = 100000000;

  void validate() const;
  geometry::HalfSphereGrid make_grid() const;
};

enum class StopReason { t_max, min_F, max_u, angle_residual, convexity_loss, max_steps };
std::string to_string(StopReason r);

std::vector<geometry::BoundaryGhost> fill_boundary_ghosts(const geometry::HalfSphereGrid& grid);

// Per-node normal speed f and the induced du/dt = -v f / (rho e^omega).
struct SpeedField {
  std::vector<double> normal_speed;
  std::vector<double> dudt;
  std::vector<double> diffusion;  // per-node stiffness scale used by the step control
  double min_F = std::numeric_limits<double>::infinity();
};

SpeedField icf_speed(const geometry::HalfSphereGrid& grid, const symfunc::CurvatureFunctionSpec& spec);
SpeedField mcf_speed(const geometry::HalfSphereGrid& grid);
SpeedField evaluate_speed(const geometry::HalfSphereGrid& grid, const FlowConfig& config);

double dt_control(const geometry::HalfSphereGrid& grid, const SpeedField& speed, const FlowConfig& config);
// Explicit midpoint step; `first` may carry the speed already evaluated at the current state.
void step(geometry::HalfSphereGrid& grid, const FlowConfig& config, double dt, const SpeedField* first = nullptr);

struct FlowTraceRow {
  long step = 0;
  double t = 0;
  quermass::QuermassVector W;
  double max_F = 0;
  double max_H = 0;
  double Q = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> phi;  // AF deficit monitors, k = 1..(n-1)/2
  double convexity_monitor = std::numeric_limits<double>::quiet_NaN();
  double log_htilde_max = std::numeric_limits<double>::quiet_NaN();
  double log_height_min = std::numeric_limits<double>::quiet_NaN();
  double height_min = 0;
  double height_max = 0;
  double angle_residual = 0;
  double kappa_min = 0;
  double dt = 0;
  double umbilicity = 0;
  double lambda = 0;  // min over the surface of -<nu, e>
  double tstar_remaining = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> flux;  // int E_k f dA, k = 0..n
};

struct FlowTrace {
  FlowConfig config;
  std::vector<FlowTraceRow> rows;
  StopReason reason = StopReason::t_max;
  std::string message;
  long steps = 0;
};

FlowTraceRow monitors(const geometry::GeometryFields& fields, const quermass::QuermassVector& W, double t,
                      const FlowConfig& config);
double q_monitor(const quermass::QuermassVector& W);
double q_limit(int n);
double af_deficit(const quermass::QuermassVector& W, int k);

FlowTrace run(const FlowConfig& config, geometry::HalfSphereGrid grid);

std::vector<std::string> trace_columns(int n);
std::string trace_csv(const FlowTrace& trace);

}  // namespace capflow::flow
