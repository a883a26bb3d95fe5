#include <cmath>
#include <numbers>
#include <sstream>

#include "capflow/errors.hpp"
#include "capflow/flow.hpp"
#include "capflow/initial_data.hpp"
#include "capflow/parallel.hpp"
#include "doctest.h"

using namespace capflow;
using namespace capflow::flow;
using geometry::GridMode;
using geometry::HalfSphereGrid;

namespace {

constexpr double kPi = std::numbers::pi;

FlowConfig config(FlowKind kind, int n, double theta, int N, double t_max) {
  FlowConfig c;
  c.kind = kind;
  c.n = n;
  c.theta = theta;
  c.n_beta = N;
  c.t_max = t_max;
  return c;
}

HalfSphereGrid grid_for(const FlowConfig& c, std::optional<double> r, double eps = 0) {
  auto g = c.make_grid();
  mobius::InitialDataSpec s;
  s.kind = eps == 0 ? mobius::InitialKind::cap : mobius::InitialKind::perturbed_cap;
  s.cap = r ? mobius::CapSpec::cap(c.theta, *r) : mobius::CapSpec::flat(c.theta);
  s.epsilon = eps;
  if (!r) s.convexity = mobius::ConvexityRequirement::weak;
  mobius::initial_data(s, g);
  return g;
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

}  // namespace

TEST_CASE("configuration validation") {
  CHECK(parse_flow_kind("icf") == FlowKind::icf);
  CHECK(parse_flow_kind("mcf") == FlowKind::mcf);
  CHECK_THROWS_AS(parse_flow_kind("gauss"), ConfigError);
  auto c = config(FlowKind::icf, 2, kPi / 2, 20, 0.1);
  CHECK_NOTHROW(c.validate());
  c.dt_safety = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.dt_safety = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = config(FlowKind::icf, 2, kPi / 2, 20, 0.1);
  c.stop.min_F = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = config(FlowKind::icf, 2, 2.0, 20, 0.1);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = config(FlowKind::icf, 2, kPi / 2, 20, 0.1);
  c.monitor_every = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("dt control rejects a zero safety factor") {
  auto c = config(FlowKind::icf, 2, kPi / 2, 40, 0.1);
  const auto g = grid_for(c, 1.0);
  const auto s = evaluate_speed(g, c);
  c.dt_safety = 0;
  CHECK_THROWS_AS(dt_control(g, s, c), ConfigError);
}

TEST_CASE("boundary ghosts are homogeneous Neumann at a right angle") {
  const auto c = config(FlowKind::icf, 3, kPi / 2, 40, 0.1);
  for (const auto& b : fill_boundary_ghosts(grid_for(c, 1.3, 0.05))) CHECK(b.target == 0);
  const auto c3 = config(FlowKind::icf, 2, kPi / 3, 40, 0.1);
  for (const auto& b : fill_boundary_ghosts(grid_for(c3, 1.0))) CHECK(b.target == doctest::Approx(-1 / std::sqrt(3.0)));
}

TEST_CASE("inverse flow speed on caps") {
  const auto c = config(FlowKind::icf, 2, kPi / 2, 200, 0.1);
  const auto s1 = evaluate_speed(grid_for(c, 1.0), c);
  const auto s2 = evaluate_speed(grid_for(c, 0.5), c);
  CHECK(spread(s1.normal_speed) <= 1e-6);
  CHECK(s1.normal_speed[0] == doctest::Approx(1.0).epsilon(1e-6));
  // Halving the radius doubles F and halves the speed.
  for (std::size_t i = 0; i < s1.normal_speed.size(); ++i)
    CHECK(s2.normal_speed[i] == doctest::Approx(0.5 * s1.normal_speed[i]).epsilon(1e-3));
  for (double v : s1.normal_speed) CHECK(v >= 0);
  CHECK(s1.min_F == doctest::Approx(1.0).epsilon(1e-6));
  const auto cp = config(FlowKind::icf, 3, kPi / 3, 80, 0.1);
  for (double v : evaluate_speed(grid_for(cp, 1.0, 0.05), cp).normal_speed) CHECK(v > 0);
}

TEST_CASE("speed and graph velocity are related by the conformal factor") {
  const auto c = config(FlowKind::icf, 2, kPi / 3, 60, 0.1);
  const auto g = grid_for(c, 1.2, 0.04);
  const auto s = evaluate_speed(g, c);
  const auto jets = geometry::node_jets(g);
  for (std::size_t i = 0; i < jets.size(); ++i) {
    const auto cn = geometry::conformal_node(jets[i], g.mode());
    CHECK(s.dudt[i] == doctest::Approx(-cn.v * s.normal_speed[i] / (cn.rho * cn.conformal)).epsilon(1e-12));
  }
}

TEST_CASE("mean curvature flow speed") {
  const auto c = config(FlowKind::mcf, 2, kPi / 2, 80, 0.1);
  for (double v : evaluate_speed(grid_for(c, std::nullopt), c).normal_speed) CHECK(std::abs(v) <= 1e-8);
  const auto s = evaluate_speed(grid_for(c, 2.0), c);
  for (double v : s.normal_speed) CHECK(v == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("flat disk is outside the inverse flow cone") {
  const auto c = config(FlowKind::icf, 2, kPi / 2, 40, 0.1);
  CHECK_THROWS_AS(evaluate_speed(grid_for(c, std::nullopt), c), ConvexityLoss);
  const auto trace = run(c, grid_for(c, std::nullopt));
  CHECK(trace.reason == StopReason::convexity_loss);
}

TEST_CASE("zero step is the identity") {
  for (auto kind : {FlowKind::icf, FlowKind::mcf}) {
    auto c = config(kind, 2, kPi / 3, 40, 0.1);
    auto g = grid_for(c, 1.0, 0.05);
    const auto before = g.values();
    step(g, c, 0.0);
    CHECK(g.values() == before);
    c.mode = GridMode::full2d;
    c.n_xi = 16;
    auto f = grid_for(c, 1.0, 0.05);
    const auto fb = f.values();
    step(f, c, 0.0);
    CHECK(f.values() == fb);
  }
}

TEST_CASE("parabolic step size scaling") {
  auto c = config(FlowKind::icf, 2, kPi / 2, 50, 0.1);
  const auto g1 = grid_for(c, 1.5, 0.05);
  const double dt1 = dt_control(g1, evaluate_speed(g1, c), c);
  c.n_beta = 100;
  const auto g2 = grid_for(c, 1.5, 0.05);
  const double dt2 = dt_control(g2, evaluate_speed(g2, c), c);
  CHECK(dt1 / dt2 == doctest::Approx(4).epsilon(0.05));
}

TEST_CASE("inverse flow grows W1 exponentially") {
  auto c = config(FlowKind::icf, 2, kPi / 2, 100, 0.02);
  c.monitor_every = 10;
  const auto trace = run(c, grid_for(c, 1.0));
  REQUIRE(trace.rows.size() >= 2);
  CHECK(trace.reason == StopReason::t_max);
  const auto& first = trace.rows.front();
  const auto& last = trace.rows.back();
  CHECK(last.t == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(last.W.W(1) / first.W.W(1) == doctest::Approx(std::exp(2 * last.t)).epsilon(1e-4));
  for (std::size_t i = 1; i < trace.rows.size(); ++i) {
    const auto& a = trace.rows[i - 1];
    const auto& b = trace.rows[i];
    CHECK(b.t > a.t);
    CHECK(b.max_F <= a.max_F * (1 + 1e-6));
    CHECK(b.max_H <= a.max_H * (1 + 1e-6));
    CHECK(b.height_min > 0);
    CHECK(b.angle_residual <= 10 * (first.angle_residual + 1e-3));
  }
}

TEST_CASE("Q decreases along the inverse flow for n = 3") {
  auto c = config(FlowKind::icf, 3, kPi / 2, 60, 0.05);
  c.monitor_every = 20;
  const auto trace = run(c, grid_for(c, 1.0, 0.05));
  REQUIRE(trace.rows.size() >= 3);
  for (std::size_t i = 1; i < trace.rows.size(); ++i) CHECK(trace.rows[i].Q < trace.rows[i - 1].Q - 1e-9);
  CHECK(trace.rows.back().Q > q_limit(3));
  CHECK(q_limit(3) == doctest::Approx(std::cbrt(3.0) * std::pow(kPi, 2.0 / 3) / 2).epsilon(1e-12));
}

TEST_CASE("mean curvature flow shrinks the enclosed volume") {
  auto c = config(FlowKind::mcf, 2, kPi / 3, 60, 0.01);
  c.monitor_every = 50;
  const auto trace = run(c, grid_for(c, 1.0));
  REQUIRE(trace.rows.size() >= 2);
  for (std::size_t i = 1; i < trace.rows.size(); ++i) CHECK(trace.rows[i].W.volume < trace.rows[i - 1].W.volume);
}

TEST_CASE("stop thresholds") {
  auto c = config(FlowKind::icf, 2, kPi / 2, 40, 1.0);
  c.stop.min_F = 0.95;
  auto trace = run(c, grid_for(c, 1.0));
  CHECK(trace.reason == StopReason::min_F);
  CHECK(trace.rows.back().max_F < 1.0);
  c = config(FlowKind::icf, 2, kPi / 2, 40, 1.0);
  c.max_steps = 5;
  trace = run(c, grid_for(c, 1.0));
  CHECK(trace.reason == StopReason::max_steps);
  CHECK(trace.steps == 5);
  c = config(FlowKind::icf, 2, kPi / 2, 40, 1.0);
  c.stop.max_abs_u = 0.3;
  trace = run(c, grid_for(c, 1.0));
  CHECK(trace.reason == StopReason::max_u);
}

TEST_CASE("trace csv layout and determinism across thread counts") {
  auto c = config(FlowKind::icf, 3, kPi / 3, 40, 0.01);
  c.monitor_every = 7;
  const auto g = grid_for(c, 1.0, 0.05);
  set_thread_count(1);
  const auto a = trace_csv(run(c, g));
  set_thread_count(3);
  const auto b = trace_csv(run(c, g));
  set_thread_count(1);
  CHECK(a == b);
  std::istringstream in(a);
  std::string header;
  std::getline(in, header);
  const auto cols = trace_columns(3);
  CHECK(std::count(header.begin(), header.end(), ',') + 1 == static_cast<long>(cols.size()));
  CHECK(header.rfind("t,W0,W1,", 0) == 0);
}
