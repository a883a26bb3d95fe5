#include <algorithm>
#include <cmath>
#include <numbers>

#include "capflow/errors.hpp"
#include "capflow/geometry.hpp"
#include "capflow/initial_data.hpp"
#include "doctest.h"

using namespace capflow;
using namespace capflow::geometry;

namespace {

constexpr double kPi = std::numbers::pi;

HalfSphereGrid make_grid(int n, double theta, std::optional<double> r, int N, GridMode mode = GridMode::axisymmetric,
                         double eps = 0, double xi_amp = 0) {
  HalfSphereGrid g(n, mode, N, 16, theta);
  mobius::InitialDataSpec s;
  s.kind = eps == 0 ? mobius::InitialKind::cap : mobius::InitialKind::perturbed_cap;
  s.cap = r ? mobius::CapSpec::cap(theta, *r) : mobius::CapSpec::flat(theta);
  s.epsilon = eps;
  s.xi_amplitude = xi_amp;
  if (!r) s.convexity = mobius::ConvexityRequirement::weak;
  mobius::initial_data(s, g);
  return g;
}

double kappa_error(const GeometryFields& f, double exact) {
  double e = 0;
  for (const auto& node : f.nodes)
    for (double k : node.kappa.values()) e = std::max(e, std::abs(k - exact));
  return e;
}

double max_kernel_gap(const HalfSphereGrid& g) {
  const auto f = fundamental_forms(g);
  const auto k2 = conformal_graph_kernel(g);
  double e = 0;
  for (std::size_t i = 0; i < f.nodes.size(); ++i)
    for (int a = 0; a < g.n(); ++a) e = std::max(e, std::abs(f.nodes[i].kappa[a] - k2[i][a]));
  return e;
}

double max_boundary_residual(const GeometryFields& f) {
  double e = 0;
  for (const auto& b : f.boundary) e = std::max({e, b.contact_residual, b.transform_residual, b.principal_residual});
  return e;
}

}  // namespace

TEST_CASE("flat disk embeds on the plane and has zero curvature") {
  const auto g = make_grid(2, kPi / 2, std::nullopt, 64);
  for (const auto& X : embed(g)) CHECK(std::abs(X[2]) <= 1e-12);
  const auto f = fundamental_forms(g);
  CHECK(kappa_error(f, 0) <= 5e-4);
  const auto c = conformal_graph_kernel(g);
  for (const auto& k : c)
    for (double v : k.values()) CHECK(std::abs(v) <= 1e-8);
  for (const auto& b : f.boundary) CHECK(std::abs(b.hhat) <= 1e-8);
  const auto rep = convexity_report(f);
  CHECK(std::abs(rep.kappa_min) <= 1e-8);
  CHECK(std::abs(rep.kappa_max) <= 1e-8);
  CHECK_FALSE(rep.htilde_max.has_value());
}

TEST_CASE("cap embedding lies on the cap sphere and reaches the unit sphere at the boundary") {
  const auto g = make_grid(2, kPi / 2, 1.0, 100);
  const auto X = embed(g);
  for (const auto& x : X) CHECK(std::abs(norm(x - Vec3{0, 0, std::sqrt(2.0)}) - 1) <= 1e-10);
  CHECK(norm(X.back()) == doctest::Approx(1).epsilon(1e-12));
}

TEST_CASE("unit cap curvature and its convergence order") {
  // C_{pi/2,1} is represented exactly by the graph, so pick a non-constant one for the rate.
  const auto g = make_grid(2, kPi / 2, 1.0, 200);
  CHECK(kappa_error(fundamental_forms(g), 1.0) <= 5e-4);
  const double e1 = kappa_error(fundamental_forms(make_grid(2, kPi / 3, 2.0, 100)), 0.5);
  const double e2 = kappa_error(fundamental_forms(make_grid(2, kPi / 3, 2.0, 200)), 0.5);
  const double e3 = kappa_error(fundamental_forms(make_grid(2, kPi / 3, 2.0, 400)), 0.5);
  CHECK(e2 <= 5e-4);
  MESSAGE("cap C(pi/3,2) kappa errors " << e1 << " " << e2 << " " << e3);
  if (e3 > 1e-11) {
    CHECK(std::log2(e1 / e2) >= 1.8);
    CHECK(std::log2(e2 / e3) >= 1.8);
  }
}

TEST_CASE("higher dimensional caps are umbilic with curvature 1/r") {
  for (int n : {3, 5}) {
    const auto f = fundamental_forms(make_grid(n, kPi / 3, 1.5, 200));
    CHECK(kappa_error(f, 1 / 1.5) <= 5e-4);
    CHECK(convexity_report(f).umbilicity <= 1e-3);
  }
}

TEST_CASE("profile curvatures of a cap") {
  const auto pc = profile_curvatures(make_grid(3, kPi / 4, 0.8, 200));
  for (const auto& p : pc) {
    CHECK(p.kappa_profile == doctest::Approx(1.25).epsilon(1e-3));
    CHECK(p.kappa_rot == doctest::Approx(1.25).epsilon(1e-3));
  }
  for (const auto& p : profile_curvatures(make_grid(2, kPi / 2, std::nullopt, 50))) {
    CHECK(std::abs(p.kappa_profile) <= 1e-8);
    CHECK(std::abs(p.kappa_rot) <= 1e-8);
  }
  CHECK_THROWS_AS(profile_curvatures(make_grid(2, kPi / 2, 1.0, 16, GridMode::full2d)), DomainError);
}

TEST_CASE("profile kernel agrees with the frame kernel on a perturbed cap") {
  const auto g = make_grid(2, kPi / 2, 1.0, 400, GridMode::axisymmetric, 0.05);
  const auto f = fundamental_forms(g);
  const auto pc = profile_curvatures(g);
  double e = 0;
  for (std::size_t j = 0; j < pc.size(); ++j)
    e = std::max({e, std::abs(pc[j].kappa_profile - f.nodes[j].kappa_profile),
                  std::abs(pc[j].kappa_rot - f.nodes[j].kappa_rot)});
  CHECK(e <= 1e-6);
}

TEST_CASE("conformal kernel agrees with the frame kernel") {
  CHECK(max_kernel_gap(make_grid(2, kPi / 2, 1.0, 200)) <= 1e-9);
  CHECK(max_kernel_gap(make_grid(3, kPi / 3, 2.0, 200)) <= 1e-9);
  CHECK(max_kernel_gap(make_grid(4, kPi / 3, 0.7, 100, GridMode::axisymmetric, 0.04)) <= 1e-9);
  CHECK(max_kernel_gap(make_grid(2, kPi / 4, 1.2, 32, GridMode::full2d, 0.03, 0.5)) <= 1e-9);
}

TEST_CASE("boundary ghost values follow the capillary condition") {
  auto g = make_grid(2, kPi / 3, 1.0, 100);
  for (const auto& b : boundary_ghosts(g)) CHECK(b.target == doctest::Approx(-1 / std::sqrt(3.0)));
  auto flat = make_grid(2, kPi / 2, std::nullopt, 20);
  for (const auto& b : boundary_ghosts(flat)) CHECK(b.target == doctest::Approx(0).scale(1));
  // Full grid with tangential slope one on the boundary circle.
  HalfSphereGrid f(2, GridMode::full2d, 20, 16, kPi / 4);
  for (int j = 0; j <= 20; ++j)
    for (int m = 0; m < 16; ++m) f.u(j, m) = std::sin(f.xi(m));
  const auto gh = boundary_ghosts(f);
  REQUIRE(gh.size() == 16u);
  const auto& b0 = gh[0];  // psi = 0, d_psi u = 1 exactly, sin(beta) = 1 at the boundary
  const double h = f.h_xi();
  CHECK(b0.u_tangential == doctest::Approx(std::sin(h) / h).epsilon(1e-12));
  CHECK(b0.target == doctest::Approx(-std::sqrt(1 + b0.u_tangential * b0.u_tangential)));
  HalfSphereGrid fine(2, GridMode::full2d, 20, 256, kPi / 4);
  for (int j = 0; j <= 20; ++j)
    for (int m = 0; m < 256; ++m) fine.u(j, m) = std::sin(fine.xi(m));
  CHECK(boundary_ghosts(fine)[0].target == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-3));
}

TEST_CASE("boundary identities on caps and their refinement") {
  const auto f200 = fundamental_forms(make_grid(2, kPi / 3, 2.0, 200));
  for (const auto& b : f200.boundary) CHECK(b.contact_residual < 5e-3);
  const auto flat = fundamental_forms(make_grid(2, kPi / 2, std::nullopt, 64));
  for (const auto& b : flat.boundary) CHECK(std::abs(b.h_tangent - b.hhat) <= 1e-8);
  const double r1 = max_boundary_residual(fundamental_forms(make_grid(2, kPi / 3, 2.0, 50, GridMode::axisymmetric, 0.05)));
  const double r2 = max_boundary_residual(fundamental_forms(make_grid(2, kPi / 3, 2.0, 100, GridMode::axisymmetric, 0.05)));
  MESSAGE("boundary residuals " << r1 << " " << r2);
  CHECK((r2 <= 1e-12 || std::log2(r1 / r2) >= 1.5));
}

TEST_CASE("orientation and metric invariants") {
  for (double theta : {kPi / 2, kPi / 3, kPi / 6}) {
    const auto f = fundamental_forms(make_grid(2, theta, 0.9, 80));
    for (const auto& node : f.nodes) {
      CHECK(norm(node.nu) == doctest::Approx(1).epsilon(1e-10));
      CHECK(node.g[0] * node.g[2] - node.g[1] * node.g[1] > 0);
      CHECK(node.kappa.min() > 0);
      CHECK(node.kappa[0] <= node.kappa[1]);
    }
    CHECK(f.nodes.front().nu[2] < 0);
    for (const auto& b : f.boundary) CHECK(norm(b.X) == doctest::Approx(1).epsilon(1e-12));
  }
}

TEST_CASE("free boundary convex data has nonpositive support function") {
  const auto f = fundamental_forms(make_grid(3, kPi / 2, 1.0, 100, GridMode::axisymmetric, 0.05));
  CHECK(convexity_report(f).x_dot_nu_max <= 1e-8);
}

TEST_CASE("full grid reproduces the axisymmetric curvatures") {
  const auto a = fundamental_forms(make_grid(2, kPi / 3, 1.3, 60, GridMode::axisymmetric, 0.04));
  const auto b = fundamental_forms(make_grid(2, kPi / 3, 1.3, 60, GridMode::full2d, 0.04));
  double e = 0;
  for (const auto& node : b.nodes) {
    const auto& ref = a.nodes[static_cast<std::size_t>(node.jet.j)];
    for (int i = 0; i < 2; ++i) e = std::max(e, std::abs(node.kappa[i] - ref.kappa[i]));
  }
  CHECK(e <= 1e-8);
}

TEST_CASE("error paths") {
  CHECK_THROWS_AS(HalfSphereGrid(1, GridMode::axisymmetric, 10, 1, 1.0), ConfigError);
  CHECK_THROWS_AS(HalfSphereGrid(3, GridMode::full2d, 10, 16, 1.0), ConfigError);
  CHECK_THROWS_AS(HalfSphereGrid(2, GridMode::axisymmetric, 3, 1, 1.0), ConfigError);
  CHECK_THROWS_AS(HalfSphereGrid(2, GridMode::full2d, 10, 7, 1.0), ConfigError);
  CHECK_THROWS_AS(HalfSphereGrid(2, GridMode::axisymmetric, 10, 1, 2.0), ConfigError);
  CHECK_THROWS_AS(parse_grid_mode("polar"), ConfigError);
  HalfSphereGrid g(2, GridMode::axisymmetric, 10, 1, kPi / 2);
  g.u(3) = NAN;
  CHECK_THROWS_AS(fundamental_forms(g), NumericalFailure);
  HalfSphereGrid big(2, GridMode::axisymmetric, 10, 1, kPi / 2);
  for (auto& v : big.values()) v = 50;
  CHECK_THROWS_AS(fundamental_forms(big), PoleError);
}
