#include "capflow/initial_data.hpp"

#include <cmath>
#include <numbers>

#include "capflow/errors.hpp"
#include "capflow/geometry.hpp"

namespace capflow::mobius {

InitialKind parse_initial_kind(const std::string& s) {
  if (s == "cap") return InitialKind::cap;
  if (s == "perturbed_cap") return InitialKind::perturbed_cap;
  if (s == "custom_profile") return InitialKind::custom_profile;
  throw ConfigError("unknown initial data kind '" + s + "'");
}

std::string to_string(InitialKind k) {
  switch (k) {
    case InitialKind::cap: return "cap";
    case InitialKind::perturbed_cap: return "perturbed_cap";
    case InitialKind::custom_profile: return "custom_profile";
  }
  return "cap";
}

namespace {

double cot(double theta) {
  return std::abs(theta - std::numbers::pi / 2) < 1e-15 ? 0.0 : std::cos(theta) / std::sin(theta);
}

// d_beta u at beta = pi/2, i.e. -rho'(0)/rho(0) for the profile written in c = cos(beta).
double cap_boundary_slope(const CapSpec& cap) {
  const double ct = std::cos(cap.theta);
  if (cap.is_flat()) return -ct / std::sqrt(1 - ct * ct);
  const double r = *cap.radius;
  const double st = std::sin(cap.theta);
  const double d = cap.center_distance();
  const double D = 2 * r * ct + 1;
  const double a = 4 * r * r * st * st / (1 + D + 2 * d);
  const double c0 = 1 + 2 * d + D;
  return -4 * r * ct / (2 * std::sqrt(a * c0));
}

}  // namespace

double boundary_residual(const InitialDataSpec& spec, double theta) {
  switch (spec.kind) {
    case InitialKind::cap:
      return std::abs(cap_boundary_slope(spec.cap) + cot(theta));
    case InitialKind::perturbed_cap: {
      double slope = cap_boundary_slope(spec.cap);
      if (spec.bump_power == 1) slope -= spec.epsilon;
      return std::abs(slope + cot(theta));
    }
    case InitialKind::custom_profile: {
      const double c1 = spec.coefficients.size() > 1 ? spec.coefficients[1] : 0.0;
      return std::abs(-c1 + cot(theta));
    }
  }
  return 0;
}

double initial_value(const InitialDataSpec& spec, double beta, double psi) {
  const double c = std::cos(beta);
  switch (spec.kind) {
    case InitialKind::cap:
      return cap_graph_u_beta(spec.cap, beta);
    case InitialKind::perturbed_cap:
      return cap_graph_u_beta(spec.cap, beta) + spec.epsilon * std::pow(c, spec.bump_power) *
                                                   (1 + spec.xi_amplitude * std::sin(beta) * std::cos(psi));
    case InitialKind::custom_profile: {
      double u = 0, p = 1;
      for (double a : spec.coefficients) {
        u += a * p;
        p *= c;
      }
      return u;
    }
  }
  return 0;
}

void initial_data(const InitialDataSpec& spec, geometry::HalfSphereGrid& grid) {
  if (spec.kind != InitialKind::custom_profile) {
    spec.cap.validate();
    if (std::abs(spec.cap.theta - grid.theta()) > 1e-14)
      throw ConfigError("cap contact angle differs from the grid contact angle");
  }
  if (spec.kind == InitialKind::perturbed_cap && spec.bump_power < 2)
    throw ConfigError("perturbation bump must vanish to second order at the boundary (power >= 2)");
  if (spec.kind == InitialKind::custom_profile && spec.coefficients.empty())
    throw ConfigError("custom profile needs at least one coefficient");
  if (spec.xi_amplitude != 0 && grid.mode() != geometry::GridMode::full2d)
    throw ConfigError("non-axisymmetric perturbations need a full2d grid");
  const double res = boundary_residual(spec, grid.theta());
  if (!(res <= kBoundaryResidualTolerance))
    throw DomainError("initial data violates the capillary boundary condition (residual " + std::to_string(res) + ")");

  for (int j = 0; j <= grid.n_beta(); ++j)
    for (int m = 0; m < grid.n_xi(); ++m)
      grid.u(j, m) = initial_value(spec, grid.beta(j), j == 0 ? 0.0 : grid.xi(m));

  if (spec.convexity == ConvexityRequirement::none) return;
  const auto fields = geometry::fundamental_forms(grid);
  const auto rep = geometry::convexity_report(fields);
  if (spec.convexity == ConvexityRequirement::strict && !rep.htilde_max)
    throw DomainError("initial data is not strictly convex (kappa_min = " + std::to_string(rep.kappa_min) + ")");
  const double sin_theta = std::sin(grid.theta());
  const double slack = kWeakConvexityTolerance + grid.h_beta() * grid.h_beta() / (sin_theta * sin_theta);
  if (spec.convexity == ConvexityRequirement::weak && rep.kappa_min < -slack)
    throw DomainError("initial data is not weakly convex (kappa_min = " + std::to_string(rep.kappa_min) + ")");
}

InitialDataSpec weakly_convex_fixture(geometry::HalfSphereGrid& grid, double r, int bump_power) {
  InitialDataSpec spec;
  spec.kind = InitialKind::perturbed_cap;
  spec.cap = CapSpec::cap(grid.theta(), r);
  spec.bump_power = bump_power;
  spec.convexity = ConvexityRequirement::none;
  auto apex = [&](double eps) {
    spec.epsilon = eps;
    initial_data(spec, grid);
    return geometry::fundamental_forms(grid).nodes.front().kappa.min();
  };
  double lo = 0, hi = 0.1;
  while (apex(hi) > 0) {
    lo = hi;
    hi *= 2;
    if (hi > 100) throw DomainError("could not flatten the cap apex");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (apex(mid) > 0 ? lo : hi) = mid;
  }
  spec.epsilon = lo;
  spec.convexity = ConvexityRequirement::weak;
  initial_data(spec, grid);
  return spec;
}

}  // namespace capflow::mobius
