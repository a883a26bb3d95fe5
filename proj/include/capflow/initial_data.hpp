#pragma once

#include <string>
#include <vector>

#include "capflow/grid.hpp"
#include "capflow/mobius.hpp"

namespace capflow::mobius {

enum class InitialKind { cap, perturbed_cap, custom_profile };
enum class ConvexityRequirement { strict, weak, none };

InitialKind parse_initial_kind(const std::string& s);
std::string to_string(InitialKind k);

struct InitialDataSpec {
  InitialKind kind = InitialKind::cap;
  CapSpec cap;
  // perturbed_cap: u = u_cap + epsilon * cos^m(beta) * (1 + xi_amplitude * sin(beta) cos(psi))
  double epsilon = 0;
  int bump_power = 2;
  double xi_amplitude = 0;
  // custom_profile: u = sum_m coefficients[m] * cos^m(beta)
  std::vector<double> coefficients;
  ConvexityRequirement convexity = ConvexityRequirement::strict;
};

inline constexpr double kBoundaryResidualTolerance = 1e-8;
inline constexpr double kWeakConvexityTolerance = 1e-6;

// |d_beta u + cot(theta)| at the boundary for the continuous profile.
double boundary_residual(const InitialDataSpec& spec, double theta);

// Evaluate the continuous initial profile.
double initial_value(const InitialDataSpec& spec, double beta, double psi);

// Fill the grid, then verify the capillary condition and convexity.
void initial_data(const InitialDataSpec& spec, geometry::HalfSphereGrid& grid);

// Cap C_{theta,r} plus a cos^m bump scaled so the apex curvature vanishes.
InitialDataSpec weakly_convex_fixture(geometry::HalfSphereGrid& grid, double r, int bump_power = 4);

}  // namespace capflow::mobius
