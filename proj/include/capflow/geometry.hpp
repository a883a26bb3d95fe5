#pragma once

#include <array>
#include <optional>
#include <vector>

#include "capflow/grid.hpp"
#include "capflow/symfunc.hpp"
#include "capflow/vec3.hpp"

namespace capflow::geometry {

inline constexpr double kMinMetricDet = 1e-14;

// Boundary data from the capillary condition at beta = pi/2, one entry per meridian.
struct BoundaryGhost {
  double u_tangential = 0;  // orthonormal tangential derivative along the boundary
  double target = 0;        // prescribed d_beta u
  double u_bb = 0;          // one-sided second-order d_beta^2 u
  double ghost = 0;         // value at N_beta+1 consistent with u_bb under the central stencil
};

std::vector<BoundaryGhost> boundary_ghosts(const HalfSphereGrid& grid);

// Local 2-jet of u at a node. Away from the pole the variables are (beta, psi);
// at the pole they are the chart (p, q) with z = (p, q, sqrt(1 - p^2 - q^2)).
struct NodeJet {
  int j = 0;
  int m = 0;
  double beta = 0;
  double psi = 0;
  bool pole = false;
  double u = 0, u1 = 0, u2 = 0, u11 = 0, u12 = 0, u22 = 0;
};

// Node order: axisymmetric j = 0..N; full2d the pole, then rings j = 1..N with m = 0..N_xi-1.
std::vector<NodeJet> node_jets(const HalfSphereGrid& grid);
std::size_t node_count(const HalfSphereGrid& grid);

// Orthonormal-frame gradient and covariant Hessian of u on the sphere.
struct SphereDerivatives {
  double g1 = 0, g2 = 0;
  double H11 = 0, H12 = 0, H22 = 0;
  Vec3 e1{}, e2{}, z{};
};
SphereDerivatives sphere_derivatives(const NodeJet& jet);

std::vector<Vec3> embed(const HalfSphereGrid& grid);

struct NodeGeometry {
  NodeJet jet;
  Vec3 X{};
  Vec3 nu{};
  std::array<double, 3> g{};  // g11, g12, g22 in node variables
  std::array<double, 3> h{};
  symfunc::KappaVector kappa;
  double kappa_profile = 0;  // axisymmetric: meridian direction
  double kappa_rot = 0;      // axisymmetric: rotational direction, multiplicity n-1
  double area_weight = 0;
};

struct BoundaryFrame {
  int m = 0;
  Vec3 X{};
  Vec3 nu{};
  Vec3 mu{};
  Vec3 nubar{};
  double hhat = 0;            // curvature of the boundary inside S^n along the circle direction
  double h_tangent = 0;       // h(e_a, e_a)
  double h_mixed = 0;         // h(mu, e_a)
  double contact_residual = 0;
  double length_weight = 0;   // ds weight (axisymmetric: whole boundary measure)
  double geodesic_radius = 0; // spherical distance from e
  double xi_speed = 0;        // |X_psi|
  // Residuals of N̄ = sin(theta) mu - cos(theta) nu and nubar = cos(theta) mu + sin(theta) nu.
  double transform_residual = 0;
  // Residual of h(e_a,e_a) = sin(theta) hhat - cos(theta).
  double principal_residual = 0;
};

struct GeometryFields {
  int n = 2;
  GridMode mode = GridMode::axisymmetric;
  double theta = 0;
  double h_beta = 0;
  double h_xi = 0;
  int n_beta = 0;
  int n_xi = 1;
  std::vector<NodeGeometry> nodes;
  std::vector<BoundaryFrame> boundary;
};

GeometryFields fundamental_forms(const HalfSphereGrid& grid);

struct ProfileCurvature {
  double kappa_profile = 0;
  double kappa_rot = 0;
};
std::vector<ProfileCurvature> profile_curvatures(const HalfSphereGrid& grid);

// Flat radial-graph data at a node together with the ball curvatures.
struct ConformalNode {
  double rho = 1;
  double v = 1;
  double conformal = 1;  // e^omega = 2/|y+e|^2
  std::array<double, 2> kappa{};  // axisymmetric: (profile, rotational); full2d: eigenvalues
};
ConformalNode conformal_node(const NodeJet& jet, GridMode mode);
std::vector<symfunc::KappaVector> conformal_graph_kernel(const HalfSphereGrid& grid);
symfunc::KappaVector expand_kappa(const std::array<double, 2>& k, int n, GridMode mode);

std::vector<BoundaryFrame> boundary_frame(const GeometryFields& fields);

struct ConvexityReport {
  double kappa_min = 0;
  double kappa_max = 0;
  std::optional<double> htilde_max;  // undefined unless strictly convex
  double umbilicity = 0;
  double x_dot_nu_min = 0;
  double x_dot_nu_max = 0;
  double height_min = 0;
  double height_max = 0;
  double nu_dot_e_max = 0;
};
ConvexityReport convexity_report(const GeometryFields& fields);

}  // namespace capflow::geometry
