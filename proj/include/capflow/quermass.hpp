#pragma once

#include <optional>
#include <string>
#include <vector>

#include "capflow/geometry.hpp"

namespace capflow::quermass {

struct QuermassVector {
  int n = 2;
  double theta = 0;
  std::vector<double> Wtheta;               // W_{0,theta} ... W_{n+1,theta}
  std::vector<double> Wsphere;              // W_0^S ... W_n^S of the boundary body
  std::vector<double> curvature_integrals;  // int E_k dA, k = 0..n
  std::vector<double> boundary_integrals;   // int E_j^S ds, j = 0..n-1
  double volume = 0;
  double xnu_integral = 0;  // int <x, nu> dA

  double area() const { return curvature_integrals.at(0); }
  double boundary_length() const { return boundary_integrals.at(0); }
  double W(int k) const { return Wtheta.at(static_cast<std::size_t>(k)); }
};

std::vector<double> surface_integrals(const geometry::GeometryFields& fields);
double surface_integral(const geometry::GeometryFields& fields, const std::vector<double>& values);

// Area of the region of S^n bounded by the boundary and containing e.
double sphere_region_area(const geometry::GeometryFields& fields);
double sphere_region_area_gauss_bonnet(const geometry::GeometryFields& fields);
double sphere_region_area_polar(const geometry::GeometryFields& fields);

// int_0^radius sin^m(s) ds
double sin_power_integral(int m, double radius);

std::vector<double> boundary_integrals(const geometry::GeometryFields& fields);
// W_k^S from W_0^S and the boundary curvature integrals.
std::vector<double> sphere_quermass_from(int n, double W0, const std::vector<double>& bint);
std::vector<double> sphere_quermass(const geometry::GeometryFields& fields);

double enclosed_volume(const geometry::GeometryFields& fields, double W0_sphere);

// General-angle assembly from stored parts; fills Wtheta.
void assemble(QuermassVector& q);
QuermassVector assemble_W(const geometry::GeometryFields& fields);
// The free-boundary form W_{k} = (int E_{k-1} + (k-1)/(n-k+2) W_{k-2}^S)/(n+1), k >= 2.
double free_boundary_W(const QuermassVector& q, int k);

// Exact references.
QuermassVector flat_ball_reference(int n, double theta);
std::vector<double> geodesic_ball_sphere_quermass(int n, double radius);
double geodesic_ball_odd_closed_form(int n, int k, double radius);  // W_{2k-1}^S(B_radius)
double equator_odd_closed_form(int n, int k);                       // W_{2k-1}^S(B_{pi/2})
double flat_disk_limit_W(int n, int k);                             // lim W_{2k+1}

// Pipeline evaluation on an exact cap (axisymmetric grid); empty radius is the flat ball.
QuermassVector cap_quermass(int n, double theta, std::optional<double> r, int n_beta);
// (4 fine - coarse)/3 for grids with h and h/2, applied to every stored part.
QuermassVector richardson(const QuermassVector& coarse, const QuermassVector& fine);
QuermassVector cap_quermass_extrapolated(int n, double theta, std::optional<double> r, int n_beta);
// Closed-form values for an umbilic cap (spherical zone, lens volume, geodesic boundary).
QuermassVector cap_reference_exact(int n, double theta, double r);

// Relative size of a step below which a non-increase counts as noise.
inline constexpr double kMonotoneNoise = 1e-10;

class CapTable {
 public:
  CapTable(int n, double theta, std::vector<double> radii, int n_beta);

  int n() const { return n_; }
  double theta() const { return theta_; }
  int n_beta() const { return n_beta_; }
  const std::vector<double>& radii() const { return radii_; }
  // Row i holds f_0..f_{n+1} from the extrapolated pipeline on N_beta and 2 N_beta;
  // the final row is r = inf.
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  double f(int k, std::optional<double> r) const;
  // Radius with f_k(r) = value; empty result means the flat-ball endpoint.
  std::optional<double> inverse(int k, double value) const;
  // f_target(f_source^{-1}(value))
  double compose(int target, int source, double value) const;
  std::string to_csv(const std::vector<int>& ks) const;

  static std::vector<double> default_radii();

 private:
  int n_;
  double theta_;
  int n_beta_;
  std::vector<double> radii_;
  std::vector<std::vector<double>> rows_;
};

CapTable cap_reference_f(int n, double theta, const std::vector<double>& radii, int n_beta);

}  // namespace capflow::quermass
