#pragma once

#include <string>
#include <vector>

namespace capflow::geometry {

enum class GridMode { axisymmetric, full2d };

GridMode parse_grid_mode(const std::string& s);
std::string to_string(GridMode m);

// Nodes on the closed upper half-sphere. Axisymmetric grids hold one meridian
// (j = 0..N_beta); full2d grids (n = 2) hold N_xi meridians sharing the pole.
class HalfSphereGrid {
 public:
  HalfSphereGrid(int n, GridMode mode, int n_beta, int n_xi, double theta);

  int n() const { return n_; }
  GridMode mode() const { return mode_; }
  int n_beta() const { return n_beta_; }
  int n_xi() const { return n_xi_; }
  double theta() const { return theta_; }
  double h_beta() const { return h_beta_; }
  double h_xi() const { return h_xi_; }
  double beta(int j) const { return j * h_beta_; }
  double xi(int m) const { return m * h_xi_; }

  double& u(int j, int m = 0) { return u_[index(j, m)]; }
  double u(int j, int m = 0) const { return u_[index(j, m)]; }
  std::vector<double>& values() { return u_; }
  const std::vector<double>& values() const { return u_; }

  std::size_t index(int j, int m) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_xi_) + static_cast<std::size_t>(m);
  }
  // Wrap a meridian index into [0, N_xi).
  int wrap(int m) const { return ((m % n_xi_) + n_xi_) % n_xi_; }

  // Throws if any node value is not finite.
  void check_finite() const;

 private:
  int n_;
  GridMode mode_;
  int n_beta_;
  int n_xi_;
  double theta_;
  double h_beta_;
  double h_xi_;
  std::vector<double> u_;
};

}  // namespace capflow::geometry
