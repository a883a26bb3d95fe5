#include "capflow/grid.hpp"

#include <cmath>
#include <numbers>

#include "capflow/errors.hpp"

namespace capflow::geometry {

GridMode parse_grid_mode(const std::string& s) {
  if (s == "axisymmetric") return GridMode::axisymmetric;
  if (s == "full2d") return GridMode::full2d;
  throw ConfigError("unknown grid mode '" + s + "'");
}

std::string to_string(GridMode m) { return m == GridMode::axisymmetric ? "axisymmetric" : "full2d"; }

HalfSphereGrid::HalfSphereGrid(int n, GridMode mode, int n_beta, int n_xi, double theta)
    : n_(n), mode_(mode), n_beta_(n_beta), n_xi_(mode == GridMode::axisymmetric ? 1 : n_xi), theta_(theta) {
  if (n < 2) throw ConfigError("grid dimension must be n >= 2");
  if (mode == GridMode::full2d && n != 2) throw ConfigError("full2d grids exist only for n = 2");
  if (n_beta < 4) throw ConfigError("N_beta must be at least 4");
  if (mode == GridMode::full2d && (n_xi < 8 || n_xi % 2 != 0))
    throw ConfigError("full2d grids need an even N_xi >= 8");
  if (!(theta > 0 && theta <= std::numbers::pi / 2 + 1e-15))
    throw ConfigError("contact angle must lie in (0, pi/2]");
  h_beta_ = 0.5 * std::numbers::pi / n_beta_;
  h_xi_ = 2 * std::numbers::pi / n_xi_;
  u_.assign(static_cast<std::size_t>(n_beta_ + 1) * static_cast<std::size_t>(n_xi_), 0.0);
}

void HalfSphereGrid::check_finite() const {
  for (double v : u_)
    if (!std::isfinite(v)) throw NumericalFailure("graph function is not finite");
}

}  // namespace capflow::geometry
