#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

namespace capflow::mobius {

// The map phi sends the unit ball to the upper half-space with the pole e = e_{n+1}
// going to infinity and -e to the origin. Both directions are written generically so
// the geometry kernels can push jets through them.
template <class Vec>
Vec to_halfspace(const Vec& x) {
  using T = std::decay_t<decltype(x[0])>;
  const std::size_t m = x.size() - 1;
  T sq = x[0] * x[0];
  for (std::size_t i = 1; i <= m; ++i) sq = sq + x[i] * x[i];
  const T last = x[m] - 1.0;
  T dist = last * last;
  for (std::size_t i = 0; i < m; ++i) dist = dist + x[i] * x[i];
  Vec y = x;
  for (std::size_t i = 0; i < m; ++i) y[i] = 2.0 * x[i] / dist;
  y[m] = (1.0 - sq) / dist;
  return y;
}

template <class Vec>
Vec to_ball(const Vec& y) {
  using T = std::decay_t<decltype(y[0])>;
  const std::size_t m = y.size() - 1;
  T sq = y[0] * y[0];
  for (std::size_t i = 1; i <= m; ++i) sq = sq + y[i] * y[i];
  const T last = y[m] + 1.0;
  T dist = last * last;
  for (std::size_t i = 0; i < m; ++i) dist = dist + y[i] * y[i];
  Vec x = y;
  for (std::size_t i = 0; i < m; ++i) x[i] = 2.0 * y[i] / dist;
  x[m] = (sq - 1.0) / dist;
  return x;
}

inline constexpr double kPoleDistance = 1e-9;

class BallPoint {
 public:
  explicit BallPoint(std::vector<double> coords);
  const std::vector<double>& coords() const { return x_; }
  double operator[](std::size_t i) const { return x_[i]; }
  std::size_t size() const { return x_.size(); }

 private:
  std::vector<double> x_;
};

class HalfSpacePoint {
 public:
  explicit HalfSpacePoint(std::vector<double> coords);
  const std::vector<double>& coords() const { return y_; }
  double operator[](std::size_t i) const { return y_[i]; }
  std::size_t size() const { return y_.size(); }

 private:
  std::vector<double> y_;
};

HalfSpacePoint ball_to_halfspace(const BallPoint& x);
BallPoint halfspace_to_ball(const HalfSpacePoint& y);

// e^omega(y) = 2/|y+e|^2: the Euclidean ball metric reads e^{2 omega} delta in y.
double conformal_factor(const HalfSpacePoint& y);
// |y+e|^2/2, the length scale of phi_* at the preimage; reciprocal of the factor above.
double stretch(const HalfSpacePoint& y);
// |D phi| at x, equal to 2/|x-e|^2.
double ball_stretch(const BallPoint& x);

struct PolarCoords {
  double rho = 1;
  double beta = 0;
  std::vector<double> xi;  // unit vector in R^n
};

PolarCoords disassemble(const HalfSpacePoint& y);
HalfSpacePoint assemble(const PolarCoords& p);
// Unit direction z = (sin(beta) xi, cos(beta)) in R^{n+1}.
std::vector<double> direction(double beta, std::span<const double> xi);

struct CapSpec {
  double theta = 1.5707963267948966;
  std::optional<double> radius;  // empty: flat ball

  static CapSpec cap(double theta, double r) { return {theta, r}; }
  static CapSpec flat(double theta) { return {theta, std::nullopt}; }

  bool is_flat() const { return !radius.has_value(); }
  void validate() const;
  double center_distance() const;
  double curvature() const { return is_flat() ? 0.0 : 1.0 / *radius; }
};

// rho of the cap's image along a ray with polar angle cos(beta).
double cap_radial_distance(const CapSpec& spec, double cos_beta);
double cap_graph_u_beta(const CapSpec& spec, double beta);
double cap_graph_u(const CapSpec& spec, std::span<const double> z);
BallPoint cap_embedding(const CapSpec& spec, std::span<const double> z);

}  // namespace capflow::mobius
