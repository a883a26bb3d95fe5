#include "capflow/mobius.hpp"

#include <numbers>

#include "capflow/errors.hpp"

namespace capflow::mobius {

namespace {

double norm_sq(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return s;
}

std::vector<double> check_unit_direction(std::span<const double> z) {
  if (z.size() < 3) throw DomainError("direction needs at least 3 coordinates");
  const double len = std::sqrt(norm_sq(z));
  if (std::abs(len - 1.0) > 1e-10) throw DomainError("direction is not a unit vector");
  if (z.back() < -1e-12) throw DomainError("direction lies below the half-sphere");
  return {z.begin(), z.end()};
}

}  // namespace

BallPoint::BallPoint(std::vector<double> coords) : x_(std::move(coords)) {
  if (x_.size() < 2) throw DomainError("ball point needs dimension >= 2");
  for (double v : x_)
    if (!std::isfinite(v)) throw DomainError("non-finite ball point");
  if (norm_sq(x_) > (1 + 1e-12) * (1 + 1e-12)) throw DomainError("point lies outside the unit ball");
}

HalfSpacePoint::HalfSpacePoint(std::vector<double> coords) : y_(std::move(coords)) {
  if (y_.size() < 2) throw DomainError("half-space point needs dimension >= 2");
  for (double v : y_)
    if (!std::isfinite(v)) throw DomainError("non-finite half-space point");
  if (y_.back() < -1e-12) throw DomainError("point lies below the half-space");
}

HalfSpacePoint ball_to_halfspace(const BallPoint& x) {
  auto d = x.coords();
  d.back() -= 1.0;
  if (std::sqrt(norm_sq(d)) < kPoleDistance) throw PoleError("point is at the pole of the Mobius map");
  auto y = to_halfspace(x.coords());
  y.back() = std::max(y.back(), 0.0);
  return HalfSpacePoint(std::move(y));
}

BallPoint halfspace_to_ball(const HalfSpacePoint& y) {
  auto x = to_ball(y.coords());
  const double len = std::sqrt(norm_sq(x));
  if (len > 1.0) for (double& v : x) v /= len;
  return BallPoint(std::move(x));
}

double stretch(const HalfSpacePoint& y) {
  auto p = y.coords();
  p.back() += 1.0;
  return 0.5 * norm_sq(p);
}

double conformal_factor(const HalfSpacePoint& y) { return 1.0 / stretch(y); }

double ball_stretch(const BallPoint& x) {
  auto p = x.coords();
  p.back() -= 1.0;
  const double d = norm_sq(p);
  if (std::sqrt(d) < kPoleDistance) throw PoleError("point is at the pole of the Mobius map");
  return 2.0 / d;
}

PolarCoords disassemble(const HalfSpacePoint& y) {
  const auto& c = y.coords();
  const std::size_t n = c.size() - 1;
  PolarCoords p;
  p.rho = std::sqrt(norm_sq(c));
  if (p.rho == 0) throw DomainError("polar coordinates undefined at the origin");
  const double r_perp = std::sqrt(norm_sq(std::span<const double>(c.data(), n)));
  p.beta = std::atan2(r_perp, c.back());
  p.xi.assign(n, 0.0);
  if (r_perp > 0) {
    for (std::size_t i = 0; i < n; ++i) p.xi[i] = c[i] / r_perp;
  } else {
    p.xi[0] = 1.0;
  }
  return p;
}

std::vector<double> direction(double beta, std::span<const double> xi) {
  std::vector<double> z(xi.size() + 1);
  const double s = std::sin(beta);
  for (std::size_t i = 0; i < xi.size(); ++i) z[i] = s * xi[i];
  z.back() = std::cos(beta);
  return z;
}

HalfSpacePoint assemble(const PolarCoords& p) {
  if (!(p.rho > 0)) throw DomainError("polar radius must be positive");
  if (p.beta < -1e-15 || p.beta > std::numbers::pi / 2 + 1e-12)
    throw DomainError("polar angle outside [0, pi/2]");
  if (std::abs(norm_sq(p.xi) - 1.0) > 1e-10) throw DomainError("xi is not a unit vector");
  auto y = direction(p.beta, p.xi);
  for (double& v : y) v *= p.rho;
  return HalfSpacePoint(std::move(y));
}

void CapSpec::validate() const {
  if (!(theta > 0 && theta <= std::numbers::pi / 2 + 1e-15))
    throw DomainError("contact angle must lie in (0, pi/2]");
  if (radius && !(*radius > 0 && std::isfinite(*radius)))
    throw DomainError("cap radius must be positive and finite (use the flat variant for r = inf)");
}

double CapSpec::center_distance() const {
  if (is_flat()) throw DomainError("flat ball has no center");
  const double r = *radius;
  return std::sqrt(r * r + 2 * r * std::cos(theta) + 1);
}

double cap_radial_distance(const CapSpec& spec, double cb) {
  spec.validate();
  if (cb < -1e-12 || cb > 1 + 1e-12) throw DomainError("ray outside the cap's graph domain");
  const double ct = std::cos(spec.theta);
  if (spec.is_flat()) {
    const double disc = ct * ct * cb * cb + 1 - ct * ct;
    return (ct * cb + std::sqrt(disc)) / (1 - ct);
  }
  const double r = *spec.radius;
  const double st = std::sin(spec.theta);
  const double d = spec.center_distance();
  const double D = 2 * r * ct + 1;
  const double a = -4 * r * r * st * st / (1 + D + 2 * d);
  const double b = 4 * r * ct;
  const double c0 = 1 + 2 * d + D;
  return (b * cb + std::sqrt(b * b * cb * cb - 4 * a * c0)) / (-2 * a);
}

double cap_graph_u_beta(const CapSpec& spec, double beta) {
  return std::log(cap_radial_distance(spec, std::cos(beta)));
}

double cap_graph_u(const CapSpec& spec, std::span<const double> z) {
  auto zz = check_unit_direction(z);
  return std::log(cap_radial_distance(spec, std::min(1.0, zz.back())));
}

BallPoint cap_embedding(const CapSpec& spec, std::span<const double> z) {
  auto y = check_unit_direction(z);
  const double rho = cap_radial_distance(spec, std::min(1.0, y.back()));
  for (double& v : y) v *= rho;
  y.back() = std::max(y.back(), 0.0);
  return halfspace_to_ball(HalfSpacePoint(std::move(y)));
}

}  // namespace capflow::mobius
