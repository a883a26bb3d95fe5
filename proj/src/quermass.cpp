#include "capflow/quermass.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "capflow/errors.hpp"
#include "capflow/initial_data.hpp"
#include "capflow/symfunc.hpp"

namespace capflow::quermass {

using geometry::GeometryFields;
using geometry::GridMode;

double surface_integral(const GeometryFields& fields, const std::vector<double>& values) {
  if (values.size() != fields.nodes.size()) throw AssemblyError("integrand size does not match the node count");
  double s = 0;
  for (std::size_t i = 0; i < values.size(); ++i) s += fields.nodes[i].area_weight * values[i];
  return s;
}

std::vector<double> surface_integrals(const GeometryFields& fields) {
  std::vector<double> out(static_cast<std::size_t>(fields.n + 1), 0.0);
  for (const auto& ng : fields.nodes) {
    const auto e = symfunc::elementary_all(ng.kappa.values());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += ng.area_weight * e[k];
  }
  return out;
}

double sin_power_integral(int m, double radius) {
  if (m == 0) return radius;
  if (m == 1) return 1 - std::cos(radius);
  const double s = std::sin(radius), c = std::cos(radius);
  return (-std::pow(s, m - 1) * c + (m - 1) * sin_power_integral(m - 2, radius)) / m;
}

namespace {

void check_star_shaped(const GeometryFields& f) {
  for (const auto& b : f.boundary)
    if (!(b.geodesic_radius < std::numbers::pi - 1e-9))
      throw DomainError("boundary is not star-shaped about e");
}

}  // namespace

double sphere_region_area_gauss_bonnet(const GeometryFields& f) {
  if (f.n != 2) throw DomainError("Gauss-Bonnet path is for n = 2");
  check_star_shaped(f);
  if (f.mode == GridMode::axisymmetric) {
    const auto& b = f.boundary.front();
    return 2 * std::numbers::pi - b.hhat * b.length_weight;
  }
  double s = 0;
  for (const auto& b : f.boundary) s += b.hhat * b.length_weight;
  return 2 * std::numbers::pi - s;
}

double sphere_region_area_polar(const GeometryFields& f) {
  check_star_shaped(f);
  if (f.mode == GridMode::axisymmetric)
    return symfunc::sphere_area(f.n - 1) * sin_power_integral(f.n - 1, f.boundary.front().geodesic_radius);
  double s = 0;
  for (const auto& b : f.boundary) s += (1 - std::cos(b.geodesic_radius)) * f.h_xi;
  return s;
}

double sphere_region_area(const GeometryFields& f) {
  if (f.boundary.empty()) throw AssemblyError("boundary not resolved");
  return f.mode == GridMode::axisymmetric ? sphere_region_area_polar(f) : sphere_region_area_gauss_bonnet(f);
}

std::vector<double> boundary_integrals(const GeometryFields& f) {
  std::vector<double> out(static_cast<std::size_t>(f.n), 0.0);
  for (const auto& b : f.boundary) {
    double p = 1;
    for (auto& v : out) {
      v += b.length_weight * p;
      p *= b.hhat;
    }
  }
  return out;
}

std::vector<double> sphere_quermass_from(int n, double W0, const std::vector<double>& bint) {
  if (static_cast<int>(bint.size()) < n) throw AssemblyError("missing boundary curvature integrals");
  std::vector<double> W(static_cast<std::size_t>(n + 1), 0.0);
  W[0] = W0;
  W[1] = bint[0] / n;
  for (int k = 2; k <= n; ++k)
    W[static_cast<std::size_t>(k)] =
        bint[static_cast<std::size_t>(k - 1)] / n + static_cast<double>(k - 1) / (n - k + 2) * W[static_cast<std::size_t>(k - 2)];
  return W;
}

std::vector<double> sphere_quermass(const GeometryFields& f) {
  return sphere_quermass_from(f.n, sphere_region_area(f), boundary_integrals(f));
}

double enclosed_volume(const GeometryFields& f, double W0_sphere) {
  double xnu = 0;
  for (const auto& ng : f.nodes) xnu += ng.area_weight * dot(ng.X, ng.nu);
  const double vol = (xnu + W0_sphere) / (f.n + 1);
  if (vol < -1e-8) throw OrientationError("negative enclosed volume");
  return std::max(vol, 0.0);
}

void assemble(QuermassVector& q) {
  const int n = q.n;
  if (static_cast<int>(q.curvature_integrals.size()) != n + 1 || static_cast<int>(q.Wsphere.size()) != n + 1)
    throw AssemblyError("inconsistent quermass parts");
  const double c = std::cos(q.theta), s = std::sin(q.theta);
  const bool free = std::abs(q.theta - std::numbers::pi / 2) < 1e-15;
  auto cpow = [&](int e) { return e == 0 ? 1.0 : (free ? 0.0 : std::pow(c, e)); };
  q.Wtheta.assign(static_cast<std::size_t>(n + 2), 0.0);
  q.Wtheta[0] = q.volume;
  q.Wtheta[1] = (q.area() - cpow(1) * q.Wsphere[0]) / (n + 1);
  for (int k = 1; k <= n; ++k) {
    double corr = 0;
    for (int l = 0; l <= k - 1; ++l) {
      const double sign = ((k + l) % 2) ? -1.0 : 1.0;
      corr += sign / (n - l) * symfunc::binomial(k, l) * ((n - k) * cpow(2) + k - l) * cpow(k - 1 - l) *
              std::pow(s, l) * q.Wsphere[static_cast<std::size_t>(l)];
    }
    q.Wtheta[static_cast<std::size_t>(k + 1)] =
        (q.curvature_integrals[static_cast<std::size_t>(k)] - cpow(1) * std::pow(s, k) * q.Wsphere[static_cast<std::size_t>(k)] - corr) /
        (n + 1);
  }
  if (q.volume < 0 || q.area() < 0 || q.Wsphere[0] < 0) throw AssemblyError("negative measure in quermass parts");
}

double free_boundary_W(const QuermassVector& q, int k) {
  const int n = q.n;
  if (k < 2 || k > n + 1) throw DomainError("free-boundary form needs 2 <= k <= n+1");
  return (q.curvature_integrals[static_cast<std::size_t>(k - 1)] +
          static_cast<double>(k - 1) / (n - k + 2) * q.Wsphere[static_cast<std::size_t>(k - 2)]) /
         (n + 1);
}

QuermassVector assemble_W(const GeometryFields& f) {
  QuermassVector q;
  q.n = f.n;
  q.theta = f.theta;
  q.curvature_integrals = surface_integrals(f);
  q.boundary_integrals = boundary_integrals(f);
  q.Wsphere = sphere_quermass_from(f.n, sphere_region_area(f), q.boundary_integrals);
  for (const auto& ng : f.nodes) q.xnu_integral += ng.area_weight * dot(ng.X, ng.nu);
  q.volume = enclosed_volume(f, q.Wsphere[0]);
  assemble(q);
  return q;
}

QuermassVector flat_ball_reference(int n, double theta) {
  const double omega = symfunc::sphere_area(n - 1);
  const double s = std::sin(theta), c = std::abs(theta - std::numbers::pi / 2) < 1e-15 ? 0.0 : std::cos(theta);
  QuermassVector q;
  q.n = n;
  q.theta = theta;
  q.curvature_integrals.assign(static_cast<std::size_t>(n + 1), 0.0);
  q.curvature_integrals[0] = omega / n * std::pow(s, n);
  q.boundary_integrals.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) q.boundary_integrals[static_cast<std::size_t>(j)] = omega * std::pow(c, j) * std::pow(s, n - 1 - j);
  const double W0 = omega * sin_power_integral(n - 1, theta);
  q.Wsphere = sphere_quermass_from(n, W0, q.boundary_integrals);
  q.xnu_integral = -c * q.curvature_integrals[0];
  q.volume = (q.xnu_integral + W0) / (n + 1);
  assemble(q);
  return q;
}

std::vector<double> geodesic_ball_sphere_quermass(int n, double radius) {
  const double omega = symfunc::sphere_area(n - 1);
  const double s = std::sin(radius), c = std::cos(radius);
  std::vector<double> bint(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) bint[static_cast<std::size_t>(j)] = omega * std::pow(c, j) * std::pow(s, n - 1 - j);
  return sphere_quermass_from(n, omega * sin_power_integral(n - 1, radius), bint);
}

double geodesic_ball_odd_closed_form(int n, int k, double radius) {
  if (k < 1 || 2 * k - 1 > n) throw DomainError("closed form needs 1 <= k and 2k-1 <= n");
  using symfunc::double_factorial;
  double s = 0;
  for (int i = 0; i <= k - 1; ++i)
    s += double_factorial(2 * k - 2) * double_factorial(n - 2 * k + 1) /
         (double_factorial(2 * k - 2 * i - 2) * double_factorial(n - 2 * k + 2 * i + 1)) *
         std::pow(std::cos(radius), 2 * k - 2 * i - 2) * std::pow(std::sin(radius), n - 2 * k + 2 * i + 1);
  return symfunc::sphere_area(n - 1) / n * s;
}

double equator_odd_closed_form(int n, int k) {
  using symfunc::double_factorial;
  return symfunc::sphere_area(n - 1) / n * double_factorial(2 * k - 2) * double_factorial(n - 2 * k + 1) /
         double_factorial(n - 1);
}

double flat_disk_limit_W(int n, int k) {
  if (k < 0 || 2 * k + 1 > n) throw DomainError("limit needs 2k+1 <= n");
  using symfunc::double_factorial;
  return symfunc::sphere_area(n - 1) / n * double_factorial(2 * k) * double_factorial(n - 2 * k - 1) /
         double_factorial(n + 1);
}

QuermassVector cap_quermass(int n, double theta, std::optional<double> r, int n_beta) {
  geometry::HalfSphereGrid grid(n, GridMode::axisymmetric, n_beta, 1, theta);
  mobius::InitialDataSpec spec;
  spec.cap = r ? mobius::CapSpec::cap(theta, *r) : mobius::CapSpec::flat(theta);
  spec.convexity = mobius::ConvexityRequirement::none;
  mobius::initial_data(spec, grid);
  return assemble_W(geometry::fundamental_forms(grid));
}

QuermassVector richardson(const QuermassVector& coarse, const QuermassVector& fine) {
  if (coarse.n != fine.n || coarse.Wtheta.size() != fine.Wtheta.size())
    throw AssemblyError("Richardson extrapolation needs matching quermass vectors");
  auto mix = [](std::vector<double> a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = (4 * b[i] - a[i]) / 3;
    return a;
  };
  QuermassVector q = coarse;
  q.Wtheta = mix(coarse.Wtheta, fine.Wtheta);
  q.Wsphere = mix(coarse.Wsphere, fine.Wsphere);
  q.curvature_integrals = mix(coarse.curvature_integrals, fine.curvature_integrals);
  q.boundary_integrals = mix(coarse.boundary_integrals, fine.boundary_integrals);
  q.volume = (4 * fine.volume - coarse.volume) / 3;
  q.xnu_integral = (4 * fine.xnu_integral - coarse.xnu_integral) / 3;
  return q;
}

QuermassVector cap_quermass_extrapolated(int n, double theta, std::optional<double> r, int n_beta) {
  return richardson(cap_quermass(n, theta, r, n_beta), cap_quermass(n, theta, r, 2 * n_beta));
}

QuermassVector cap_reference_exact(int n, double theta, double r) {
  const mobius::CapSpec cap = mobius::CapSpec::cap(theta, r);
  cap.validate();
  const double d = cap.center_distance();
  const double t = (1 + d * d - r * r) / (2 * d);  // height of the boundary plane
  const double rho = std::acos(std::clamp(t, -1.0, 1.0));
  const double alpha = std::acos(std::clamp((d - t) / r, -1.0, 1.0));
  const double omega = symfunc::sphere_area(n - 1);
  const double bn = omega / n;
  QuermassVector q;
  q.n = n;
  q.theta = theta;
  const double area = std::pow(r, n) * omega * sin_power_integral(n - 1, alpha);
  q.curvature_integrals.resize(static_cast<std::size_t>(n + 1));
  for (int k = 0; k <= n; ++k) q.curvature_integrals[static_cast<std::size_t>(k)] = area * std::pow(r, -k);
  q.boundary_integrals.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    q.boundary_integrals[static_cast<std::size_t>(j)] = omega * std::pow(std::cos(rho), j) * std::pow(std::sin(rho), n - 1 - j);
  q.Wsphere = sphere_quermass_from(n, omega * sin_power_integral(n - 1, rho), q.boundary_integrals);
  q.volume = bn * (sin_power_integral(n + 1, rho) + std::pow(r, n + 1) * sin_power_integral(n + 1, alpha));
  q.xnu_integral = (n + 1) * q.volume - q.Wsphere[0];
  assemble(q);
  return q;
}

std::vector<double> CapTable::default_radii() {
  std::vector<double> r(64);
  const double a = std::log(0.1), b = std::log(50.0);
  for (int i = 0; i < 64; ++i) r[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / 63.0);
  return r;
}

CapTable::CapTable(int n, double theta, std::vector<double> radii, int n_beta)
    : n_(n), theta_(theta), n_beta_(n_beta), radii_(std::move(radii)) {
  if (radii_.empty()) throw RangeError("cap table needs at least one radius");
  for (std::size_t i = 0; i < radii_.size(); ++i) {
    if (!(radii_[i] > 0) || !std::isfinite(radii_[i])) throw RangeError("cap table radii must be positive and finite");
    if (i > 0 && !(radii_[i] > radii_[i - 1])) throw RangeError("cap table radii must be increasing");
  }
  for (double r : radii_) rows_.push_back(cap_quermass_extrapolated(n, theta, r, n_beta).Wtheta);
  rows_.push_back(cap_quermass_extrapolated(n, theta, std::nullopt, n_beta).Wtheta);
  for (int k = 0; k <= n; ++k) {
    const auto K = static_cast<std::size_t>(k);
    const double floor = kMonotoneNoise * std::abs(rows_.back()[K]);
    for (std::size_t i = 1; i < rows_.size(); ++i)
      if (!(rows_[i][K] - rows_[i - 1][K] > -floor))
        throw DomainError("cap family quermassintegral f_" + std::to_string(k) + " is not increasing");
  }
}

double CapTable::f(int k, std::optional<double> r) const {
  if (k < 0 || k > n_ + 1) throw RangeError("quermass index out of range");
  if (r && (*r < radii_.front() * (1 - 1e-12))) throw RangeError("radius below the cap table range");
  return cap_quermass_extrapolated(n_, theta_, r, n_beta_).W(k);
}

std::optional<double> CapTable::inverse(int k, double value) const {
  if (k < 0 || k > n_) throw RangeError("inverse lookup needs 0 <= k <= n");
  const auto K = static_cast<std::size_t>(k);
  const double lo_v = rows_.front()[K], hi_v = rows_.back()[K];
  const double tol = 1e-12 * std::max(1.0, std::abs(hi_v));
  if (value < lo_v - tol || value > hi_v + tol) throw RangeError("value outside the cap table range");
  if (value >= hi_v - tol) return std::nullopt;
  if (value <= lo_v) return radii_.front();
  // Bracket in s = 1/r using the table, then bisect the continuous family.
  std::size_t i = 0;
  while (i + 1 < radii_.size() && rows_[i + 1][K] <= value) ++i;
  double s_hi = 1 / radii_[i];
  double s_lo = i + 1 < radii_.size() ? 1 / radii_[i + 1] : 0.0;
  for (int it = 0; it < 200 && s_hi - s_lo > 1e-13 * std::max(1.0, s_hi); ++it) {
    const double mid = 0.5 * (s_lo + s_hi);
    const double fv = mid > 0 ? f(k, 1 / mid) : hi_v;
    (fv > value ? s_lo : s_hi) = mid;
  }
  const double s = 0.5 * (s_lo + s_hi);
  if (s <= 0) return std::nullopt;
  return 1 / s;
}

double CapTable::compose(int target, int source, double value) const {
  const auto r = inverse(source, value);
  if (!r) return rows_.back().at(static_cast<std::size_t>(target));
  return f(target, r);
}

std::string CapTable::to_csv(const std::vector<int>& ks) const {
  std::ostringstream os;
  os.precision(17);
  os << "r";
  for (int k : ks) os << ",f_" << k;
  os << "\n";
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (i < radii_.size()) os << radii_[i];
    else os << "inf";
    for (int k : ks) os << "," << rows_[i].at(static_cast<std::size_t>(k));
    os << "\n";
  }
  return os.str();
}

CapTable cap_reference_f(int n, double theta, const std::vector<double>& radii, int n_beta) {
  return CapTable(n, theta, radii, n_beta);
}

}  // namespace capflow::quermass
