#include "capflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "capflow/errors.hpp"
#include "capflow/jet.hpp"
#include "capflow/mobius.hpp"

namespace capflow::geometry {

namespace {

using J2 = Jet<2>;
using J1 = Jet<1>;

constexpr double kMaxU = 20.0;

double pole_value(const HalfSphereGrid& g) { return g.u(0, 0); }

// Eigenvalues of the pencil (h, g) for symmetric 2x2 forms via Cholesky of g.
std::array<double, 2> pencil_eigenvalues(const std::array<double, 3>& g, const std::array<double, 3>& h) {
  const double l11 = std::sqrt(g[0]);
  const double l21 = g[1] / l11;
  const double l22 = std::sqrt(g[2] - l21 * l21);
  // L^{-1} = [[a, 0], [c, d]]
  const double a = 1.0 / l11, c = -l21 / (l11 * l22), d = 1.0 / l22;
  const double m11 = a * a * h[0];
  const double m12 = a * (c * h[0] + d * h[1]);
  const double m22 = c * c * h[0] + 2 * c * d * h[1] + d * d * h[2];
  const double mean = 0.5 * (m11 + m22);
  const double rad = std::hypot(0.5 * (m11 - m22), m12);
  return {mean - rad, mean + rad};
}

Vec3 value3(const std::array<J2, 3>& X) { return {X[0].v, X[1].v, X[2].v}; }
Vec3 deriv3(const std::array<J2, 3>& X, int i) { return {X[0].d[i], X[1].d[i], X[2].d[i]}; }
Vec3 second3(const std::array<J2, 3>& X, int i, int j) {
  const int k = J2::idx(i, j);
  return {X[0].h[k], X[1].h[k], X[2].h[k]};
}

// dX/du at fixed direction: the image of the radial vector Y under D phi^{-1}.
template <std::size_t D>
std::array<double, D> radial_pushforward(const std::array<double, D>& Y) {
  std::array<J1, D> Yj;
  for (std::size_t i = 0; i < D; ++i) {
    Yj[i] = J1(Y[i]);
    Yj[i].d[0] = Y[i];
  }
  auto X = mobius::to_ball(Yj);
  std::array<double, D> out{};
  for (std::size_t i = 0; i < D; ++i) out[i] = X[i].d[0];
  return out;
}

J2 u_jet(const NodeJet& nj) {
  J2 u(nj.u);
  u.d = {nj.u1, nj.u2};
  u.h = {nj.u11, nj.u12, nj.u22};
  return u;
}

std::array<J2, 3> direction_jet(const NodeJet& nj) {
  if (nj.pole) {
    const J2 p = J2::variable(0.0, 0), q = J2::variable(0.0, 1);
    return {p, q, sqrt(1.0 - p * p - q * q)};
  }
  const J2 b = J2::variable(nj.beta, 0), s = J2::variable(nj.psi, 1);
  const J2 sb = sin(b);
  return {sb * cos(s), sb * sin(s), cos(b)};
}

void check_u(double u) {
  if (!std::isfinite(u)) throw NumericalFailure("graph function is not finite");
  if (u > kMaxU) throw PoleError("graph function overflow: the surface reached the pole of the Mobius map");
}

double trapezoid_weight(int j, int N) { return (j == 0 || j == N) ? 0.5 : 1.0; }

bool segments_cross(const std::array<double, 2>& a, const std::array<double, 2>& b,
                    const std::array<double, 2>& c, const std::array<double, 2>& d) {
  auto orient = [](const std::array<double, 2>& p, const std::array<double, 2>& q, const std::array<double, 2>& r) {
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
  };
  const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

}  // namespace

std::vector<BoundaryGhost> boundary_ghosts(const HalfSphereGrid& grid) {
  const int N = grid.n_beta(), M = grid.n_xi();
  const double h = grid.h_beta();
  const double th = grid.theta();
  const double cot = std::abs(th - std::numbers::pi / 2) < 1e-15 ? 0.0 : std::cos(th) / std::sin(th);
  std::vector<BoundaryGhost> out(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) {
    BoundaryGhost& b = out[static_cast<std::size_t>(m)];
    if (M > 1) b.u_tangential = (grid.u(N, grid.wrap(m + 1)) - grid.u(N, grid.wrap(m - 1))) / (2 * grid.h_xi());
    b.target = -cot * std::sqrt(1 + b.u_tangential * b.u_tangential);
    const double uN = grid.u(N, m), u1 = grid.u(N - 1, m), u2 = grid.u(N - 2, m);
    b.u_bb = (8 * u1 - u2 - 7 * uN + 6 * h * b.target) / (2 * h * h);
    b.ghost = h * h * b.u_bb + 2 * uN - u1;
  }
  return out;
}

std::size_t node_count(const HalfSphereGrid& grid) {
  if (grid.mode() == GridMode::axisymmetric) return static_cast<std::size_t>(grid.n_beta() + 1);
  return 1 + static_cast<std::size_t>(grid.n_beta()) * static_cast<std::size_t>(grid.n_xi());
}

std::vector<NodeJet> node_jets(const HalfSphereGrid& grid) {
  grid.check_finite();
  const int N = grid.n_beta(), M = grid.n_xi();
  const double h = grid.h_beta(), hx = grid.h_xi();
  const auto ghosts = boundary_ghosts(grid);
  std::vector<NodeJet> out;
  out.reserve(node_count(grid));

  const double u0 = pole_value(grid);
  const double r1 = std::sin(h);
  NodeJet pole;
  pole.pole = true;
  pole.u = u0;
  if (grid.mode() == GridMode::axisymmetric) {
    pole.u11 = pole.u22 = 2 * (grid.u(1) - u0) / (r1 * r1);
  } else {
    double mean = 0, c1 = 0, s1 = 0, c2 = 0, s2 = 0;
    for (int m = 0; m < M; ++m) {
      const double v = grid.u(1, m), ps = grid.xi(m);
      mean += v;
      c1 += v * std::cos(ps);
      s1 += v * std::sin(ps);
      c2 += v * std::cos(2 * ps);
      s2 += v * std::sin(2 * ps);
    }
    mean /= M;
    c1 *= 2.0 / M;
    s1 *= 2.0 / M;
    c2 *= 2.0 / M;
    s2 *= 2.0 / M;
    pole.u1 = c1 / r1;
    pole.u2 = s1 / r1;
    const double sum = 4 * (mean - u0) / (r1 * r1);
    const double diff = 4 * c2 / (r1 * r1);
    pole.u11 = 0.5 * (sum + diff);
    pole.u22 = 0.5 * (sum - diff);
    pole.u12 = 2 * s2 / (r1 * r1);
  }
  out.push_back(pole);

  auto at = [&](int j, int m) { return j == 0 ? u0 : grid.u(j, grid.wrap(m)); };
  for (int j = 1; j <= N; ++j) {
    for (int m = 0; m < M; ++m) {
      NodeJet nj;
      nj.j = j;
      nj.m = m;
      nj.beta = grid.beta(j);
      nj.psi = grid.mode() == GridMode::axisymmetric ? 0.0 : grid.xi(m);
      nj.u = at(j, m);
      if (j < N) {
        nj.u1 = (at(j + 1, m) - at(j - 1, m)) / (2 * h);
        nj.u11 = (at(j + 1, m) - 2 * nj.u + at(j - 1, m)) / (h * h);
      } else {
        const auto& b = ghosts[static_cast<std::size_t>(m)];
        nj.u1 = b.target;
        nj.u11 = b.u_bb;
      }
      if (M > 1) {
        nj.u2 = (at(j, m + 1) - at(j, m - 1)) / (2 * hx);
        nj.u22 = (at(j, m + 1) - 2 * nj.u + at(j, m - 1)) / (hx * hx);
        if (j < N) {
          nj.u12 = (at(j + 1, m + 1) - at(j + 1, m - 1) - at(j - 1, m + 1) + at(j - 1, m - 1)) / (4 * h * hx);
        } else {
          nj.u12 = (ghosts[static_cast<std::size_t>(grid.wrap(m + 1))].target -
                    ghosts[static_cast<std::size_t>(grid.wrap(m - 1))].target) /
                   (2 * hx);
        }
      }
      out.push_back(nj);
    }
  }
  return out;
}

SphereDerivatives sphere_derivatives(const NodeJet& nj) {
  SphereDerivatives s;
  if (nj.pole) {
    s.g1 = nj.u1;
    s.g2 = nj.u2;
    s.H11 = nj.u11;
    s.H12 = nj.u12;
    s.H22 = nj.u22;
    s.e1 = {1, 0, 0};
    s.e2 = {0, 1, 0};
    s.z = {0, 0, 1};
    return s;
  }
  const double sb = std::sin(nj.beta), cb = std::cos(nj.beta);
  const double sp = std::sin(nj.psi), cp = std::cos(nj.psi);
  s.g1 = nj.u1;
  s.g2 = nj.u2 / sb;
  s.H11 = nj.u11;
  s.H12 = (nj.u12 - cb / sb * nj.u2) / sb;
  s.H22 = (nj.u22 + sb * cb * nj.u1) / (sb * sb);
  s.e1 = {cb * cp, cb * sp, -sb};
  s.e2 = {-sp, cp, 0};
  s.z = {sb * cp, sb * sp, cb};
  return s;
}

std::vector<Vec3> embed(const HalfSphereGrid& grid) {
  const auto jets = node_jets(grid);
  std::vector<Vec3> out;
  out.reserve(jets.size());
  for (const auto& nj : jets) {
    check_u(nj.u);
    const auto s = sphere_derivatives(nj);
    const double rho = std::exp(nj.u);
    Vec3 Y = rho * s.z;
    Y[2] = std::max(Y[2], 0.0);
    Vec3 X = mobius::to_ball(Y);
    if (norm(X) > 1 + 1e-10) throw MeshQualityError("embedded point left the unit ball");
    out.push_back(X);
  }
  return out;
}

GeometryFields fundamental_forms(const HalfSphereGrid& grid) {
  const auto jets = node_jets(grid);
  const int n = grid.n();
  const int N = grid.n_beta();
  const bool axi = grid.mode() == GridMode::axisymmetric;
  const double th = grid.theta();
  const double ct = std::cos(th), st = std::sin(th);
  const double omega = symfunc::sphere_area(n - 1);

  GeometryFields f;
  f.n = n;
  f.mode = grid.mode();
  f.theta = th;
  f.h_beta = grid.h_beta();
  f.h_xi = grid.h_xi();
  f.n_beta = N;
  f.n_xi = grid.n_xi();
  f.nodes.reserve(jets.size());

  for (const auto& nj : jets) {
    check_u(nj.u);
    const auto z = direction_jet(nj);
    const J2 rho = exp(u_jet(nj));
    const std::array<J2, 3> Y{rho * z[0], rho * z[1], rho * z[2]};
    const auto X = mobius::to_ball(Y);

    NodeGeometry ng;
    ng.jet = nj;
    ng.X = value3(X);
    const Vec3 X1 = deriv3(X, 0), X2 = deriv3(X, 1);
    const Vec3 raw = cross(X1, X2);
    const double len = norm(raw);
    if (!(len > 0) || !std::isfinite(len)) throw MeshQualityError("degenerate tangent plane");
    const Vec3 dXdu = radial_pushforward<3>({Y[0].v, Y[1].v, Y[2].v});
    const double sgn = dot(raw, dXdu) > 0 ? -1.0 : 1.0;
    ng.nu = (sgn / len) * raw;

    ng.g = {dot(X1, X1), dot(X1, X2), dot(X2, X2)};
    const double det = ng.g[0] * ng.g[2] - ng.g[1] * ng.g[1];
    if (!(det >= kMinMetricDet)) throw MeshQualityError("degenerate metric (det g below threshold)");
    ng.h = {-dot(second3(X, 0, 0), ng.nu), -dot(second3(X, 0, 1), ng.nu), -dot(second3(X, 1, 1), ng.nu)};

    if (axi) {
      ng.kappa_profile = ng.h[0] / ng.g[0];
      ng.kappa_rot = ng.h[2] / ng.g[2];
      ng.kappa = expand_kappa({ng.kappa_profile, ng.kappa_rot}, n, f.mode);
      const double r = nj.pole ? 0.0 : std::sqrt(ng.g[2]);
      ng.area_weight = omega * std::pow(r, n - 1) * std::sqrt(ng.g[0]) * grid.h_beta() * trapezoid_weight(nj.j, N);
    } else {
      ng.kappa = expand_kappa(pencil_eigenvalues(ng.g, ng.h), n, f.mode);
      ng.area_weight = nj.pole ? 0.0 : std::sqrt(det) * grid.h_beta() * grid.h_xi() * trapezoid_weight(nj.j, N);
    }

    if (nj.j == N && !nj.pole) {
      BoundaryFrame b;
      b.m = nj.m;
      b.X = ng.X;
      b.nu = ng.nu;
      const double sx = norm(X2);
      if (!(sx > 1e-12)) throw MeshQualityError("boundary frame not orthonormalizable");
      b.xi_speed = sx;
      const Vec3 ea = (1.0 / sx) * X2;
      const Vec3 perp = X1 - dot(X1, ea) * ea;
      const double lp = norm(perp);
      if (!(lp > 1e-12)) throw MeshQualityError("boundary frame not orthonormalizable");
      b.mu = (1.0 / lp) * perp;
      const double cb = 1.0 / lp, cpsi = -cb * ng.g[1] / ng.g[2];
      b.h_mixed = (cb * ng.h[1] + cpsi * ng.h[2]) / sx;
      b.h_tangent = ng.h[2] / ng.g[2];
      const Vec3 Nbar = normalized(ng.X);
      b.nubar = normalized(ng.nu - dot(ng.nu, Nbar) * Nbar);
      b.hhat = -dot(second3(X, 1, 1), b.nubar) / (sx * sx);
      b.contact_residual = std::abs(dot(Nbar, ng.nu) + ct);
      const Vec3 r1 = Nbar - (st * b.mu - ct * ng.nu);
      const Vec3 r2 = b.nubar - (ct * b.mu + st * ng.nu);
      b.transform_residual = std::max(norm(r1), norm(r2));
      b.principal_residual = std::abs(b.h_tangent - (st * b.hhat - ct));
      b.geodesic_radius = std::acos(std::clamp(Nbar[2], -1.0, 1.0));
      b.length_weight = axi ? omega * std::pow(sx, n - 1) : sx * grid.h_xi();
      f.boundary.push_back(b);
    }
    f.nodes.push_back(std::move(ng));
  }
  return f;
}

std::vector<ProfileCurvature> profile_curvatures(const HalfSphereGrid& grid) {
  if (grid.mode() != GridMode::axisymmetric) throw DomainError("profile curvatures need an axisymmetric grid");
  const auto jets = node_jets(grid);
  std::vector<ProfileCurvature> out;
  std::vector<std::array<double, 2>> pts;
  out.reserve(jets.size());
  for (const auto& nj : jets) {
    check_u(nj.u);
    const J1 b = J1::variable(nj.beta, 0);
    J1 u(nj.u);
    u.d[0] = nj.u1;
    u.h[0] = nj.u11;
    const J1 rho = exp(u);
    const std::array<J1, 2> Y{rho * sin(b), rho * cos(b)};
    const auto X = mobius::to_ball(Y);
    const double r = X[0].v;
    const std::array<double, 2> d1{X[0].d[0], X[1].d[0]}, d2{X[0].h[0], X[1].h[0]};
    const double speed2 = d1[0] * d1[0] + d1[1] * d1[1];
    if (!(speed2 > 1e-14)) throw MeshQualityError("profile curve is singular");
    const double speed = std::sqrt(speed2);
    std::array<double, 2> nu{d1[1] / speed, -d1[0] / speed};
    const auto dXdu = radial_pushforward<2>({Y[0].v, Y[1].v});
    if (nu[0] * dXdu[0] + nu[1] * dXdu[1] > 0) nu = {-nu[0], -nu[1]};
    ProfileCurvature pc;
    pc.kappa_profile = -(d2[0] * nu[0] + d2[1] * nu[1]) / speed2;
    if (nj.pole) {
      pc.kappa_rot = pc.kappa_profile;
    } else {
      if (!(r > 0)) throw MeshQualityError("profile curve crosses the axis");
      pc.kappa_rot = nu[0] / r;
    }
    out.push_back(pc);
    pts.push_back({r, X[1].v});
  }
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    for (std::size_t k = i + 2; k + 1 < pts.size(); ++k)
      if (segments_cross(pts[i], pts[i + 1], pts[k], pts[k + 1]))
        throw MeshQualityError("profile curve self-intersects");
  return out;
}

ConformalNode conformal_node(const NodeJet& nj, GridMode mode) {
  check_u(nj.u);
  const auto s = sphere_derivatives(nj);
  ConformalNode c;
  c.rho = std::exp(nj.u);
  const double g1 = s.g1, g2 = s.g2;
  c.v = std::sqrt(1 + g1 * g1 + g2 * g2);
  const std::array<double, 3> G{1 + g1 * g1, g1 * g2, 1 + g2 * g2};
  const double f = c.rho / c.v;
  const std::array<double, 3> hout{f * (G[0] - s.H11), f * (G[1] - s.H12), f * (G[2] - s.H22)};
  const double r2 = c.rho * c.rho;
  std::array<double, 2> kout;
  if (mode == GridMode::axisymmetric) {
    kout = {hout[0] / (r2 * G[0]), hout[2] / (r2 * G[2])};
  } else {
    kout = pencil_eigenvalues({r2 * G[0], r2 * G[1], r2 * G[2]}, hout);
  }
  const Vec3 nout = (1.0 / c.v) * (s.z - g1 * s.e1 - g2 * s.e2);
  const Vec3 ype = {c.rho * s.z[0], c.rho * s.z[1], c.rho * s.z[2] + 1};
  const double w = dot(ype, ype);
  c.conformal = 2 / w;
  // N = -nout, grad omega = -2 (y+e)/w.
  const double dN = 2 * dot(nout, ype) / w;
  // Eigenvalue order flips under the sign change; full2d re-sorts later.
  c.kappa = {0.5 * w * (-kout[0] + dN), 0.5 * w * (-kout[1] + dN)};
  return c;
}

symfunc::KappaVector expand_kappa(const std::array<double, 2>& k, int n, GridMode mode) {
  if (mode == GridMode::full2d) return symfunc::KappaVector({k[0], k[1]});
  std::vector<double> v(static_cast<std::size_t>(n), k[1]);
  v[0] = k[0];
  return symfunc::KappaVector(std::move(v));
}

std::vector<symfunc::KappaVector> conformal_graph_kernel(const HalfSphereGrid& grid) {
  const auto jets = node_jets(grid);
  std::vector<symfunc::KappaVector> out;
  out.reserve(jets.size());
  for (const auto& nj : jets) out.push_back(expand_kappa(conformal_node(nj, grid.mode()).kappa, grid.n(), grid.mode()));
  return out;
}

std::vector<BoundaryFrame> boundary_frame(const GeometryFields& fields) {
  if (fields.boundary.empty()) throw MeshQualityError("no boundary nodes resolved");
  return fields.boundary;
}

ConvexityReport convexity_report(const GeometryFields& fields) {
  ConvexityReport r;
  r.kappa_min = std::numeric_limits<double>::infinity();
  r.kappa_max = -r.kappa_min;
  r.x_dot_nu_min = r.height_min = std::numeric_limits<double>::infinity();
  r.x_dot_nu_max = r.height_max = r.nu_dot_e_max = -std::numeric_limits<double>::infinity();
  bool strict = true;
  double ht = 0;
  for (const auto& ng : fields.nodes) {
    const auto& k = ng.kappa;
    r.kappa_min = std::min(r.kappa_min, k.min());
    r.kappa_max = std::max(r.kappa_max, k.max());
    double mean = 0;
    for (double x : k.values()) mean += x;
    mean /= k.n();
    for (double x : k.values()) r.umbilicity = std::max(r.umbilicity, std::abs(x - mean));
    if (k.in_positive_cone()) {
      double s = 0;
      for (double x : k.values()) s += 1.0 / x;
      ht = std::max(ht, s);
    } else {
      strict = false;
    }
    const double xn = dot(ng.X, ng.nu);
    r.x_dot_nu_min = std::min(r.x_dot_nu_min, xn);
    r.x_dot_nu_max = std::max(r.x_dot_nu_max, xn);
    r.height_min = std::min(r.height_min, ng.X[2]);
    r.height_max = std::max(r.height_max, ng.X[2]);
    r.nu_dot_e_max = std::max(r.nu_dot_e_max, ng.nu[2]);
  }
  if (strict) r.htilde_max = ht;
  return r;
}

}  // namespace capflow::geometry
