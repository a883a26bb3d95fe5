#include <cmath>
#include <numbers>

#include "capflow/errors.hpp"
#include "capflow/initial_data.hpp"
#include "capflow/quermass.hpp"
#include "capflow/symfunc.hpp"
#include "doctest.h"

using namespace capflow;
using namespace capflow::quermass;
using geometry::GridMode;
using geometry::HalfSphereGrid;

namespace {

constexpr double kPi = std::numbers::pi;

geometry::GeometryFields fields_of(int n, double theta, std::optional<double> r, int N, double eps = 0) {
  HalfSphereGrid g(n, GridMode::axisymmetric, N, 1, theta);
  mobius::InitialDataSpec s;
  s.kind = eps == 0 ? mobius::InitialKind::cap : mobius::InitialKind::perturbed_cap;
  s.cap = r ? mobius::CapSpec::cap(theta, *r) : mobius::CapSpec::flat(theta);
  s.epsilon = eps;
  if (!r) s.convexity = mobius::ConvexityRequirement::weak;
  mobius::initial_data(s, g);
  return geometry::fundamental_forms(g);
}

// Volume of the intersection of two balls with radii R, r and center distance d.
double lens_volume(double R, double r, double d) {
  return kPi * std::pow(R + r - d, 2) * (d * d + 2 * d * r - 3 * r * r + 2 * d * R + 6 * r * R - 3 * R * R) / (12 * d);
}

}  // namespace

TEST_CASE("flat disk with free boundary in the 3-ball") {
  const auto f = fields_of(2, kPi / 2, std::nullopt, 200);
  const auto q = assemble_W(f);
  CHECK(q.area() == doctest::Approx(kPi).epsilon(1e-4));
  CHECK(std::abs(q.curvature_integrals[1]) <= 1e-6);
  CHECK(q.volume == doctest::Approx(2 * kPi / 3).epsilon(1e-4));
  CHECK(sphere_region_area(f) == doctest::Approx(2 * kPi).epsilon(1e-6));
}

TEST_CASE("flat ball volume at a general angle") {
  for (double theta : {kPi / 3, kPi / 4, kPi / 6}) {
    const double c = std::cos(theta);
    const auto q = assemble_W(fields_of(2, theta, std::nullopt, 200));
    CHECK(q.volume == doctest::Approx(kPi * (2.0 / 3 - c + c * c * c / 3)).epsilon(1e-4));
  }
}

TEST_CASE("orthogonal unit cap against closed-form zone and lens") {
  const auto f = fields_of(2, kPi / 2, 1.0, 200);
  const auto q = assemble_W(f);
  // The cap sphere centered at sqrt(2) e meets S^2 on the plane z = 1/sqrt(2).
  CHECK(q.area() == doctest::Approx(2 * kPi * (1 - 1 / std::sqrt(2.0))).epsilon(1e-4));
  CHECK(q.volume == doctest::Approx(lens_volume(1, 1, std::sqrt(2.0))).epsilon(1e-4));
  CHECK(sphere_region_area(f) == doctest::Approx(2 * kPi * (1 - std::cos(kPi / 4))).epsilon(1e-5));
}

TEST_CASE("two sphere-area paths agree") {
  for (double r : {0.5, 1.0, 3.0}) {
    const auto f = fields_of(2, kPi / 3, r, 200, 0.03);
    CHECK(sphere_region_area_gauss_bonnet(f) == doctest::Approx(sphere_region_area_polar(f)).epsilon(1e-5));
  }
}

TEST_CASE("sphere quermassintegrals of geodesic balls") {
  for (double rho : {0.3, 1.0, kPi / 2, 2.5}) {
    const auto W = geodesic_ball_sphere_quermass(2, rho);
    CHECK(W[0] == doctest::Approx(2 * kPi * (1 - std::cos(rho))));
    CHECK(W[2] == doctest::Approx(kPi));
  }
  CHECK(sin_power_integral(3, 1.1) == doctest::Approx(std::cos(1.1 * 3) / 12 - 3 * std::cos(1.1) / 4 + 2.0 / 3));
  // Equator of S^3 bounds a hemisphere whose boundary area is 4 pi.
  const auto Ws = sphere_quermass(fields_of(3, kPi / 2, std::nullopt, 100));
  CHECK(Ws[1] == doctest::Approx(4 * kPi / 3).epsilon(1e-6));
  for (int n = 2; n <= 7; ++n)
    for (int k = 1; 2 * k - 1 <= n; ++k) {
      const double direct = symfunc::sphere_area(n - 1) / n * symfunc::double_factorial(2 * k - 2) *
                            symfunc::double_factorial(n - 2 * k + 1) / symfunc::double_factorial(n - 1);
      CHECK(equator_odd_closed_form(n, k) == doctest::Approx(direct).epsilon(1e-12));
      CHECK(geodesic_ball_sphere_quermass(n, kPi / 2)[static_cast<std::size_t>(2 * k - 1)] ==
            doctest::Approx(direct).epsilon(1e-10));
      CHECK(geodesic_ball_odd_closed_form(n, k, 0.8) ==
            doctest::Approx(geodesic_ball_sphere_quermass(n, 0.8)[static_cast<std::size_t>(2 * k - 1)]).epsilon(1e-10));
    }
}

TEST_CASE("flat disk in the 4-ball") {
  const auto q = cap_quermass_extrapolated(3, kPi / 2, std::nullopt, 100);
  CHECK(q.W(1) == doctest::Approx(kPi / 3).epsilon(1e-6));
  CHECK(q.W(3) == doctest::Approx(kPi / 3).epsilon(1e-6));
  const auto ref = flat_ball_reference(3, kPi / 2);
  CHECK(ref.W(1) == doctest::Approx(kPi / 3).epsilon(1e-12));
  CHECK(ref.W(3) == doctest::Approx(kPi / 3).epsilon(1e-12));
  for (int k = 0; k <= 1; ++k) CHECK(flat_disk_limit_W(3, k) == doctest::Approx(kPi / 3).epsilon(1e-12));
}

TEST_CASE("assembly from stored parts") {
  for (double theta : {kPi / 2, kPi / 3}) {
    const auto q = assemble_W(fields_of(4, theta, 1.2, 100, 0.03));
    const double c = theta == kPi / 2 ? 0.0 : std::cos(theta);
    CHECK(q.W(1) == doctest::Approx((q.area() - c * q.Wsphere[0]) / 5).epsilon(1e-12));
    CHECK(q.volume >= 0);
    CHECK(q.area() >= 0);
    CHECK(q.W(0) == doctest::Approx(q.volume));
    if (theta == kPi / 2)
      for (int k = 2; k <= 5; ++k) CHECK(free_boundary_W(q, k) == doctest::Approx(q.W(k)).epsilon(1e-12));
  }
}

TEST_CASE("exact cap reference and quadrature convergence") {
  for (int n : {2, 3, 5}) {
    const auto exact = cap_reference_exact(n, kPi / 3, 1.5);
    const auto q100 = cap_quermass(n, kPi / 3, 1.5, 100);
    const auto q200 = cap_quermass(n, kPi / 3, 1.5, 200);
    const auto rich = richardson(q100, q200);
    for (int k = 0; k <= n + 1; ++k) {
      const double e1 = std::abs(q100.W(k) - exact.W(k)), e2 = std::abs(q200.W(k) - exact.W(k));
      CHECK(e2 <= 1e-3 * std::max(1.0, std::abs(exact.W(k))));
      if (e2 > 1e-11) CHECK(std::log2(e1 / e2) >= 1.8);
      CHECK(rich.W(k) == doctest::Approx(exact.W(k)).epsilon(1e-7));
    }
  }
}

TEST_CASE("cap family is increasing in the radius and tends to the flat ball") {
  const std::vector<double> radii{0.2, 0.5, 1.0, 2.0, 5.0, 20.0};
  const CapTable table(3, kPi / 3, radii, 60);
  const auto flat = flat_ball_reference(3, kPi / 3);
  // W_{n+1} is the same for every cap.
  for (std::size_t i = 0; i < table.rows().size(); ++i)
    CHECK(table.rows()[i][4] == doctest::Approx(table.rows()[0][4]).epsilon(1e-5));
  for (int k = 0; k <= 3; ++k) {
    for (std::size_t i = 0; i + 1 < table.rows().size(); ++i)
      CHECK(table.rows()[i + 1][static_cast<std::size_t>(k)] > table.rows()[i][static_cast<std::size_t>(k)]);
    CHECK(table.f(k, std::nullopt) == doctest::Approx(flat.W(k)).epsilon(1e-6));
  }
  for (int k = 0; k <= 3; ++k) {
    const double v = table.f(k, 1.7);
    const auto r = table.inverse(k, v);
    REQUIRE(r.has_value());
    CHECK(*r == doctest::Approx(1.7).epsilon(1e-8));
    CHECK(table.compose(k, k, v) == doctest::Approx(v).epsilon(1e-9));
  }
  CHECK_FALSE(table.inverse(1, table.f(1, std::nullopt)).has_value());
  CHECK_THROWS_AS(table.inverse(1, flat.W(1) * 1.01), RangeError);
  CHECK_THROWS_AS(table.inverse(1, table.rows().front()[1] * 0.5), RangeError);
  CHECK_THROWS_AS(table.f(1, 0.05), RangeError);
  CHECK_THROWS_AS(table.f(7, 1.0), RangeError);
  CHECK_THROWS_AS(CapTable(3, kPi / 3, {}, 60), RangeError);
  CHECK_THROWS_AS(CapTable(3, kPi / 3, {1.0, 0.5}, 60), RangeError);
  const auto csv = table.to_csv({0, 1});
  CHECK(csv.find("inf") != std::string::npos);
}

TEST_CASE("free-boundary volume table endpoint matches the ball cut") {
  const CapTable table(2, kPi / 2, {1.0, 10.0}, 100);
  CHECK(table.f(0, std::nullopt) == doctest::Approx(2 * kPi / 3).epsilon(1e-8));
  const double c = std::cos(kPi / 3);
  const CapTable t3(2, kPi / 3, {1.0, 10.0}, 100);
  CHECK(t3.f(0, std::nullopt) == doctest::Approx(kPi * (2.0 / 3 - c + c * c * c / 3)).epsilon(1e-5));
}

TEST_CASE("large caps approach the flat ball continuously") {
  const auto flat = assemble_W(fields_of(2, kPi / 3, std::nullopt, 100));
  double prev = 1e300;
  for (double r : {5.0, 50.0, 500.0}) {
    const double gap = std::abs(assemble_W(fields_of(2, kPi / 3, r, 100)).volume - flat.volume);
    CHECK(gap < prev);
    CHECK(gap * r < 2.0);
    prev = gap;
  }
}
