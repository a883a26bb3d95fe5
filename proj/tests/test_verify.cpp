#include <cmath>
#include <cstring>
#include <numbers>

#include "capflow/errors.hpp"
#include "capflow/initial_data.hpp"
#include "capflow/verify.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace capflow;
using namespace capflow::verify;
using geometry::GridMode;
using geometry::HalfSphereGrid;

namespace {

constexpr double kPi = std::numbers::pi;

HalfSphereGrid grid_for(int n, double theta, std::optional<double> r, int N, double eps = 0) {
  HalfSphereGrid g(n, GridMode::axisymmetric, N, 1, theta);
  mobius::InitialDataSpec s;
  s.kind = eps == 0 ? mobius::InitialKind::cap : mobius::InitialKind::perturbed_cap;
  s.cap = r ? mobius::CapSpec::cap(theta, *r) : mobius::CapSpec::flat(theta);
  s.epsilon = eps;
  if (!r) s.convexity = mobius::ConvexityRequirement::weak;
  mobius::initial_data(s, g);
  return g;
}

quermass::QuermassVector extrapolated_W(int n, double theta, std::optional<double> r, int N, double eps) {
  const auto a = quermass::assemble_W(geometry::fundamental_forms(grid_for(n, theta, r, N, eps)));
  const auto b = quermass::assemble_W(geometry::fundamental_forms(grid_for(n, theta, r, 2 * N, eps)));
  return quermass::richardson(a, b);
}

std::string fnv1a(const std::vector<double>& v) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double x : v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &x, sizeof x);
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

flow::FlowTrace short_run(flow::FlowKind kind, int n, double theta, double r, double eps, int N, double t_max) {
  flow::FlowConfig c;
  c.kind = kind;
  c.n = n;
  c.theta = theta;
  c.n_beta = N;
  c.t_max = t_max;
  c.monitor_every = 10;
  return flow::run(c, grid_for(n, theta, r, N, eps));
}

}  // namespace

TEST_CASE("report construction") {
  const auto a = inequality("x", "d", 2.0, 1.0, 1e-8);
  CHECK(a.margin == 1.0);
  CHECK(a.verdict == Verdict::pass);
  CHECK(inequality("x", "d", 1.0, 1.0 + 1e-8, 1e-8).verdict == Verdict::pass);
  CHECK(inequality("x", "d", 1.0, 1.0 + 3e-8, 1e-8).verdict == Verdict::fail);
  const auto e = equality("x", "d", 1.0, 1.5, 0.1);
  CHECK(e.margin == -0.5);
  CHECK(e.verdict == Verdict::fail);
  CHECK(equality("x", "d", 1.0, 1.05, 0.1).verdict == Verdict::pass);
  CHECK(to_string(Verdict::inconclusive) == "inconclusive");
}

TEST_CASE("input digest is FNV-1a over the double bytes") {
  CHECK(digest(std::vector<double>{}) == "cbf29ce484222325");
  const std::vector<double> v{1.0, -2.5, kPi};
  CHECK(digest(v) == fnv1a(v));
  CHECK(digest(v).size() == 16u);
  CHECK(digest(v) != digest(std::vector<double>{1.0, -2.5}));
}

TEST_CASE("main inequality on the flat disk is an equality") {
  const auto W = quermass::flat_ball_reference(3, kPi / 2);
  const auto r = check_af_main(W, 3, 1);
  CHECK(std::abs(r.margin) <= 1e-8);
  CHECK(r.verdict == Verdict::pass);
  CHECK(r.lhs == doctest::Approx(kPi / 3));
}

TEST_CASE("main inequality is strict on perturbed caps") {
  const auto W3 = extrapolated_W(3, kPi / 2, 1.0, 100, 0.05);
  const auto r3 = check_af_main(W3, 3, 1);
  CHECK(r3.margin > 0);
  CHECK(r3.verdict == Verdict::pass);
  const auto W5 = extrapolated_W(5, kPi / 2, 2.0, 100, 0);
  CHECK(check_af_main(W5, 5, 2).margin > 0);
  CHECK(check_af_main(W5, 5, 1).margin > 0);
}

TEST_CASE("main inequality error paths") {
  CHECK_THROWS_AS(check_af_main(quermass::flat_ball_reference(3, kPi / 3), 3, 1), WrongTheoremError);
  const auto W = quermass::flat_ball_reference(5, kPi / 2);
  CHECK_THROWS_AS(check_af_main(W, 5, 0), DomainError);
  CHECK_THROWS_AS(check_af_main(W, 5, 3), DomainError);
  CHECK(check_af_main(W, 5, 1, -0.1).verdict == Verdict::inconclusive);
  CHECK(check_af_main(W, 5, 1, 0.0).verdict == Verdict::pass);
}

TEST_CASE("cap-family comparisons") {
  const double theta = kPi / 3;
  const quermass::CapTable table(2, theta, quermass::CapTable::default_radii(), 100);
  const auto cap = quermass::cap_reference_exact(2, theta, 1.3);
  const auto flat = quermass::flat_ball_reference(2, theta);
  const auto bumped = extrapolated_W(2, theta, 1.3, 100, 0.05);
  for (int k = 1; k <= 2; ++k) {
    CHECK(check_af_thmC(cap, table, k, 1e-6).verdict == Verdict::pass);
    CHECK(std::abs(check_af_thmC(cap, table, k, 1e-6).margin) <= 1e-6);
    CHECK(check_af_thmC(flat, table, k, 1e-6).verdict == Verdict::pass);
    CHECK(check_af_thmC(bumped, table, k, 1e-8).margin > 1e-6);
  }
  for (int k = 0; k < 2; ++k) {
    CHECK(std::abs(check_af_thmB(cap, table, k, 1e-6).margin) <= 1e-6);
    CHECK(check_af_thmB(bumped, table, k, 1e-8).margin > 1e-6);
  }
  auto too_big = flat;
  too_big.Wtheta[0] *= 1.5;
  CHECK_THROWS_AS(check_af_thmC(too_big, table, 1, 1e-6), RangeError);
}

TEST_CASE("linear extrapolation") {
  const std::vector<double> t{0, 1, 2, 3};
  const std::vector<double> y{1, 3, 5, 7};
  CHECK(extrapolate_linear(t, y, 10) == doctest::Approx(21));
}

TEST_CASE("variational identity on short runs") {
  const auto icf = short_run(flow::FlowKind::icf, 2, kPi / 2, 1.0, 0.05, 100, 0.05);
  CHECK(check_variational(icf).verdict == Verdict::pass);
  const auto mcf = short_run(flow::FlowKind::mcf, 2, kPi / 3, 1.0, 0.05, 200, 0.03);
  CHECK(check_variational(mcf).verdict == Verdict::pass);
  // The mismatch is a discretization error and grows on a coarse grid.
  const auto coarse = short_run(flow::FlowKind::mcf, 3, kPi / 3, 1.0, 0.0, 50, 0.02);
  const auto fine = short_run(flow::FlowKind::mcf, 3, kPi / 3, 1.0, 0.0, 100, 0.02);
  CHECK(check_variational(fine).lhs < check_variational(coarse).lhs / 3);
  const auto lim = check_limits(icf, 0);
  CHECK(lim.verdict == Verdict::inconclusive);
  flow::FlowTrace tiny;
  CHECK(check_variational(tiny).verdict == Verdict::inconclusive);
}

TEST_CASE("pointwise lemmas on free-boundary data") {
  const auto fields = geometry::fundamental_forms(grid_for(3, kPi / 2, 1.0, 100, 0.05));
  const auto reports = check_pointwise_lemmas(fields);
  CHECK(all_pass(reports));
  bool saw_area = false;
  for (const auto& r : reports) saw_area = saw_area || r.id == "lemma.area_upper";
  CHECK(saw_area);
  const auto tilted = check_pointwise_lemmas(geometry::fundamental_forms(grid_for(3, kPi / 3, 1.0, 100, 0.05)));
  for (const auto& r : tilted)
    if (r.id.rfind("lemma.", 0) == 0) CHECK(r.verdict == Verdict::inconclusive);
  CHECK(check_height_estimate(fields, quermass::assemble_W(fields)).verdict == Verdict::pass);
}

TEST_CASE("identity and sampled property suites") {
  CHECK(all_pass(check_identities()));
  const auto a = check_symfunc_properties(7, 3000);
  CHECK(all_pass(a));
  const auto b = check_symfunc_properties(7, 3000);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].inputs_digest == b[i].inputs_digest);
}

TEST_CASE("json and table rendering") {
  std::vector<CheckReport> reports{inequality("a.b", "0", 1, 0, 0), equality("c", "1", NAN, 0, 0)};
  const auto j = nlohmann::json::parse(reports_json(reports));
  REQUIRE(j.size() == 2u);
  CHECK(j[0]["id"] == "a.b");
  CHECK(j[0]["verdict"] == "pass");
  CHECK(j[1]["lhs"].is_null());
  const auto table = summary_table(reports);
  CHECK(table.find("a.b") != std::string::npos);
  CHECK_FALSE(all_pass(reports));
}
