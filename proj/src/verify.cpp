#include "capflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "capflow/errors.hpp"
#include "capflow/symfunc.hpp"
#include "json.hpp"

namespace capflow::verify {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

std::string digest(std::span<const double> values) {
  std::uint64_t h = 14695981039346656037ull;
  for (double x : values) {
    unsigned char b[sizeof(double)];
    std::memcpy(b, &x, sizeof b);
    for (unsigned char c : b) {
      h ^= c;
      h *= 1099511628211ull;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string digest(const quermass::QuermassVector& W) {
  std::vector<double> v{static_cast<double>(W.n), W.theta};
  v.insert(v.end(), W.Wtheta.begin(), W.Wtheta.end());
  v.insert(v.end(), W.Wsphere.begin(), W.Wsphere.end());
  v.insert(v.end(), W.curvature_integrals.begin(), W.curvature_integrals.end());
  return digest(v);
}

namespace {

double rel(double margin, double lhs, double rhs) {
  return margin / std::max({std::abs(lhs), std::abs(rhs), 1e-30});
}

CheckReport inconclusive(std::string id, std::string dig, std::string notes) {
  CheckReport r;
  r.id = std::move(id);
  r.inputs_digest = std::move(dig);
  r.lhs = r.rhs = r.margin = r.relative_margin = std::numeric_limits<double>::quiet_NaN();
  r.verdict = Verdict::inconclusive;
  r.notes = std::move(notes);
  return r;
}

bool is_free_boundary(double theta) { return std::abs(theta - std::numbers::pi / 2) < 1e-12; }

}  // namespace

CheckReport inequality(std::string id, std::string inputs_digest, double lhs, double rhs, double tolerance,
                       std::string notes) {
  CheckReport r;
  r.id = std::move(id);
  r.inputs_digest = std::move(inputs_digest);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = lhs - rhs;
  r.relative_margin = rel(r.margin, lhs, rhs);
  r.tolerance = tolerance;
  r.verdict = r.margin >= -tolerance ? Verdict::pass : Verdict::fail;
  r.notes = std::move(notes);
  return r;
}

CheckReport equality(std::string id, std::string inputs_digest, double lhs, double rhs, double tolerance,
                     std::string notes) {
  CheckReport r;
  r.id = std::move(id);
  r.inputs_digest = std::move(inputs_digest);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = -std::abs(lhs - rhs);
  r.relative_margin = rel(r.margin, lhs, rhs);
  r.tolerance = tolerance;
  r.verdict = r.margin >= -tolerance ? Verdict::pass : Verdict::fail;
  r.notes = std::move(notes);
  return r;
}

CheckReport check_af_main(const quermass::QuermassVector& W, int n, int k, std::optional<double> kappa_min,
                          double tolerance) {
  if (!is_free_boundary(W.theta)) throw WrongTheoremError("the sharp inequality needs theta = pi/2");
  if (W.n != n) throw DomainError("quermass vector dimension does not match n");
  if (k < 1 || 2 * k + 1 > n) throw DomainError("af_main needs k >= 1 and 2k+1 <= n");
  const std::string id = "af_main.n" + std::to_string(n) + ".k" + std::to_string(k);
  if (kappa_min && *kappa_min < -tolerance)
    return inconclusive(id, digest(W), "input is not weakly convex");
  return inequality(id, digest(W), W.W(2 * k + 1), symfunc::af_rhs_A(n, k, W.W(1)), tolerance);
}

CheckReport check_af_thmC(const quermass::QuermassVector& W, const quermass::CapTable& table, int k,
                          double tolerance) {
  if (W.n != table.n() || std::abs(W.theta - table.theta()) > 1e-12)
    throw DomainError("cap table does not match the input dimension or angle");
  if (k < 1 || k > W.n + 1) throw DomainError("thmC index out of range");
  const double rhs = table.compose(k, 0, W.W(0));
  return inequality("af_thmC.k" + std::to_string(k), digest(W), W.W(k), rhs, tolerance,
                    "cap table n_beta=" + std::to_string(table.n_beta()));
}

CheckReport check_af_thmB(const quermass::QuermassVector& W, const quermass::CapTable& table, int k,
                          double tolerance) {
  if (W.n != table.n() || std::abs(W.theta - table.theta()) > 1e-12)
    throw DomainError("cap table does not match the input dimension or angle");
  const int n = W.n;
  if (k < 0 || k >= n) throw DomainError("thmB needs 0 <= k < n");
  const double rhs = table.compose(n, k, W.W(k));
  return inequality("af_thmB.k" + std::to_string(k), digest(W), W.W(n), rhs, tolerance,
                    "cap table n_beta=" + std::to_string(table.n_beta()));
}

double extrapolate_linear(std::span<const double> t, std::span<const double> y, double at) {
  if (t.size() != y.size() || t.empty()) throw DomainError("extrapolation needs matching non-empty samples");
  if (t.size() == 1) return y[0];
  double mt = 0, my = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= t.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sxy += (t[i] - mt) * (y[i] - my);
    sxx += (t[i] - mt) * (t[i] - mt);
  }
  if (sxx == 0) return my;
  return my + sxy / sxx * (at - mt);
}

namespace {

struct Tail {
  std::vector<double> t;
  double at = 0;
  std::string note;
};

Tail final_rows(const flow::FlowTrace& trace) {
  Tail tail;
  const std::size_t count = std::min<std::size_t>(10, trace.rows.size());
  for (std::size_t i = trace.rows.size() - count; i < trace.rows.size(); ++i) tail.t.push_back(trace.rows[i].t);
  const auto& last = trace.rows.back();
  if (std::isfinite(last.tstar_remaining)) {
    tail.at = last.t + last.tstar_remaining;
    tail.note = "linear fit over the final " + std::to_string(count) + " rows evaluated at the predicted terminal time";
  } else {
    tail.at = last.t;
    tail.note = "terminal time unknown; linear fit evaluated at the last row";
  }
  return tail;
}

template <class Get>
std::vector<double> tail_values(const flow::FlowTrace& trace, std::size_t count, Get get) {
  std::vector<double> v;
  for (std::size_t i = trace.rows.size() - count; i < trace.rows.size(); ++i) v.push_back(get(trace.rows[i]));
  return v;
}

std::string trace_digest(const flow::FlowTrace& trace) {
  std::vector<double> v;
  for (const auto& r : trace.rows) {
    v.push_back(r.t);
    v.insert(v.end(), r.W.Wtheta.begin(), r.W.Wtheta.end());
  }
  return digest(v);
}

}  // namespace

CheckReport check_limits(const flow::FlowTrace& trace, int k) {
  const int n = trace.config.n;
  const std::string id = "limits.W" + std::to_string(2 * k + 1);
  if (k < 0 || 2 * k + 1 > n) throw DomainError("limit index needs 2k+1 <= n");
  if (trace.rows.empty()) return inconclusive(id, "", "empty trace");
  const std::string dig = trace_digest(trace);
  if (trace.reason != flow::StopReason::min_F)
    return inconclusive(id, dig, "trace stopped before the terminal threshold (" + flow::to_string(trace.reason) + ")");
  const auto tail = final_rows(trace);
  const auto y = tail_values(trace, tail.t.size(), [&](const flow::FlowTraceRow& r) { return r.W.W(2 * k + 1); });
  const double lhs = extrapolate_linear(tail.t, y, tail.at);
  const double rhs = k == 0 ? symfunc::sphere_area(n - 1) / (n * (n + 1)) : quermass::flat_disk_limit_W(n, k);
  return equality(id, dig, lhs, rhs, kLimitTolerance * std::abs(rhs), tail.note);
}

CheckReport check_limit_Q(const flow::FlowTrace& trace) {
  const int n = trace.config.n;
  if (n < 3) throw DomainError("Q is defined for n >= 3");
  if (trace.rows.empty()) return inconclusive("limits.Q", "", "empty trace");
  const std::string dig = trace_digest(trace);
  if (trace.reason != flow::StopReason::min_F)
    return inconclusive("limits.Q", dig,
                        "trace stopped before the terminal threshold (" + flow::to_string(trace.reason) + ")");
  const auto tail = final_rows(trace);
  const auto y = tail_values(trace, tail.t.size(), [](const flow::FlowTraceRow& r) { return r.Q; });
  const double lhs = extrapolate_linear(tail.t, y, tail.at);
  const double rhs = flow::q_limit(n);
  return equality("limits.Q", dig, lhs, rhs, kLimitTolerance * std::abs(rhs), tail.note);
}

CheckReport check_variational(const flow::FlowTrace& trace) {
  const std::string id = "variational";
  if (trace.rows.size() < 3) return inconclusive(id, trace_digest(trace), "fewer than three rows");
  const int n = trace.config.n;
  const auto& rows = trace.rows;
  // Skip the initial boundary-compatibility layer.
  const double t_skip = rows.front().t + kVariationalSkipFraction * (rows.back().t - rows.front().t);
  std::size_t first = 1;
  while (first + 1 < rows.size() && rows[first].t < t_skip) ++first;
  std::vector<double> scale(static_cast<std::size_t>(n + 1), 0.0);
  for (std::size_t i = first; i + 1 < rows.size(); ++i)
    for (int k = 0; k <= n; ++k)
      scale[k] = std::max(scale[k], std::abs((n + 1.0 - k) / (n + 1.0) * rows[i].flux[k]));
  const double top = *std::max_element(scale.begin(), scale.end());
  if (!(top > 0) || !std::isfinite(top)) return inconclusive(id, trace_digest(trace), "flux integrals undefined");
  double worst = 0;
  int worst_k = 0;
  std::size_t samples = 0;
  for (std::size_t i = first; i + 1 < rows.size(); ++i) {
    const double hm = rows[i].t - rows[i - 1].t, hp = rows[i + 1].t - rows[i].t;
    if (!(hm > 0 && hp > 0)) continue;
    ++samples;
    for (int k = 0; k <= n + 1; ++k) {
      const double dW = ((rows[i + 1].W.W(k) - rows[i].W.W(k)) * hm / hp +
                         (rows[i].W.W(k) - rows[i - 1].W.W(k)) * hp / hm) / (hm + hp);
      const double pred = k <= n ? (n + 1.0 - k) / (n + 1.0) * rows[i].flux[k] : 0.0;
      const double s = k <= n && scale[k] > 0 ? scale[k] : top;
      const double mis = std::abs(dW - pred) / s;
      if (!(mis <= worst)) {
        worst = mis;
        worst_k = k;
      }
    }
  }
  if (samples == 0) return inconclusive(id, trace_digest(trace), "no interior rows with distinct times");
  return equality(id, trace_digest(trace), worst, 0.0, kVariationalTolerance,
                  "max relative mismatch over " + std::to_string(samples) + " rows after t = " + std::to_string(t_skip) +
                      ", worst at k=" +
                      std::to_string(worst_k) + "; k = n+1 compares against zero");
}

std::vector<CheckReport> check_pointwise_lemmas(const geometry::GeometryFields& fields) {
  std::vector<CheckReport> out;
  const int n = fields.n;
  const auto W = quermass::assemble_W(fields);
  const auto rep = geometry::convexity_report(fields);
  const std::string dig = digest(W);
  const bool strict = rep.htilde_max.has_value();
  const bool free_boundary = is_free_boundary(fields.theta);
  const double tol = 1e-8;
  const std::string unmet = !free_boundary ? "needs theta = pi/2" : "needs a strictly convex input";

  auto add = [&](CheckReport r) { out.push_back(std::move(r)); };
  if (free_boundary && strict) {
    add(inequality("lemma.x_dot_nu", dig, 0.0, rep.x_dot_nu_max, tol, "max <x,nu> over the nodes"));
    double div = std::numeric_limits<double>::infinity();
    for (const auto& ng : fields.nodes) {
      const double xn = dot(ng.X, ng.nu);
      const auto e = symfunc::elementary_all(ng.kappa.values());
      for (int k = 1; k <= n; ++k) div = std::min(div, -xn * e[k]);
    }
    add(inequality("lemma.div_Ek", dig, div, 0.0, tol, "min of -<x,nu> E_k over nodes and k"));
    const double scale = std::max(1.0, W.boundary_length());
    add(inequality("lemma.perimeter", dig, W.boundary_length() / n, W.area(), tol * scale,
                   "|boundary|/n > |surface|"));
    for (int k = 2; k <= n; ++k) {
      const double lhs = W.boundary_integrals[k - 1], rhs = n * W.curvature_integrals[k - 1];
      add(inequality("lemma.ineq_int.k" + std::to_string(k), dig, lhs, rhs,
                     tol * std::max({1.0, std::abs(lhs), std::abs(rhs)})));
      add(inequality("lemma.quermass_boundary.k" + std::to_string(k), dig, W.Wsphere[k], (n + 1) * W.W(k),
                     tol * std::max({1.0, std::abs(W.Wsphere[k])})));
    }
    const double bn = symfunc::double_factorial_constants(n).ball_volume;
    add(inequality("lemma.area_upper", dig, bn, W.area(), tol, "|surface| <= b_n"));
    const double delta = std::clamp(rep.height_max, 0.0, 1.0);
    add(inequality("lemma.area_lower", dig, W.area(), bn * std::pow(1 - delta * delta, n / 2.0), tol,
                   "witness: height maximum over the surface"));
  } else {
    for (const char* id : {"lemma.x_dot_nu", "lemma.div_Ek", "lemma.perimeter", "lemma.area_upper", "lemma.area_lower"})
      add(inconclusive(id, dig, unmet));
  }

  double contact = 0, transform = 0, principal = 0;
  for (const auto& b : fields.boundary) {
    contact = std::max(contact, std::abs(b.contact_residual));
    transform = std::max(transform, std::abs(b.transform_residual));
    principal = std::max(principal, std::abs(b.principal_residual));
  }
  add(equality("boundary.contact_angle", dig, contact, 0.0, 1e-6));
  add(equality("boundary.frame_transform", dig, transform, 0.0, 1e-6));
  add(equality("boundary.principal_direction", dig, principal, 0.0, 1e-6));
  return out;
}

std::vector<CheckReport> check_identities() {
  std::vector<CheckReport> out;
  int total = 0, closed_ok = 0, rec_total = 0, rec_ok = 0;
  for (int n = 1; n <= 60; ++n) {
    for (int k = 0; 2 * k + 1 <= n; ++k) {
      ++total;
      if (symfunc::alternating_sum_S(n, k) == symfunc::alternating_sum_closed_form(n, k)) ++closed_ok;
      if (k >= 1) {
        ++rec_total;
        if (symfunc::alternating_sum_S(n, k) ==
            symfunc::alternating_sum_S(n - 2, k - 1) - symfunc::alternating_sum_S(n, k - 1))
          ++rec_ok;
      }
    }
  }
  const std::vector<double> none;
  out.push_back(equality("identities.alternating_sum", digest(none), closed_ok, total, 0.0,
                         "exact rational comparison, n <= 60, 2k+1 <= n"));
  out.push_back(equality("identities.recursion", digest(none), rec_ok, rec_total, 0.0,
                         "S(n,k) = S(n-2,k-1) - S(n,k-1), exact"));
  double worst = 0;
  for (int n = 2; n <= 7; ++n) {
    const auto rec = quermass::geodesic_ball_sphere_quermass(n, std::numbers::pi / 2);
    for (int k = 1; 2 * k - 1 <= n; ++k)
      worst = std::max(worst, std::abs(rec[2 * k - 1] - quermass::equator_odd_closed_form(n, k)));
  }
  out.push_back(equality("identities.equator", digest(none), worst, 0.0, 1e-10,
                         "closed form against the sphere recursion at radius pi/2, n <= 7"));
  return out;
}

std::vector<CheckReport> check_symfunc_properties(std::uint64_t seed, int samples) {
  if (samples < 1) throw DomainError("sample count must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> logk(std::log(1e-2), std::log(10.0));
  std::uniform_int_distribution<int> dim(2, 8);
  long nm = 0, fe = 0, sf = 0, pair = 0, dual = 0;
  for (int s = 0; s < samples; ++s) {
    const int n = dim(rng);
    std::vector<double> raw(static_cast<std::size_t>(n));
    for (auto& x : raw) x = std::exp(logk(rng));
    const symfunc::KappaVector kappa(raw);
    const int k = std::uniform_int_distribution<int>(1, n)(rng);
    const int l = std::uniform_int_distribution<int>(0, k - 1)(rng);
    const symfunc::CurvatureFunctionSpec spec{k, l};
    const auto e = symfunc::elementary_all(kappa.values());
    for (int j = 1; j < n; ++j) {
      const double slack = 1e-12 * e[j] * e[j];
      if (e[j + 1] * e[j - 1] > e[j] * e[j] + slack ||
          e[j + 1] > std::pow(e[j], (j + 1.0) / j) * (1 + 1e-12)) {
        ++nm;
        break;
      }
    }
    const double F = symfunc::curvature_F(kappa, spec);
    if (F > e[1] * (1 + 1e-12)) ++fe;
    const auto g = symfunc::curvature_F_gradient(kappa, spec);
    double sum = 0;
    for (double x : g) sum += x;
    if (sum < 1 - 1e-12) ++sf;
    bool bad = false;
    for (int i = 0; i < n && !bad; ++i)
      for (int j = i + 1; j < n && !bad; ++j)
        bad = (g[i] - g[j]) * (kappa[i] - kappa[j]) > 1e-12 * std::max(1.0, std::abs(kappa[i] - kappa[j]));
    if (bad) ++pair;
    std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
    const double d1 = symfunc::curvature_F_dual(symfunc::KappaVector(ones), spec);
    std::vector<double> scaled(raw);
    for (auto& x : scaled) x *= 3;
    const double d3 = symfunc::curvature_F_dual(symfunc::KappaVector(scaled), spec);
    if (std::abs(d1 - 1) > 1e-12 || std::abs(d3 - 3 * symfunc::curvature_F_dual(kappa, spec)) > 1e-12 * d3) ++dual;
  }
  std::vector<double> in{static_cast<double>(seed), static_cast<double>(samples)};
  const std::string dig = digest(in);
  const std::string note = std::to_string(samples) + " samples, seed " + std::to_string(seed);
  return {equality("symfunc.newton_maclaurin", dig, static_cast<double>(nm), 0.0, 0.0, note),
          equality("symfunc.F_below_E1", dig, static_cast<double>(fe), 0.0, 0.0, note),
          equality("symfunc.gradient_sum", dig, static_cast<double>(sf), 0.0, 0.0, note),
          equality("symfunc.gradient_pairing", dig, static_cast<double>(pair), 0.0, 0.0, note),
          equality("symfunc.dual_normalization", dig, static_cast<double>(dual), 0.0, 0.0, note)};
}

CheckReport check_height_estimate(const geometry::GeometryFields& fields, const quermass::QuermassVector& W) {
  const int n = fields.n;
  const auto rep = geometry::convexity_report(fields);
  const std::string id = "height_estimate";
  if (!rep.htilde_max) return inconclusive(id, digest(W), "needs a strictly convex input");
  double maxF = 0;
  for (const auto& ng : fields.nodes) maxF = std::max(maxF, symfunc::normalized_mean_curvature(ng.kappa, 1));
  const double lambda = -rep.nu_dot_e_max;
  const double c = is_free_boundary(fields.theta) ? 0.0 : std::cos(fields.theta);
  const auto flat = quermass::flat_ball_reference(n, fields.theta);
  const double C = c * flat.Wsphere[0] / (n + 1);
  const double lhs = rep.height_min - c;
  const double rhs = lambda * (std::log(flat.W(1) + C) - std::log(W.W(1) + C)) / (n * maxF);
  return inequality(id, digest(W), lhs, rhs, 1e-8,
                    "F = E_1; Lambda replaced by the measured min(-<nu,e>) = " + std::to_string(lambda) +
                        "; C = cos(theta) W_0^S(flat)/(n+1)");
}

bool all_pass(const std::vector<CheckReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.verdict == Verdict::pass; });
}

std::string reports_json(const std::vector<CheckReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
  for (const auto& r : reports) {
    arr.push_back({{"id", r.id},
                   {"inputs_digest", r.inputs_digest},
                   {"lhs", num(r.lhs)},
                   {"rhs", num(r.rhs)},
                   {"margin", num(r.margin)},
                   {"relative_margin", num(r.relative_margin)},
                   {"tolerance", num(r.tolerance)},
                   {"verdict", to_string(r.verdict)},
                   {"notes", r.notes}});
  }
  return arr.dump(2);
}

std::string summary_table(const std::vector<CheckReport>& reports) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-36s %-13s %14s %12s\n", "check", "verdict", "margin", "tolerance");
  os << line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-36s %-13s %14.6e %12.3e\n", r.id.c_str(), to_string(r.verdict).c_str(),
                  r.margin, r.tolerance);
    os << line;
  }
  return os.str();
}

}  // namespace capflow::verify
