#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capflow/flow.hpp"
#include "capflow/geometry.hpp"
#include "capflow/quermass.hpp"

namespace capflow::verify {

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

// margin >= 0 means the inequality holds; equality checks report -|lhs - rhs|.
struct CheckReport {
  std::string id;
  std::string inputs_digest;
  double lhs = 0;
  double rhs = 0;
  double margin = 0;
  double relative_margin = 0;
  double tolerance = 0;
  Verdict verdict = Verdict::inconclusive;
  std::string notes;
};

// FNV-1a over the raw bytes of the inputs, as 16 hex digits.
std::string digest(std::span<const double> values);
std::string digest(const quermass::QuermassVector& W);

// Inequality lhs >= rhs; pass iff lhs - rhs >= -tolerance.
CheckReport inequality(std::string id, std::string inputs_digest, double lhs, double rhs, double tolerance,
                       std::string notes = {});
// Equality lhs == rhs; pass iff |lhs - rhs| <= tolerance.
CheckReport equality(std::string id, std::string inputs_digest, double lhs, double rhs, double tolerance,
                     std::string notes = {});

inline constexpr double kAfTolerance = 1e-8;

CheckReport check_af_main(const quermass::QuermassVector& W, int n, int k,
                          std::optional<double> kappa_min = std::nullopt, double tolerance = kAfTolerance);
// W_k >= f_k(f_0^{-1}(W_0))
CheckReport check_af_thmC(const quermass::QuermassVector& W, const quermass::CapTable& table, int k,
                          double tolerance);
// W_n >= f_n(f_k^{-1}(W_k))
CheckReport check_af_thmB(const quermass::QuermassVector& W, const quermass::CapTable& table, int k,
                          double tolerance);

inline constexpr double kLimitTolerance = 0.01;
// Limit of W_{2k+1} (k = 0 gives W_1) at the terminal time from the last ten rows.
CheckReport check_limits(const flow::FlowTrace& trace, int k);
CheckReport check_limit_Q(const flow::FlowTrace& trace);
// Linear least-squares fit of y over the final rows evaluated at t.
double extrapolate_linear(std::span<const double> t, std::span<const double> y, double at);

inline constexpr double kVariationalTolerance = 1e-3;
// Fraction of the run duration excluded at the start.
inline constexpr double kVariationalSkipFraction = 0.1;
CheckReport check_variational(const flow::FlowTrace& trace);

std::vector<CheckReport> check_pointwise_lemmas(const geometry::GeometryFields& fields);
std::vector<CheckReport> check_identities();
// Sampled Newton-Maclaurin, F <= E_1, sum F_i >= 1, gradient pairing and dual normalization;
// curvatures log-uniform on [1e-2, 10], dimensions 2..8, random (k, l).
std::vector<CheckReport> check_symfunc_properties(std::uint64_t seed, int samples);
CheckReport check_height_estimate(const geometry::GeometryFields& fields, const quermass::QuermassVector& W);

bool all_pass(const std::vector<CheckReport>& reports);
std::string reports_json(const std::vector<CheckReport>& reports);
std::string summary_table(const std::vector<CheckReport>& reports);

}  // namespace capflow::verify
