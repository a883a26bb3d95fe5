#include "capflow/symfunc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "capflow/errors.hpp"

namespace capflow::symfunc {

namespace {

// sigma_0 ... sigma_n by polynomial expansion of prod (1 + kappa_i t).
std::vector<double> sigma_coefficients(std::span<const double> kappa) {
  std::vector<double> c(kappa.size() + 1, 0.0);
  c[0] = 1.0;
  std::size_t deg = 0;
  for (double x : kappa) {
    ++deg;
    for (std::size_t j = deg; j >= 1; --j) c[j] += x * c[j - 1];
  }
  return c;
}

double scale_of(std::span<const double> kappa) {
  double m = 1.0;
  for (double x : kappa) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

RationalScalar::RationalScalar(long num, long den) : q_(num, den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  q_.canonicalize();
}

RationalScalar operator/(const RationalScalar& a, const RationalScalar& b) {
  if (b.q_ == 0) throw DomainError("rational division by zero");
  return RationalScalar(mpq_class(a.q_ / b.q_));
}

KappaVector::KappaVector(std::vector<double> values) : v_(std::move(values)) {
  if (v_.size() < 2) throw DomainError("KappaVector needs n >= 2 entries");
  for (double x : v_)
    if (!std::isfinite(x)) throw DomainError("non-finite principal curvature");
  std::sort(v_.begin(), v_.end());
  positive_ = v_.front() > tolerance();
}

double KappaVector::tolerance() const { return kConeTolerance * scale_of(v_); }

void CurvatureFunctionSpec::validate(int n) const {
  if (!(0 <= l && l < k && k <= n))
    throw DomainError("curvature function needs 0 <= l < k <= n, got k=" + std::to_string(k) +
                      " l=" + std::to_string(l) + " n=" + std::to_string(n));
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

double elementary(std::span<const double> kappa, int k) {
  const int n = static_cast<int>(kappa.size());
  if (k < 0 || k > n) throw DomainError("elementary symmetric index out of range");
  if (k == 0) return 1.0;
  return sigma_coefficients(kappa)[static_cast<std::size_t>(k)] / binomial(n, k);
}

std::vector<double> elementary_all(std::span<const double> kappa) {
  const int n = static_cast<int>(kappa.size());
  auto c = sigma_coefficients(kappa);
  for (int k = 0; k <= n; ++k) c[static_cast<std::size_t>(k)] /= binomial(n, k);
  return c;
}

double normalized_mean_curvature(const KappaVector& kappa, int k) {
  return elementary(kappa.values(), k);
}

std::vector<double> elementary_gradient(std::span<const double> kappa, int k) {
  const int n = static_cast<int>(kappa.size());
  if (k < 0 || k > n) throw DomainError("elementary symmetric index out of range");
  std::vector<double> grad(kappa.size(), 0.0);
  if (k == 0) return grad;
  std::vector<double> rest(kappa.size() - 1);
  for (std::size_t i = 0; i < kappa.size(); ++i) {
    std::size_t m = 0;
    for (std::size_t j = 0; j < kappa.size(); ++j)
      if (j != i) rest[m++] = kappa[j];
    grad[i] = (static_cast<double>(k) / n) * elementary(rest, k - 1);
  }
  return grad;
}

bool in_cone_of(const KappaVector& kappa, const CurvatureFunctionSpec& spec) {
  if (spec.l >= 1 || kappa.in_positive_cone()) return kappa.in_positive_cone();
  const double s = scale_of(kappa.values());
  const auto e = elementary_all(kappa.values());
  for (int j = 1; j <= spec.k; ++j)
    if (!(e[static_cast<std::size_t>(j)] > kConeTolerance * std::pow(s, j))) return false;
  return true;
}

double curvature_F(const KappaVector& kappa, const CurvatureFunctionSpec& spec) {
  spec.validate(kappa.n());
  if (!in_cone_of(kappa, spec)) throw DomainError("curvature data outside the cone of F");
  const double ek = elementary(kappa.values(), spec.k);
  const double el = elementary(kappa.values(), spec.l);
  if (spec.k - spec.l == 1) return ek / el;
  return std::pow(ek / el, 1.0 / (spec.k - spec.l));
}

std::vector<double> curvature_F_gradient(const KappaVector& kappa, const CurvatureFunctionSpec& spec) {
  const double F = curvature_F(kappa, spec);
  const double ek = elementary(kappa.values(), spec.k);
  const double el = elementary(kappa.values(), spec.l);
  auto dk = elementary_gradient(kappa.values(), spec.k);
  auto dl = elementary_gradient(kappa.values(), spec.l);
  std::vector<double> g(dk.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = F / (spec.k - spec.l) * (dk[i] / ek - dl[i] / el);
  return g;
}

double curvature_F_dual(const KappaVector& kappa, const CurvatureFunctionSpec& spec) {
  if (!kappa.in_positive_cone()) throw DomainError("dual curvature function needs positive curvatures");
  std::vector<double> inv(kappa.values().size());
  for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / kappa.values()[i];
  return 1.0 / curvature_F(KappaVector(std::move(inv)), spec);
}

double double_factorial(int n) {
  double r = 1.0;
  for (int i = n; i > 1; i -= 2) r *= i;
  return r;
}

double sphere_area(int m) {
  if (m < 0) throw DomainError("sphere dimension must be nonnegative");
  const double a = 0.5 * (m + 1);
  return 2.0 * std::pow(std::numbers::pi, a) / std::tgamma(a);
}

FactorialConstants double_factorial_constants(int n) {
  if (n < 1) throw DomainError("double_factorial_constants needs n >= 1");
  FactorialConstants c;
  c.double_factorial = double_factorial(n);
  c.sphere_area = sphere_area(n - 1);
  c.ball_volume = c.sphere_area / n;
  return c;
}

namespace {

void check_admissible(int n, int k) {
  if (n < 1 || k < 0) throw DomainError("alternating sum needs n >= 1, k >= 0");
  if (2 * k + 1 > n) throw DomainError("alternating sum has a zero denominator (2k+1 > n)");
}

mpz_class binom_z(unsigned long n, unsigned long k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

}  // namespace

RationalScalar alternating_sum_S(int n, int k) {
  check_admissible(n, k);
  mpq_class s = 0;
  for (int i = 0; i <= k; ++i) {
    mpq_class term(binom_z(static_cast<unsigned long>(k), static_cast<unsigned long>(i)),
                   mpz_class(n - 2 * k + 2 * i));
    term.canonicalize();
    if (i % 2) s -= term;
    else s += term;
  }
  return RationalScalar(s);
}

RationalScalar alternating_sum_closed_form(int n, int k) {
  check_admissible(n, k);
  mpz_class num = 1, den = 1;
  for (int i = 2 * k; i > 1; i -= 2) num *= i;
  for (int j = 0; j <= k; ++j) den *= (n - 2 * j);
  return RationalScalar(mpq_class(num, den));
}

double af_rhs_A(int n, int k, double W1) {
  if (k < 0 || 2 * k + 1 > n) throw DomainError("af_rhs_A needs 0 <= k and 2k+1 <= n");
  if (!(W1 > 0)) throw DomainError("af_rhs_A needs W1 > 0");
  const double omega = sphere_area(n - 1);
  double ratio = 1.0;
  for (int j = 0; j <= k; ++j) ratio *= static_cast<double>(n - 2 * j) / (n + 1 - 2 * j);
  const double x = n * (n + 1) * W1 / omega;
  double sum = 0.0;
  for (int i = 0; i <= k; ++i) {
    const int p = n - 2 * k + 2 * i;
    const double term = binomial(k, i) / p * std::pow(x, static_cast<double>(p) / n);
    sum += (i % 2) ? -term : term;
  }
  return omega / n * ratio * sum;
}

}  // namespace capflow::symfunc
