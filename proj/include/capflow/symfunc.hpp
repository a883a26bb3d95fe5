#pragma once

#include <span>
#include <vector>

#include "capflow/rational.hpp"

namespace capflow::symfunc {

// Relative tolerance for strict positivity of curvature data.
inline constexpr double kConeTolerance = 1e-12;

class KappaVector {
 public:
  KappaVector() = default;
  explicit KappaVector(std::vector<double> values);

  int n() const { return static_cast<int>(v_.size()); }
  const std::vector<double>& values() const { return v_; }
  double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
  double min() const { return v_.front(); }
  double max() const { return v_.back(); }
  double tolerance() const;
  bool in_positive_cone() const { return positive_; }

 private:
  std::vector<double> v_;
  bool positive_ = false;
};

// F = (E_k / E_l)^{1/(k-l)}.
struct CurvatureFunctionSpec {
  int k = 1;
  int l = 0;

  void validate(int n) const;
  bool is_mean() const { return k == 1 && l == 0; }
};

double binomial(int n, int k);

// Normalized elementary symmetric function of arbitrary data.
double elementary(std::span<const double> kappa, int k);
// E_0 ... E_n in one pass.
std::vector<double> elementary_all(std::span<const double> kappa);

double normalized_mean_curvature(const KappaVector& kappa, int k);

bool in_cone_of(const KappaVector& kappa, const CurvatureFunctionSpec& spec);
double curvature_F(const KappaVector& kappa, const CurvatureFunctionSpec& spec);
std::vector<double> curvature_F_gradient(const KappaVector& kappa, const CurvatureFunctionSpec& spec);
// Inverse-concave dual F_*(k) = 1 / F(1/k).
double curvature_F_dual(const KappaVector& kappa, const CurvatureFunctionSpec& spec);

// Raw partials dE_k/dkappa_i for unsorted data.
std::vector<double> elementary_gradient(std::span<const double> kappa, int k);

struct FactorialConstants {
  double double_factorial = 1;  // n!!
  double sphere_area = 0;       // omega_{n-1}, area of unit S^{n-1}
  double ball_volume = 0;       // b_n
};

double double_factorial(int n);
// Area of the unit m-sphere in R^{m+1}.
double sphere_area(int m);
FactorialConstants double_factorial_constants(int n);

RationalScalar alternating_sum_S(int n, int k);
RationalScalar alternating_sum_closed_form(int n, int k);

double af_rhs_A(int n, int k, double W1);

}  // namespace capflow::symfunc
