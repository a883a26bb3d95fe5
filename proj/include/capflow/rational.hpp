#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace capflow::symfunc {

// Exact rational, always reduced with positive denominator.
class RationalScalar {
 public:
  RationalScalar() = default;
  RationalScalar(long num) : q_(num) {}
  RationalScalar(long num, long den);
  explicit RationalScalar(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

  std::string numerator() const { return q_.get_num().get_str(); }
  std::string denominator() const { return q_.get_den().get_str(); }
  std::string str() const { return q_.get_str(); }
  double to_double() const { return q_.get_d(); }
  int sign() const { return sgn(q_); }

  friend RationalScalar operator+(const RationalScalar& a, const RationalScalar& b) {
    return RationalScalar(mpq_class(a.q_ + b.q_));
  }
  friend RationalScalar operator-(const RationalScalar& a, const RationalScalar& b) {
    return RationalScalar(mpq_class(a.q_ - b.q_));
  }
  friend RationalScalar operator*(const RationalScalar& a, const RationalScalar& b) {
    return RationalScalar(mpq_class(a.q_ * b.q_));
  }
  friend RationalScalar operator/(const RationalScalar& a, const RationalScalar& b);
  RationalScalar operator-() const { return RationalScalar(mpq_class(-q_)); }

  friend bool operator==(const RationalScalar& a, const RationalScalar& b) { return a.q_ == b.q_; }
  friend bool operator<(const RationalScalar& a, const RationalScalar& b) { return a.q_ < b.q_; }

 private:
  mpq_class q_{0};
};

}  // namespace capflow::symfunc
