#pragma once

#include <array>
#include <cmath>
#include <utility>

namespace capflow {

// Second-order forward-mode jet in N variables: value, gradient, packed Hessian.
template <int N>
struct Jet {
  static constexpr int kH = N * (N + 1) / 2;
  static constexpr int idx(int i, int j) {
    if (i > j) std::swap(i, j);
    return i * N - i * (i - 1) / 2 + (j - i);
  }

  double v = 0;
  std::array<double, N> d{};
  std::array<double, kH> h{};

  Jet() = default;
  Jet(double value) : v(value) {}

  static Jet variable(double value, int i) {
    Jet j(value);
    j.d[i] = 1.0;
    return j;
  }

  double dd(int i, int j) const { return h[idx(i, j)]; }

  Jet& operator+=(const Jet& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    for (int i = 0; i < kH; ++i) h[i] += o.h[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    for (int i = 0; i < kH; ++i) h[i] -= o.h[i];
    return *this;
  }
  Jet& operator*=(double s) {
    v *= s;
    for (auto& x : d) x *= s;
    for (auto& x : h) x *= s;
    return *this;
  }
  Jet operator-() const {
    Jet r = *this;
    r *= -1.0;
    return r;
  }
};

template <int N>
Jet<N> operator+(Jet<N> a, const Jet<N>& b) { return a += b; }
template <int N>
Jet<N> operator-(Jet<N> a, const Jet<N>& b) { return a -= b; }
template <int N>
Jet<N> operator+(Jet<N> a, double s) { a.v += s; return a; }
template <int N>
Jet<N> operator+(double s, Jet<N> a) { a.v += s; return a; }
template <int N>
Jet<N> operator-(Jet<N> a, double s) { a.v -= s; return a; }
template <int N>
Jet<N> operator-(double s, const Jet<N>& a) { return -a + s; }
template <int N>
Jet<N> operator*(Jet<N> a, double s) { return a *= s; }
template <int N>
Jet<N> operator*(double s, Jet<N> a) { return a *= s; }

template <int N>
Jet<N> operator*(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> r;
  r.v = a.v * b.v;
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) {
      const int k = Jet<N>::idx(i, j);
      r.h[k] = a.h[k] * b.v + a.v * b.h[k] + a.d[i] * b.d[j] + a.d[j] * b.d[i];
    }
  return r;
}

// Chain rule for a scalar function with value f0 and derivatives f1, f2 at a.v.
template <int N>
Jet<N> chain(const Jet<N>& a, double f0, double f1, double f2) {
  Jet<N> r;
  r.v = f0;
  for (int i = 0; i < N; ++i) r.d[i] = f1 * a.d[i];
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) {
      const int k = Jet<N>::idx(i, j);
      r.h[k] = f1 * a.h[k] + f2 * a.d[i] * a.d[j];
    }
  return r;
}

template <int N>
Jet<N> inv(const Jet<N>& a) {
  const double r = 1.0 / a.v;
  return chain(a, r, -r * r, 2.0 * r * r * r);
}

template <int N>
Jet<N> operator/(const Jet<N>& a, const Jet<N>& b) { return a * inv(b); }
template <int N>
Jet<N> operator/(Jet<N> a, double s) { return a *= 1.0 / s; }
template <int N>
Jet<N> operator/(double s, const Jet<N>& a) { return inv(a) * s; }

template <int N>
Jet<N> sqrt(const Jet<N>& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}
template <int N>
Jet<N> exp(const Jet<N>& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}
template <int N>
Jet<N> log(const Jet<N>& a) {
  return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
}
template <int N>
Jet<N> sin(const Jet<N>& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return chain(a, s, c, -s);
}
template <int N>
Jet<N> cos(const Jet<N>& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return chain(a, c, -s, -c);
}

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Jet<N>& j) { return j.v; }

}  // namespace capflow
