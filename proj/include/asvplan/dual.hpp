#pragma once

#include <array>
#include <cmath>

namespace asvplan {

/// Forward-mode dual number carrying a fixed-width derivative vector.
/// Replacing `double` with `Dual<N>` in a computation propagates exact
/// first derivatives with respect to N seed directions in a single pass.
template <int N>
struct Dual {
  double val = 0.0;
  std::array<double, N> der{};

  Dual() = default;
  Dual(double v) : val(v) {}  // NOLINT: implicit lift of constants

  /// Independent variable number k with value v.
  static Dual seed(double v, int k) {
    Dual d(v);
    d.der[k] = 1.0;
    return d;
  }

  Dual& operator+=(const Dual& o) {
    val += o.val;
    for (int i = 0; i < N; ++i) der[i] += o.der[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    val -= o.val;
    for (int i = 0; i < N; ++i) der[i] -= o.der[i];
    return *this;
  }
  Dual& operator*=(double s) {
    val *= s;
    for (int i = 0; i < N; ++i) der[i] *= s;
    return *this;
  }
};

template <int N>
inline Dual<N> operator+(Dual<N> a, const Dual<N>& b) {
  a += b;
  return a;
}
template <int N>
inline Dual<N> operator-(Dual<N> a, const Dual<N>& b) {
  a -= b;
  return a;
}
template <int N>
inline Dual<N> operator-(const Dual<N>& a) {
  Dual<N> r(-a.val);
  for (int i = 0; i < N; ++i) r.der[i] = -a.der[i];
  return r;
}
template <int N>
inline Dual<N> operator*(const Dual<N>& a, const Dual<N>& b) {
  Dual<N> r(a.val * b.val);
  for (int i = 0; i < N; ++i) r.der[i] = a.der[i] * b.val + a.val * b.der[i];
  return r;
}
template <int N>
inline Dual<N> operator/(const Dual<N>& a, const Dual<N>& b) {
  const double inv = 1.0 / b.val;
  Dual<N> r(a.val * inv);
  for (int i = 0; i < N; ++i) r.der[i] = (a.der[i] - r.val * b.der[i]) * inv;
  return r;
}

// Mixed double/Dual arithmetic; keeps constants out of the derivative loop.
template <int N>
inline Dual<N> operator+(Dual<N> a, double s) {
  a.val += s;
  return a;
}
template <int N>
inline Dual<N> operator+(double s, Dual<N> a) {
  a.val += s;
  return a;
}
template <int N>
inline Dual<N> operator-(Dual<N> a, double s) {
  a.val -= s;
  return a;
}
template <int N>
inline Dual<N> operator-(double s, const Dual<N>& a) {
  Dual<N> r(s - a.val);
  for (int i = 0; i < N; ++i) r.der[i] = -a.der[i];
  return r;
}
template <int N>
inline Dual<N> operator*(Dual<N> a, double s) {
  a *= s;
  return a;
}
template <int N>
inline Dual<N> operator*(double s, Dual<N> a) {
  a *= s;
  return a;
}
template <int N>
inline Dual<N> operator/(Dual<N> a, double s) {
  // True division on the value so the value path stays bit-identical to the
  // plain double computation; the reciprocal is fine for the derivatives.
  a.val /= s;
  const double inv = 1.0 / s;
  for (int i = 0; i < N; ++i) a.der[i] *= inv;
  return a;
}
template <int N>
inline Dual<N> operator/(double s, const Dual<N>& b) {
  return Dual<N>(s) / b;
}

template <int N>
inline Dual<N> sin(const Dual<N>& a) {
  Dual<N> r(std::sin(a.val));
  const double c = std::cos(a.val);
  for (int i = 0; i < N; ++i) r.der[i] = c * a.der[i];
  return r;
}
template <int N>
inline Dual<N> cos(const Dual<N>& a) {
  Dual<N> r(std::cos(a.val));
  const double s = -std::sin(a.val);
  for (int i = 0; i < N; ++i) r.der[i] = s * a.der[i];
  return r;
}
template <int N>
inline Dual<N> exp(const Dual<N>& a) {
  const double e = std::exp(a.val);
  Dual<N> r(e);
  for (int i = 0; i < N; ++i) r.der[i] = e * a.der[i];
  return r;
}
template <int N>
inline Dual<N> log(const Dual<N>& a) {
  Dual<N> r(std::log(a.val));
  const double inv = 1.0 / a.val;
  for (int i = 0; i < N; ++i) r.der[i] = inv * a.der[i];
  return r;
}
template <int N>
inline Dual<N> sqrt(const Dual<N>& a) {
  const double s = std::sqrt(a.val);
  Dual<N> r(s);
  const double inv = s > 0.0 ? 0.5 / s : 0.0;
  for (int i = 0; i < N; ++i) r.der[i] = inv * a.der[i];
  return r;
}
/// |a| with subgradient 0 at the kink.
template <int N>
inline Dual<N> abs(const Dual<N>& a) {
  const double sg = a.val > 0.0 ? 1.0 : (a.val < 0.0 ? -1.0 : 0.0);
  Dual<N> r(std::abs(a.val));
  for (int i = 0; i < N; ++i) r.der[i] = sg * a.der[i];
  return r;
}

template <int N>
inline bool isfinite(const Dual<N>& a) {
  if (!std::isfinite(a.val)) return false;
  for (int i = 0; i < N; ++i)
    if (!std::isfinite(a.der[i])) return false;
  return true;
}

// Plain-double overloads so templated numeric code compiles for both
// scalar types without qualification gymnastics.
inline double sin(double a) { return std::sin(a); }
inline double cos(double a) { return std::cos(a); }
inline double exp(double a) { return std::exp(a); }
inline double log(double a) { return std::log(a); }
inline double sqrt(double a) { return std::sqrt(a); }
inline double abs(double a) { return std::abs(a); }
inline bool isfinite(double a) { return std::isfinite(a); }

}  // namespace asvplan
