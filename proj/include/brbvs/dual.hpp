// Forward-mode dual numbers with a fixed number of tangent directions.
//
// The likelihood code is written once as templates over a scalar type and is
// instantiated with `double` for plain evaluation and with `Dual<N>` to obtain
// exact first derivatives with respect to the per-unit linear predictors.

#pragma once

#include <array>
#include <cmath>
#include <type_traits>

namespace brbvs::ad {

template <int N>
struct Dual {
  double v = 0.0;
  std::array<double, N> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit lift of constants

  static Dual variable(double value, int direction) {
    Dual x(value);
    x.d[direction] = 1.0;
    return x;
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.v;
    const double q = v * inv;
    for (int i = 0; i < N; ++i) d[i] = (d[i] - q * o.d[i]) * inv;
    v = q;
    return *this;
  }
};

template <class T>
struct is_dual : std::false_type {};
template <int N>
struct is_dual<Dual<N>> : std::true_type {};
template <class T>
inline constexpr bool is_dual_v = is_dual<T>::value;

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Dual<N>& x) {
  return x.v;
}

// f(x) with f'(x) given: the chain rule step shared by every elementary function.
template <int N>
Dual<N> chain(const Dual<N>& x, double fx, double dfx) {
  Dual<N> r(fx);
  for (int i = 0; i < N; ++i) r.d[i] = dfx * x.d[i];
  return r;
}

// f(x, y) with both partials given.
template <int N>
Dual<N> chain2(const Dual<N>& x, const Dual<N>& y, double f, double fx, double fy) {
  Dual<N> r(f);
  for (int i = 0; i < N; ++i) r.d[i] = fx * x.d[i] + fy * y.d[i];
  return r;
}

template <int N>
Dual<N> chain3(const Dual<N>& x, const Dual<N>& y, const Dual<N>& z, double f, double fx,
               double fy, double fz) {
  Dual<N> r(f);
  for (int i = 0; i < N; ++i) r.d[i] = fx * x.d[i] + fy * y.d[i] + fz * z.d[i];
  return r;
}

template <int N>
Dual<N> operator+(Dual<N> a, const Dual<N>& b) {
  return a += b;
}
template <int N>
Dual<N> operator-(Dual<N> a, const Dual<N>& b) {
  return a -= b;
}
template <int N>
Dual<N> operator*(Dual<N> a, const Dual<N>& b) {
  return a *= b;
}
template <int N>
Dual<N> operator/(Dual<N> a, const Dual<N>& b) {
  return a /= b;
}
template <int N>
Dual<N> operator+(Dual<N> a, double b) {
  a.v += b;
  return a;
}
template <int N>
Dual<N> operator+(double a, Dual<N> b) {
  b.v += a;
  return b;
}
template <int N>
Dual<N> operator-(Dual<N> a, double b) {
  a.v -= b;
  return a;
}
template <int N>
Dual<N> operator-(double a, const Dual<N>& b) {
  Dual<N> r(a - b.v);
  for (int i = 0; i < N; ++i) r.d[i] = -b.d[i];
  return r;
}
template <int N>
Dual<N> operator*(Dual<N> a, double b) {
  a.v *= b;
  for (auto& x : a.d) x *= b;
  return a;
}
template <int N>
Dual<N> operator*(double a, Dual<N> b) {
  return b * a;
}
template <int N>
Dual<N> operator/(Dual<N> a, double b) {
  return a * (1.0 / b);
}
template <int N>
Dual<N> operator/(double a, const Dual<N>& b) {
  const double q = a / b.v;
  return chain(b, q, -q / b.v);
}
template <int N>
Dual<N> operator-(const Dual<N>& a) {
  return a * -1.0;
}

template <int N>
bool operator<(const Dual<N>& a, const Dual<N>& b) {
  return a.v < b.v;
}
template <int N>
bool operator>(const Dual<N>& a, const Dual<N>& b) {
  return a.v > b.v;
}
template <int N>
bool operator<(const Dual<N>& a, double b) {
  return a.v < b;
}
template <int N>
bool operator>(const Dual<N>& a, double b) {
  return a.v > b;
}
template <int N>
bool operator<=(const Dual<N>& a, double b) {
  return a.v <= b;
}
template <int N>
bool operator>=(const Dual<N>& a, double b) {
  return a.v >= b;
}

template <int N>
Dual<N> exp(const Dual<N>& x) {
  const double e = std::exp(x.v);
  return chain(x, e, e);
}
template <int N>
Dual<N> log(const Dual<N>& x) {
  return chain(x, std::log(x.v), 1.0 / x.v);
}
template <int N>
Dual<N> log1p(const Dual<N>& x) {
  return chain(x, std::log1p(x.v), 1.0 / (1.0 + x.v));
}
template <int N>
Dual<N> expm1(const Dual<N>& x) {
  return chain(x, std::expm1(x.v), std::exp(x.v));
}
template <int N>
Dual<N> sqrt(const Dual<N>& x) {
  const double s = std::sqrt(x.v);
  return chain(x, s, 0.5 / s);
}
template <int N>
Dual<N> pow(const Dual<N>& x, double a) {
  const double p = std::pow(x.v, a);
  return chain(x, p, a * std::pow(x.v, a - 1.0));
}
template <int N>
Dual<N> pow(const Dual<N>& x, const Dual<N>& a) {
  const double p = std::pow(x.v, a.v);
  return chain2(x, a, p, a.v * std::pow(x.v, a.v - 1.0), p * std::log(x.v));
}
template <int N>
Dual<N> pow(double x, const Dual<N>& a) {
  const double p = std::pow(x, a.v);
  return chain(a, p, p * std::log(x));
}
template <int N>
Dual<N> tanh(const Dual<N>& x) {
  const double t = std::tanh(x.v);
  return chain(x, t, 1.0 - t * t);
}
template <int N>
Dual<N> atanh(const Dual<N>& x) {
  return chain(x, std::atanh(x.v), 1.0 / (1.0 - x.v * x.v));
}
template <int N>
Dual<N> asin(const Dual<N>& x) {
  return chain(x, std::asin(x.v), 1.0 / std::sqrt(1.0 - x.v * x.v));
}
template <int N>
Dual<N> abs(const Dual<N>& x) {
  return x.v < 0.0 ? -x : x;
}

template <int N>
Dual<N> min(const Dual<N>& a, const Dual<N>& b) {
  return b.v < a.v ? b : a;
}
template <int N>
Dual<N> max(const Dual<N>& a, const Dual<N>& b) {
  return a.v < b.v ? b : a;
}

}  // namespace brbvs::ad
