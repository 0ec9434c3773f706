#pragma once

// Truncated Taylor arithmetic in one variable. A Jet<N> holds the normalized
// coefficients c[k] = f^(k)(t0) / k! of a function around a point.

#include <array>
#include <cmath>
#include <cstddef>

namespace cuspwave {

template <std::size_t N>
struct Jet {
  std::array<double, N + 1> c{};

  Jet() = default;
  Jet(double v) { c[0] = v; }  // NOLINT: implicit promotion of constants is intended

  static Jet variable(double v) {
    Jet j(v);
    if constexpr (N >= 1) j.c[1] = 1.0;
    return j;
  }

  // Build from plain derivatives f, f', f'', ...
  template <std::size_t M>
  static Jet from_derivatives(const std::array<double, M>& d) {
    Jet j;
    double fact = 1.0;
    for (std::size_t k = 0; k <= N && k < M; ++k) {
      if (k > 0) fact *= static_cast<double>(k);
      j.c[k] = d[k] / fact;
    }
    return j;
  }

  double value() const { return c[0]; }

  // k-th derivative.
  double derivative(std::size_t k) const {
    double fact = 1.0;
    for (std::size_t i = 2; i <= k; ++i) fact *= static_cast<double>(i);
    return c[k] * fact;
  }

  Jet& operator+=(const Jet& o) {
    for (std::size_t k = 0; k <= N; ++k) c[k] += o.c[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (std::size_t k = 0; k <= N; ++k) c[k] -= o.c[k];
    return *this;
  }
  Jet& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }
};

template <std::size_t N>
Jet<N> operator-(Jet<N> a) {
  for (auto& v : a.c) v = -v;
  return a;
}

template <std::size_t N>
Jet<N> operator+(Jet<N> a, const Jet<N>& b) { return a += b; }
template <std::size_t N>
Jet<N> operator-(Jet<N> a, const Jet<N>& b) { return a -= b; }
template <std::size_t N>
Jet<N> operator+(Jet<N> a, double b) { a.c[0] += b; return a; }
template <std::size_t N>
Jet<N> operator+(double b, Jet<N> a) { a.c[0] += b; return a; }
template <std::size_t N>
Jet<N> operator-(Jet<N> a, double b) { a.c[0] -= b; return a; }
template <std::size_t N>
Jet<N> operator-(double b, const Jet<N>& a) { return -a + b; }
template <std::size_t N>
Jet<N> operator*(Jet<N> a, double s) { return a *= s; }
template <std::size_t N>
Jet<N> operator*(double s, Jet<N> a) { return a *= s; }

template <std::size_t N>
Jet<N> operator*(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> r;
  for (std::size_t k = 0; k <= N; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i <= k; ++i) s += a.c[i] * b.c[k - i];
    r.c[k] = s;
  }
  return r;
}

template <std::size_t N>
Jet<N> operator/(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> r;
  for (std::size_t k = 0; k <= N; ++k) {
    double s = a.c[k];
    for (std::size_t i = 1; i <= k; ++i) s -= b.c[i] * r.c[k - i];
    r.c[k] = s / b.c[0];
  }
  return r;
}

template <std::size_t N>
Jet<N> operator/(const Jet<N>& a, double s) { return a * (1.0 / s); }

template <std::size_t N>
Jet<N> operator/(double s, const Jet<N>& b) { return Jet<N>(s) / b; }

template <std::size_t N>
Jet<N> exp(const Jet<N>& a) {
  Jet<N> r;
  r.c[0] = std::exp(a.c[0]);
  for (std::size_t k = 1; k <= N; ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * a.c[j] * r.c[k - j];
    r.c[k] = s / static_cast<double>(k);
  }
  return r;
}

template <std::size_t N>
Jet<N> sqrt(const Jet<N>& a) {
  Jet<N> r;
  r.c[0] = std::sqrt(a.c[0]);
  for (std::size_t k = 1; k <= N; ++k) {
    double s = a.c[k];
    for (std::size_t j = 1; j < k; ++j) s -= r.c[j] * r.c[k - j];
    r.c[k] = s / (2.0 * r.c[0]);
  }
  return r;
}

// Plain-double overloads so templated formulas work for both scalars and jets.
inline double value_of(double v) { return v; }
template <std::size_t N>
double value_of(const Jet<N>& j) { return j.c[0]; }

}  // namespace cuspwave
