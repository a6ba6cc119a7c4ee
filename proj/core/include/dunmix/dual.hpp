#pragma once

// Forward-mode dual numbers with a fixed number of tangent directions.
//
// Only the operations the dispersion pipeline needs are provided: the four
// arithmetic operators (dual/dual and dual/scalar) and sqrt.

#include <array>
#include <cmath>
#include <cstddef>

namespace dunmix {

template <std::size_t N>
struct Dual {
  double v = 0.0;
  std::array<double, N> d{};

  constexpr Dual() = default;
  constexpr Dual(double value) : v(value) {}  // NOLINT: implicit constants are intended

  /// Independent variable seeded along tangent direction `slot`.
  static constexpr Dual variable(double value, std::size_t slot) {
    Dual r(value);
    r.d[slot] = 1.0;
    return r;
  }

  constexpr Dual& operator+=(const Dual& o) {
    v += o.v;
    for (std::size_t i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  constexpr Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (std::size_t i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  constexpr Dual& operator*=(const Dual& o) {
    for (std::size_t i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  constexpr Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.v;
    const double q = v * inv;
    for (std::size_t i = 0; i < N; ++i) d[i] = (d[i] - q * o.d[i]) * inv;
    v = q;
    return *this;
  }
};

template <std::size_t N>
constexpr Dual<N> operator+(Dual<N> a, const Dual<N>& b) { return a += b; }
template <std::size_t N>
constexpr Dual<N> operator-(Dual<N> a, const Dual<N>& b) { return a -= b; }
template <std::size_t N>
constexpr Dual<N> operator*(Dual<N> a, const Dual<N>& b) { return a *= b; }
template <std::size_t N>
constexpr Dual<N> operator/(Dual<N> a, const Dual<N>& b) { return a /= b; }

template <std::size_t N>
constexpr Dual<N> operator-(Dual<N> a) {
  a.v = -a.v;
  for (auto& x : a.d) x = -x;
  return a;
}

template <std::size_t N>
constexpr Dual<N> operator*(Dual<N> a, double s) {
  a.v *= s;
  for (auto& x : a.d) x *= s;
  return a;
}
template <std::size_t N>
constexpr Dual<N> operator*(double s, Dual<N> a) { return a * s; }
template <std::size_t N>
constexpr Dual<N> operator+(Dual<N> a, double s) { a.v += s; return a; }
template <std::size_t N>
constexpr Dual<N> operator+(double s, Dual<N> a) { a.v += s; return a; }
template <std::size_t N>
constexpr Dual<N> operator-(Dual<N> a, double s) { a.v -= s; return a; }
template <std::size_t N>
constexpr Dual<N> operator-(double s, const Dual<N>& a) { return -a + s; }
template <std::size_t N>
constexpr Dual<N> operator/(Dual<N> a, double s) { return a * (1.0 / s); }
template <std::size_t N>
constexpr Dual<N> operator/(double s, const Dual<N>& a) { return Dual<N>(s) / a; }

/// sqrt with a zero tangent at the origin (the pipeline floors before reaching it).
template <std::size_t N>
inline Dual<N> sqrt(const Dual<N>& a) {
  Dual<N> r(std::sqrt(a.v));
  const double scale = r.v > 0.0 ? 0.5 / r.v : 0.0;
  for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i] * scale;
  return r;
}

inline double value_of(double x) { return x; }
template <std::size_t N>
inline double value_of(const Dual<N>& x) { return x.v; }

}  // namespace dunmix
