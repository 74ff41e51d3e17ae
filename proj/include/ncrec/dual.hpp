// Forward-mode dual numbers carrying N simultaneous partial derivatives.
// Dual<T, N> nests (T may itself be a Dual) so second derivatives of any
// expression come out of the same arithmetic.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>

#include "ncrec/errors.hpp"

namespace ncrec {

template <class T, std::size_t N>
struct Dual {
  T v{};
  std::array<T, N> d{};

  Dual() = default;

  template <class U>
    requires std::is_constructible_v<T, U> && (!std::is_same_v<std::remove_cvref_t<U>, Dual>)
  Dual(U&& value) : v(static_cast<T>(value)) {}  // NOLINT: implicit lift of constants

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (std::size_t i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (std::size_t i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
};

// -- leaf access -------------------------------------------------------------

inline double leaf(double x) { return x; }

template <class T, std::size_t N>
double leaf(const Dual<T, N>& x) {
  return leaf(x.v);
}

// -- arithmetic --------------------------------------------------------------

template <class T, std::size_t N>
Dual<T, N> operator+(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r;
  r.v = a.v + b.v;
  for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}

template <class T, std::size_t N>
Dual<T, N> operator-(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r;
  r.v = a.v - b.v;
  for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}

template <class T, std::size_t N>
Dual<T, N> operator-(const Dual<T, N>& a) {
  Dual<T, N> r;
  r.v = -a.v;
  for (std::size_t i = 0; i < N; ++i) r.d[i] = -a.d[i];
  return r;
}

template <class T, std::size_t N>
Dual<T, N> operator*(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r;
  r.v = a.v * b.v;
  for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}

template <class T, std::size_t N>
Dual<T, N> operator/(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r;
  r.v = a.v / b.v;
  for (std::size_t i = 0; i < N; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) / b.v;
  return r;
}

// Mixed ops with plain double (the literal type everywhere in the library).
template <class T, std::size_t N>
Dual<T, N> operator+(const Dual<T, N>& a, double c) {
  Dual<T, N> r = a;
  r.v += static_cast<T>(c);
  return r;
}
template <class T, std::size_t N>
Dual<T, N> operator+(double c, const Dual<T, N>& a) {
  return a + c;
}
template <class T, std::size_t N>
Dual<T, N> operator-(const Dual<T, N>& a, double c) {
  Dual<T, N> r = a;
  r.v -= static_cast<T>(c);
  return r;
}
template <class T, std::size_t N>
Dual<T, N> operator-(double c, const Dual<T, N>& a) {
  Dual<T, N> r = -a;
  r.v += static_cast<T>(c);
  return r;
}
template <class T, std::size_t N>
Dual<T, N> operator*(const Dual<T, N>& a, double c) {
  Dual<T, N> r;
  r.v = a.v * c;
  for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i] * c;
  return r;
}
template <class T, std::size_t N>
Dual<T, N> operator*(double c, const Dual<T, N>& a) {
  return a * c;
}
template <class T, std::size_t N>
Dual<T, N> operator/(const Dual<T, N>& a, double c) {
  Dual<T, N> r;
  r.v = a.v / c;
  for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i] / c;
  return r;
}
template <class T, std::size_t N>
Dual<T, N> operator/(double c, const Dual<T, N>& a) {
  return Dual<T, N>(c) / a;
}

// double * double support for generic code paths.
template <class T, std::size_t N>
Dual<T, N> operator*(const Dual<T, N>& a, const T& c)
  requires(!std::is_same_v<T, double>)
{
  Dual<T, N> r;
  r.v = a.v * c;
  for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i] * c;
  return r;
}

// -- functions ---------------------------------------------------------------

// Square root with an explicit domain guard: radicands must stay strictly
// positive or the derivative blows up.
inline double checked_sqrt(double x) {
  if (!(x > 0.0)) throw Error(ErrorKind::DomainError, "sqrt of non-positive value");
  return std::sqrt(x);
}

template <class T, std::size_t N>
Dual<T, N> checked_sqrt(const Dual<T, N>& x) {
  if (!(leaf(x.v) > 0.0)) throw Error(ErrorKind::DomainError, "sqrt of non-positive value");
  Dual<T, N> r;
  r.v = checked_sqrt(x.v);
  for (std::size_t i = 0; i < N; ++i) r.d[i] = x.d[i] / (2.0 * r.v);
  return r;
}

// Integer power by repeated multiplication; exact for the small exponents used
// for traces and constants of motion.
template <class S>
S pow_int(const S& x, int n) {
  S r(1.0);
  for (int i = 0; i < n; ++i) r = r * x;
  return r;
}

inline double pow_int(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

}  // namespace ncrec
