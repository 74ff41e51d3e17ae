// Fixed-size dense matrices over an arbitrary scalar (double or Dual).
// Everything here is sized for the 8-dimensional phase space; no heap, no
// expression templates, just loops.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <utility>

#include "ncrec/dual.hpp"
#include "ncrec/errors.hpp"

namespace ncrec {

template <class T, std::size_t N>
struct SquareMat {
  std::array<T, N * N> a{};

  T& operator()(std::size_t r, std::size_t c) { return a[r * N + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return a[r * N + c]; }

  static SquareMat identity() {
    SquareMat m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = T(1.0);
    return m;
  }
};

using Mat4 = SquareMat<double, 4>;
using Mat8 = SquareMat<double, 8>;

template <class T, std::size_t N>
SquareMat<T, N> operator*(const SquareMat<T, N>& x, const SquareMat<T, N>& y) {
  SquareMat<T, N> r;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t k = 0; k < N; ++k) {
      const T& xik = x(i, k);
      for (std::size_t j = 0; j < N; ++j) r(i, j) += xik * y(k, j);
    }
  return r;
}

template <class T, std::size_t N>
SquareMat<T, N> operator+(const SquareMat<T, N>& x, const SquareMat<T, N>& y) {
  SquareMat<T, N> r;
  for (std::size_t i = 0; i < N * N; ++i) r.a[i] = x.a[i] + y.a[i];
  return r;
}

template <class T, std::size_t N>
SquareMat<T, N> operator-(const SquareMat<T, N>& x, const SquareMat<T, N>& y) {
  SquareMat<T, N> r;
  for (std::size_t i = 0; i < N * N; ++i) r.a[i] = x.a[i] - y.a[i];
  return r;
}

template <class T, std::size_t N>
SquareMat<T, N> operator*(const SquareMat<T, N>& x, double c) {
  SquareMat<T, N> r;
  for (std::size_t i = 0; i < N * N; ++i) r.a[i] = x.a[i] * c;
  return r;
}

template <class T, std::size_t N>
SquareMat<T, N> transpose(const SquareMat<T, N>& x) {
  SquareMat<T, N> r;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) r(i, j) = x(j, i);
  return r;
}

template <class T, std::size_t N>
T trace(const SquareMat<T, N>& x) {
  T s{};
  for (std::size_t i = 0; i < N; ++i) s += x(i, i);
  return s;
}

template <std::size_t N>
double max_abs(const SquareMat<double, N>& x) {
  double m = 0.0;
  for (const double& e : x.a) m = std::max(m, std::abs(e));
  return m;
}

template <std::size_t N>
double max_abs_diff(const SquareMat<double, N>& x, const SquareMat<double, N>& y) {
  double m = 0.0;
  for (std::size_t i = 0; i < N * N; ++i) m = std::max(m, std::abs(x.a[i] - y.a[i]));
  return m;
}

// Gauss-Jordan inverse with partial pivoting on leaf magnitude, generic over
// the scalar so dual-valued Jacobians invert with their derivatives intact.
template <class T, std::size_t N>
SquareMat<T, N> inverse(const SquareMat<T, N>& m) {
  SquareMat<T, N> a = m;
  SquareMat<T, N> inv = SquareMat<T, N>::identity();
  double scale = 0.0;
  for (const T& e : a.a) scale = std::max(scale, std::abs(leaf(e)));
  const double pivot_floor = 1e-13 * std::max(scale, 1e-30);

  for (std::size_t col = 0; col < N; ++col) {
    std::size_t piv = col;
    double best = std::abs(leaf(a(col, col)));
    for (std::size_t r = col + 1; r < N; ++r) {
      const double cand = std::abs(leaf(a(r, col)));
      if (cand > best) {
        best = cand;
        piv = r;
      }
    }
    if (best < pivot_floor)
      throw Error(ErrorKind::SingularJacobian, "matrix numerically singular");
    if (piv != col) {
      for (std::size_t j = 0; j < N; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    }
    const T p = a(col, col);
    for (std::size_t j = 0; j < N; ++j) {
      a(col, j) = a(col, j) / p;
      inv(col, j) = inv(col, j) / p;
    }
    for (std::size_t r = 0; r < N; ++r) {
      if (r == col) continue;
      const T f = a(r, col);
      if (leaf(f) == 0.0 && std::is_same_v<T, double>) continue;
      for (std::size_t j = 0; j < N; ++j) {
        a(r, j) = a(r, j) - f * a(col, j);
        inv(r, j) = inv(r, j) - f * inv(col, j);
      }
    }
  }
  return inv;
}

}  // namespace ncrec
