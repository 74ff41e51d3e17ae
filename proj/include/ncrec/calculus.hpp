// Evaluatable fields on the 8-dimensional phase space with exact forward-mode
// derivatives, the Nijenhuis torsion of a (1,1)-tensor field, the Lie
// derivative of (1,1)-tensors, and an independent finite-difference oracle.
//
// Component ordering of a Point8 is fixed once: slots 0..3 are the
// coordinates (q1..q4, or Q1..Q4 in the transformed chart), slots 4..7 the
// momenta (p1..p4 / P1..P4).
//
// Fields are plain structs (or lambdas) whose call operator is templated on
// the scalar, so the same evaluation runs on double, Dual<double> and nested
// Dual<Dual<double>> arguments.  The operations below lift their argument one
// dual level; anything a field does internally (including taking Jacobians of
// sub-maps) nests transparently.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <utility>

#include "ncrec/core.hpp"
#include "ncrec/dual.hpp"
#include "ncrec/linalg.hpp"

namespace ncrec {

template <class S>
using Coords = std::array<S, 8>;

using Point8 = Coords<double>;
using Covector8 = std::array<double, 8>;

using Dual8 = Dual<double, 8>;

template <class F>
concept ScalarFieldLike = requires(const F& f, const Coords<double>& x) {
  { f(x) } -> std::convertible_to<double>;
};

template <class F>
concept VectorFieldLike = requires(const F& f, const Coords<double>& x) {
  { f(x) } -> std::convertible_to<Coords<double>>;
};

template <class F>
concept TensorFieldLike = requires(const F& f, const Coords<double>& x) {
  { f(x) } -> std::convertible_to<SquareMat<double, 8>>;
};

// Rank-3 result of the Nijenhuis torsion, indexed (h, i, j); antisymmetric in
// the last two slots.
struct Rank3 {
  std::array<double, 512> a{};

  double& operator()(std::size_t h, std::size_t i, std::size_t j) {
    return a[(h * 8 + i) * 8 + j];
  }
  double operator()(std::size_t h, std::size_t i, std::size_t j) const {
    return a[(h * 8 + i) * 8 + j];
  }

  double max_abs() const {
    double m = 0.0;
    for (double e : a) m = std::max(m, std::abs(e));
    return m;
  }
};

// Conversions between the structured point types and the flat chart.
inline Point8 to_point8(const PhasePoint& x) {
  return {x.q[0], x.q[1], x.q[2], x.q[3], x.p[0], x.p[1], x.p[2], x.p[3]};
}
inline PhasePoint phase_from_point8(const Point8& x) {
  return {{x[0], x[1], x[2], x[3]}, {x[4], x[5], x[6], x[7]}};
}
inline Point8 to_point8(const CanonicalPoint& y) {
  return {y.Q[0], y.Q[1], y.Q[2], y.Q[3], y.P[0], y.P[1], y.P[2], y.P[3]};
}
inline CanonicalPoint canonical_from_point8(const Point8& x) {
  return {{x[4], x[5], x[6], x[7]}, {x[0], x[1], x[2], x[3]}};
}

// Lifts a point one dual level, seeding unit derivatives in all 8 directions.
template <class S>
Coords<Dual<S, 8>> lift(const Coords<S>& x) {
  Coords<Dual<S, 8>> r;
  for (std::size_t i = 0; i < 8; ++i) {
    r[i].v = x[i];
    r[i].d[i] = S(1.0);
  }
  return r;
}

// -- exact derivatives --------------------------------------------------------

template <ScalarFieldLike F>
std::pair<double, Covector8> eval_with_gradient(const F& f, const Point8& x) {
  const Dual8 r = f(lift(x));
  return {r.v, r.d};
}

// Entry (i, k) is the partial of component i along direction k.
template <VectorFieldLike X>
Mat8 jacobian(const X& field, const Point8& x) {
  const Coords<Dual8> y = field(lift(x));
  Mat8 J;
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t k = 0; k < 8; ++k) J(i, k) = y[i].d[k];
  return J;
}

// N^h_{ij} = T^k_i d_k T^h_j - T^k_j d_k T^h_i + T^h_k d_j T^k_i - T^h_k d_i T^k_j
template <TensorFieldLike TF>
Rank3 nijenhuis(const TF& tensor, const Point8& x) {
  const SquareMat<Dual8, 8> Td = tensor(lift(x));
  Rank3 N;
  for (std::size_t h = 0; h < 8; ++h)
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = i + 1; j < 8; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < 8; ++k) {
          s += Td(k, i).v * Td(h, j).d[k] - Td(k, j).v * Td(h, i).d[k];
          s += Td(h, k).v * (Td(k, i).d[j] - Td(k, j).d[i]);
        }
        N(h, i, j) = s;
        N(h, j, i) = -s;
      }
  return N;
}

// (L_X T)^i_j = X^k d_k T^i_j - T^k_j d_k X^i + T^i_k d_j X^k
template <VectorFieldLike XF, TensorFieldLike TF>
Mat8 lie_derivative_11(const XF& flow_field, const TF& tensor, const Point8& x) {
  const Coords<Dual8> Xd = flow_field(lift(x));
  const SquareMat<Dual8, 8> Td = tensor(lift(x));
  Mat8 L;
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 8; ++k) {
        s += Xd[k].v * Td(i, j).d[k];
        s -= Td(k, j).v * Xd[i].d[k];
        s += Td(i, k).v * Xd[k].d[j];
      }
      L(i, j) = s;
    }
  return L;
}

// -- finite-difference oracle --------------------------------------------------
//
// Central differences with per-direction step h_i = h * max(1, |x_i|); the Lie
// derivative uses a flow-transport difference quotient instead.  These stay
// independent of the exact operations above and exist to catch formula errors.

inline constexpr double kDefaultFdStep = 1e-6;

namespace detail {

inline double fd_step(double h, double xi) { return h * std::max(1.0, std::abs(xi)); }

}  // namespace detail

template <ScalarFieldLike F>
Covector8 fd_gradient(const F& f, const Point8& x, double h = kDefaultFdStep) {
  Covector8 g{};
  for (std::size_t i = 0; i < 8; ++i) {
    const double hi = detail::fd_step(h, x[i]);
    Point8 xp = x, xm = x;
    xp[i] += hi;
    xm[i] -= hi;
    g[i] = (f(xp) - f(xm)) / (2.0 * hi);
  }
  return g;
}

template <VectorFieldLike X>
Mat8 fd_jacobian(const X& field, const Point8& x, double h = kDefaultFdStep) {
  Mat8 J;
  for (std::size_t k = 0; k < 8; ++k) {
    const double hk = detail::fd_step(h, x[k]);
    Point8 xp = x, xm = x;
    xp[k] += hk;
    xm[k] -= hk;
    const Coords<double> fp = field(xp);
    const Coords<double> fm = field(xm);
    for (std::size_t i = 0; i < 8; ++i) J(i, k) = (fp[i] - fm[i]) / (2.0 * hk);
  }
  return J;
}

template <TensorFieldLike TF>
Rank3 fd_nijenhuis(const TF& tensor, const Point8& x, double h = kDefaultFdStep) {
  const Mat8 T0 = tensor(x);
  // D(h_idx, j, k) = d T^h_j / d x^k by central differences.
  std::array<Mat8, 8> dT;
  for (std::size_t k = 0; k < 8; ++k) {
    const double hk = detail::fd_step(h, x[k]);
    Point8 xp = x, xm = x;
    xp[k] += hk;
    xm[k] -= hk;
    const Mat8 Tp = tensor(xp);
    const Mat8 Tm = tensor(xm);
    for (std::size_t r = 0; r < 8; ++r)
      for (std::size_t c = 0; c < 8; ++c) dT[k](r, c) = (Tp(r, c) - Tm(r, c)) / (2.0 * hk);
  }
  Rank3 N;
  for (std::size_t hh = 0; hh < 8; ++hh)
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < 8; ++k) {
          s += T0(k, i) * dT[k](hh, j) - T0(k, j) * dT[k](hh, i);
          s += T0(hh, k) * (dT[j](k, i) - dT[i](k, j));
        }
        N(hh, i, j) = s;
      }
  return N;
}

namespace detail {

// One classical RK4 step of size eps along X, generic over the scalar so the
// transport map can be differentiated in dual arithmetic.
template <class S, class XF>
Coords<S> rk4_step(const XF& field, const Coords<S>& x, double eps) {
  const auto scale_add = [](const Coords<S>& base, const Coords<S>& k, double c) {
    Coords<S> r;
    for (std::size_t i = 0; i < 8; ++i) r[i] = base[i] + k[i] * c;
    return r;
  };
  const Coords<S> k1 = field(x);
  const Coords<S> k2 = field(scale_add(x, k1, eps / 2.0));
  const Coords<S> k3 = field(scale_add(x, k2, eps / 2.0));
  const Coords<S> k4 = field(scale_add(x, k3, eps));
  Coords<S> r;
  for (std::size_t i = 0; i < 8; ++i)
    r[i] = x[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (eps / 6.0);
  return r;
}

// Pullback of the tensor along the eps-flow of X: Dphi^{-1} T(phi(x)) Dphi.
template <class XF, class TF>
Mat8 flow_pullback(const XF& field, const TF& tensor, const Point8& x, double eps) {
  const Coords<Dual8> phi_d = rk4_step(field, lift(x), eps);
  Point8 phi;
  Mat8 Dphi;
  for (std::size_t i = 0; i < 8; ++i) {
    phi[i] = phi_d[i].v;
    for (std::size_t k = 0; k < 8; ++k) Dphi(i, k) = phi_d[i].d[k];
  }
  return inverse(Dphi) * tensor(phi) * Dphi;
}

}  // namespace detail

template <VectorFieldLike XF, TensorFieldLike TF>
Mat8 fd_lie_derivative(const XF& flow_field, const TF& tensor, const Point8& x,
                       double h = kDefaultFdStep) {
  double scale = 1.0;
  for (double xi : x) scale = std::max(scale, std::abs(xi));
  const double eps = h * scale;
  const Mat8 fwd = detail::flow_pullback(flow_field, tensor, x, eps);
  const Mat8 bwd = detail::flow_pullback(flow_field, tensor, x, -eps);
  Mat8 L;
  for (std::size_t i = 0; i < 64; ++i) L.a[i] = (fwd.a[i] - bwd.a[i]) / (2.0 * eps);
  return L;
}

}  // namespace ncrec
