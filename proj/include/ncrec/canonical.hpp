// The canonical transformation between the original chart (q, p) and the
// action-energy chart (P, Q), together with the separable Hamilton-Jacobi
// momentum and the generating function that induces the transform.
//
// Forward map: P1 = q1/p1, P_k = -p_k q1/p1 - q_k, Q1 = H(x), Q_k = p_k.
// The inverse recovers q_k and p_k first and then solves H = Q1 for p1, which
// makes it the exact two-sided inverse of the forward map for every
// deformation (the naive flat radicand sum Q_k^2 - 2 Q1 is recovered when
// lambda = 0, where the shifted momenta coincide with p_k).
#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "ncrec/calculus.hpp"
#include "ncrec/core.hpp"
#include "ncrec/dual.hpp"
#include "ncrec/dynamics.hpp"
#include "ncrec/errors.hpp"

namespace ncrec {

// Separated Hamilton-Jacobi momentum: the positive root
//   a1 = sqrt( sum_k (a_k + (1/2) sum_j lambda_{kj} q_j)^2 - 2 E ).
// Only the future branch is implemented; a non-positive radicand is a domain
// error, never a silent branch switch.
inline double hj_momentum(const std::array<double, 3>& a, const std::array<double, 4>& q,
                          double energy, const DeformationParams& params) {
  double radicand = -2.0 * energy;
  for (std::size_t k = 1; k < 4; ++k) {
    double w = a[k - 1];
    for (std::size_t j = 1; j < 4; ++j) w += 0.5 * params.lambda(k, j) * q[j];
    radicand += w * w;
  }
  if (!(radicand > 0.0))
    throw Error(ErrorKind::DomainError, "hj_momentum radicand non-positive");
  return std::sqrt(radicand);
}

// Generating function W(q, Q); the first four slots of the argument are q,
// the last four are Q, so one gradient evaluation yields both p = dW/dq and
// P = -dW/dQ.
struct GeneratingFunctionField {
  DeformationParams params;

  template <class S>
  S operator()(const Coords<S>& x) const {
    S radicand = x[4 + 1] * x[4 + 1] + x[4 + 2] * x[4 + 2] + x[4 + 3] * x[4 + 3] - 2.0 * x[4];
    S w = checked_sqrt(radicand) * x[0];
    for (std::size_t k = 1; k < 4; ++k) {
      S coeff = x[4 + k];
      for (std::size_t j = 1; j < 4; ++j) {
        const double lkj = params.lambda(k, j);
        if (lkj != 0.0) coeff += x[j] * (-0.5 * lkj);
      }
      w += coeff * x[k];
    }
    return w;
  }
};

inline double generating_function(const std::array<double, 4>& q, const std::array<double, 4>& Q,
                                  const DeformationParams& params) {
  Coords<double> x{q[0], q[1], q[2], q[3], Q[0], Q[1], Q[2], Q[3]};
  return GeneratingFunctionField{params}(x);
}

// Forward transform on flat chart coordinates, generic over the scalar so the
// pullback construction can differentiate through it.  Output ordering is
// (Q1..Q4, P1..P4).
template <class S>
Coords<S> to_canonical_coords(const Coords<S>& x, const DeformationParams& params) {
  if (!(leaf(x[4]) > 0.0))
    throw Error(ErrorKind::NonpositiveP1, "canonical transform requires p1 > 0");
  Coords<S> y{};
  y[0] = HamiltonianField{params}(x);
  for (std::size_t k = 1; k < 4; ++k) y[k] = x[4 + k];
  const S ratio = x[0] / x[4];  // q1 / p1
  y[4] = ratio;
  for (std::size_t k = 1; k < 4; ++k) y[4 + k] = -(x[4 + k] * ratio) - x[k];
  return y;
}

inline CanonicalPoint to_canonical(const PhasePoint& x, const DeformationParams& params) {
  return canonical_from_point8(to_canonical_coords(to_point8(x), params));
}

// Inverse transform.  q_k and p_k come straight from (P, Q); p1 is the
// positive root of H(q, p) = Q1, i.e. the radicand uses the shifted momenta
// rebuilt from the recovered spatial coordinates.
template <class S>
Coords<S> from_canonical_coords(const Coords<S>& y, const DeformationParams& params) {
  Coords<S> x{};
  for (std::size_t k = 1; k < 4; ++k) {
    x[k] = -y[4 + k] - y[k] * y[4];  // q_k = -P_k - Q_k P1
    x[4 + k] = y[k];                 // p_k = Q_k
  }
  S radicand = -2.0 * y[0];
  for (std::size_t k = 1; k < 4; ++k) {
    const S w = shifted_momentum(params, x, k);
    radicand += w * w;
  }
  x[4] = checked_sqrt(radicand);  // p1
  x[0] = y[4] * x[4];             // q1 = P1 p1
  return x;
}

inline PhasePoint from_canonical(const CanonicalPoint& y, const DeformationParams& params) {
  return phase_from_point8(from_canonical_coords(to_point8(y), params));
}

}  // namespace ncrec
