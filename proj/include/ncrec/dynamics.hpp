// Free-particle dynamics on the deformed Minkowski phase space: the
// Hamiltonian and its differential, the theta-weighted symplectic matrix, the
// deformed and standard Poisson brackets, the Hamiltonian vector field, and
// the bracket check of the shifted (primed) coordinate functions.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "ncrec/calculus.hpp"
#include "ncrec/core.hpp"
#include "ncrec/dual.hpp"
#include "ncrec/errors.hpp"
#include "ncrec/linalg.hpp"

namespace ncrec {

// Momentum shifted by the deformation, p_k + (1/2) sum_j lambda_{kj} q_j.
// This one expression plays two roles: it is both the dp_k coefficient of the
// Hamiltonian differential and the d/dq_k coefficient of the flow.
// (k is 0-based; k = 0 reduces to p1 because the first lambda row vanishes.)
template <class S>
S shifted_momentum(const DeformationParams& params, const Coords<S>& x, std::size_t k) {
  S s = x[4 + k];
  for (std::size_t j = 1; j < 4; ++j) {
    const double lkj = params.lambda(k, j);
    if (lkj != 0.0) s += x[j] * (0.5 * lkj);
  }
  return s;
}

// Alias used where the expression appears as a flow coefficient.
template <class S>
S flow_momentum_coefficient(const DeformationParams& params, const Coords<S>& x, std::size_t i) {
  return shifted_momentum(params, x, i);
}

struct HamiltonianField {
  DeformationParams params;

  // H = (1/2) [ -p1^2 + sum_{k=2..4} (p_k + (1/2) sum_j lambda_{kj} q_j)^2 ]
  template <class S>
  S operator()(const Coords<S>& x) const {
    S s = -(x[4] * x[4]);
    for (std::size_t k = 1; k < 4; ++k) {
      const S w = shifted_momentum(params, x, k);
      s += w * w;
    }
    return s * 0.5;
  }
};

inline HamiltonianField hamiltonian(const DeformationParams& params) { return {params}; }

// Closed-form exterior derivative of the Hamiltonian; agrees with the forward
// -mode gradient of HamiltonianField to rounding.
inline Covector8 differential_hamiltonian(const DeformationParams& params, const Point8& x) {
  Covector8 d{};
  std::array<double, 4> w{};
  for (std::size_t k = 0; k < 4; ++k) w[k] = shifted_momentum(params, x, k);
  for (std::size_t k = 1; k < 4; ++k) {
    double s = 0.0;
    for (std::size_t i = 1; i < 4; ++i) s += params.lambda(i, k) * w[i];
    d[k] = 0.5 * s;
  }
  d[4] = -x[4];
  for (std::size_t k = 1; k < 4; ++k) d[4 + k] = w[k];
  return d;
}

// Constant matrix of the symplectic form sum_nu theta_nu dp_nu ^ dq_nu in the
// (q, p) chart: Omega(u, v) = sum_nu theta_nu (u_{p_nu} v_{q_nu} - u_{q_nu} v_{p_nu}).
inline Mat8 symplectic_matrix(const ThetaVector& th) {
  for (double t : th.theta)
    if (std::abs(t) < kThetaMin)
      throw Error(ErrorKind::DegenerateTheta, "symplectic form singular");
  Mat8 omega;
  for (std::size_t nu = 0; nu < 4; ++nu) {
    omega(4 + nu, nu) = th.theta[nu];
    omega(nu, 4 + nu) = -th.theta[nu];
  }
  return omega;
}

// Deformed bracket: {f, g} = sum_nu theta_nu^{-1} (df/dp_nu dg/dq_nu - df/dq_nu dg/dp_nu).
template <ScalarFieldLike F, ScalarFieldLike G>
double poisson_nc(const F& f, const G& g, const ThetaVector& th, const Point8& x) {
  const auto [fv, df] = eval_with_gradient(f, x);
  const auto [gv, dg] = eval_with_gradient(g, x);
  (void)fv;
  (void)gv;
  double s = 0.0;
  for (std::size_t nu = 0; nu < 4; ++nu)
    s += (df[4 + nu] * dg[nu] - df[nu] * dg[4 + nu]) / th.theta[nu];
  return s;
}

// Undeformed bracket in the {q_i, p_j} = delta_ij convention, used to verify
// the shifted coordinate functions.
template <ScalarFieldLike F, ScalarFieldLike G>
double poisson_standard(const F& f, const G& g, const Point8& x) {
  const auto [fv, df] = eval_with_gradient(f, x);
  const auto [gv, dg] = eval_with_gradient(g, x);
  (void)fv;
  (void)gv;
  double s = 0.0;
  for (std::size_t nu = 0; nu < 4; ++nu)
    s += df[nu] * dg[4 + nu] - df[4 + nu] * dg[nu];
  return s;
}

// The geodesic flow field. Satisfies Omega(X, .) = -dH at every point, and
// equals {H, .} under the deformed bracket.
struct HamiltonianVectorField {
  DeformationParams params;
  ThetaVector th;

  template <class S>
  Coords<S> operator()(const Coords<S>& x) const {
    Coords<S> v{};
    v[0] = -x[4];
    for (std::size_t k = 1; k < 4; ++k) {
      v[k] = shifted_momentum(params, x, k) / th.theta[k];
      S s{};
      bool any = false;
      for (std::size_t i = 1; i < 4; ++i) {
        const double lik = params.lambda(i, k);
        if (lik != 0.0) {
          s += flow_momentum_coefficient(params, x, i) * lik;
          any = true;
        }
      }
      if (any) v[4 + k] = s * (-0.5 / th.theta[k]);
    }
    return v;
  }
};

inline HamiltonianVectorField hamiltonian_vector_field(const DeformationParams& params) {
  return {params, theta(params)};
}

// -- primed coordinate functions ----------------------------------------------

// q'_i = q_i - (1/2) sum_j alpha_{ij} p_j as a linear scalar field.
struct PrimedCoordinateField {
  DeformationParams params;
  std::size_t i;

  template <class S>
  S operator()(const Coords<S>& x) const {
    S s = x[i];
    for (std::size_t j = 0; j < 4; ++j) {
      const double aij = params.alpha(i, j);
      if (aij != 0.0) s += x[4 + j] * (-0.5 * aij);
    }
    return s;
  }
};

// p'_i = p_i + (1/2) sum_j lambda_{ij} q_j.
struct PrimedMomentumField {
  DeformationParams params;
  std::size_t i;

  template <class S>
  S operator()(const Coords<S>& x) const {
    S s = x[4 + i];
    for (std::size_t j = 0; j < 4; ++j) {
      const double lij = params.lambda(i, j);
      if (lij != 0.0) s += x[j] * (0.5 * lij);
    }
    return s;
  }
};

struct PrimedRelationsResiduals {
  double qq = 0.0;       // |{q'_i, q'_j} - alpha_ij|
  double qp = 0.0;       // |{q'_i, p'_j} - (delta_ij + gamma_ij)|
  double pp = 0.0;       // |{p'_i, p'_j} - lambda_ij|
  double antisym = 0.0;  // |{p'_i, q'_j} + {q'_j, p'_i}|

  double max() const { return std::max(std::max(qq, qp), std::max(pp, antisym)); }
};

// Evaluates all 48 bracket pairs of the shifted coordinate functions at x with
// the standard bracket and reports residuals against the closed forms.
inline PrimedRelationsResiduals verify_primed_relations(const DeformationParams& params,
                                                        const Point8& x) {
  PrimedRelationsResiduals r;
  for (std::size_t i = 0; i < 4; ++i) {
    const PrimedCoordinateField qi{params, i};
    const PrimedMomentumField pi{params, i};
    for (std::size_t j = 0; j < 4; ++j) {
      const PrimedCoordinateField qj{params, j};
      const PrimedMomentumField pj{params, j};
      const double qq = poisson_standard(qi, qj, x);
      const double qp = poisson_standard(qi, pj, x);
      const double pp = poisson_standard(pi, pj, x);
      const double pq = poisson_standard(pi, qj, x);
      const double delta = (i == j) ? 1.0 : 0.0;
      r.qq = std::max(r.qq, std::abs(qq - params.alpha(i, j)));
      r.qp = std::max(r.qp, std::abs(qp - (delta + params.gamma(i, j))));
      r.pp = std::max(r.pp, std::abs(pp - params.lambda(i, j)));
      r.antisym = std::max(r.antisym, std::abs(pq + poisson_standard(qj, pi, x)));
    }
  }
  return r;
}

}  // namespace ncrec
