// The recursion operator of the geodesic flow: the diagonal form in the
// transformed chart, the explicit block-matrix form in the original chart
// (in two variants, see below), the coordinate-change pullback that serves as
// the oracle for both, trace constants of motion, involution residuals, the
// block-structure hypothesis check, and the full verification battery.
//
// Block variants: the tabulated mixed block L carries two anomalous
// prefactors (entry (1,2) has an extra p2/p1, and rows 2..4 of column 1 all
// carry q1*p2/p1^2 where the row pattern gives q1*p_k/p1^2).  The "verbatim"
// evaluator keeps them; the "patterned" evaluator uses the row-consistent
// prefactors and agrees with the pullback construction in the commutative
// limit.  Both are evaluated and compared against the pullback.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ncrec/calculus.hpp"
#include "ncrec/canonical.hpp"
#include "ncrec/core.hpp"
#include "ncrec/dynamics.hpp"
#include "ncrec/errors.hpp"
#include "ncrec/linalg.hpp"
#include "ncrec/report.hpp"

namespace ncrec {

// -- canonical-chart operator --------------------------------------------------

// T = sum_nu Q_nu (d/dP_nu x dP_nu + d/dQ_nu x dQ_nu): in the flat chart the
// matrix is diag(Q1..Q4, Q1..Q4).
struct CanonicalRecursionField {
  template <class S>
  SquareMat<S, 8> operator()(const Coords<S>& x) const {
    SquareMat<S, 8> t;
    for (std::size_t nu = 0; nu < 4; ++nu) {
      t(nu, nu) = x[nu];
      t(4 + nu, 4 + nu) = x[nu];
    }
    return t;
  }
};

inline Mat8 recursion_canonical(const CanonicalPoint& y) {
  return CanonicalRecursionField{}(to_point8(y));
}

// The transformed flow direction -d/dP1 (constant field).
struct CanonicalFlowField {
  template <class S>
  Coords<S> operator()(const Coords<S>& /*x*/) const {
    Coords<S> v{};
    v[4] = S(-1.0);
    return v;
  }
};

// -- original-chart block operator ----------------------------------------------

enum class BlockForm { verbatim, patterned };

// Row placement of the tabulated 4x4 blocks inside the 8x8 operator.  With
// covector_rows the tabulated row index is the covector (matrix column) slot,
// i.e. the assembled operator holds the transpose of each block; this is the
// orientation that matches the pullback construction.
enum class BlockOrientation { covector_rows, vector_rows };

template <class S>
struct RecursionBlocksT {
  SquareMat<S, 4> M;  // dq x dq sector
  SquareMat<S, 4> N;  // dp x dp sector
  SquareMat<S, 4> L;  // dq x dp sector
  SquareMat<S, 4> R;  // dp x dq sector
};

using RecursionBlocks = RecursionBlocksT<double>;

// Momenta closer to zero than this make the block divisions meaningless.
inline constexpr double kMomentumCutoff = 1e-9;

template <class S>
RecursionBlocksT<S> recursion_original_blocks(const Coords<S>& x,
                                              const DeformationParams& params, BlockForm form) {
  const S& p1 = x[4];
  if (std::abs(leaf(p1)) < kMomentumCutoff)
    throw Error(ErrorKind::DivisionByZero, "block operator requires p1 != 0");
  const S& q1 = x[0];
  const S h = HamiltonianField{params}(x);
  const S p1sq = p1 * p1;

  // S_k = -(1/2) sum_i lambda_{ik} Omega_i; the negated dq_k coefficient of dH.
  std::array<S, 4> s{};
  for (std::size_t k = 1; k < 4; ++k) {
    S acc{};
    bool any = false;
    for (std::size_t i = 1; i < 4; ++i) {
      const double lik = params.lambda(i, k);
      if (lik != 0.0) {
        acc += shifted_momentum(params, x, i) * lik;
        any = true;
      }
    }
    if (any) s[k] = acc * (-0.5);
  }

  // V_k = p_k - H - (H / (2 p_k)) sum_j lambda_{kj} q_j.  The division only
  // exists when the lambda sum is nonzero; |p_k| below the cutoff is then a
  // division-by-zero error and such points are excluded from sampling.
  std::array<S, 4> v{};
  for (std::size_t k = 1; k < 4; ++k) {
    S shift{};
    bool any = false;
    for (std::size_t j = 1; j < 4; ++j) {
      const double lkj = params.lambda(k, j);
      if (lkj != 0.0) {
        shift += x[j] * lkj;
        any = true;
      }
    }
    v[k] = x[4 + k] - h;
    if (any) {
      if (std::abs(leaf(x[4 + k])) < kMomentumCutoff)
        throw Error(ErrorKind::DivisionByZero, "V_k requires p_k away from zero");
      v[k] = v[k] - h / (2.0 * x[4 + k]) * shift;
    }
  }

  RecursionBlocksT<S> b;
  b.M(0, 0) = h;
  b.N(0, 0) = h;
  for (std::size_t k = 1; k < 4; ++k) {
    const S& pk = x[4 + k];
    b.M(0, k) = pk / p1 * (pk - h);
    b.M(k, 0) = q1 * h / p1sq * s[k];
    b.M(k, k) = pk;
    b.N(k, 0) = pk / p1 * v[k];
    b.N(k, k) = pk;
    b.R(k, 0) = h / p1 * s[k];
  }
  // Mixed block, first row: the k = 2 entry of the tabulated form carries an
  // extra p2/p1 relative to its row pattern.
  if (form == BlockForm::verbatim) {
    b.L(0, 1) = q1 * x[5] / p1sq * (x[5] / p1 * (h - x[5]));
  } else {
    b.L(0, 1) = q1 / p1 * (x[5] / p1 * (h - x[5]));
  }
  for (std::size_t k = 2; k < 4; ++k) {
    const S& pk = x[4 + k];
    b.L(0, k) = q1 / p1 * (pk / p1 * (h - pk));
  }
  // Mixed block, column 1: the tabulated form repeats the p2 prefactor down
  // the column; the patterned form uses the row's own momentum.
  for (std::size_t k = 1; k < 4; ++k) {
    const S& pref = (form == BlockForm::verbatim) ? x[5] : x[4 + k];
    b.L(k, 0) = q1 * pref / p1sq * v[k];
  }
  return b;
}

template <class S>
SquareMat<S, 8> assemble_blocks(const RecursionBlocksT<S>& b,
                                BlockOrientation orientation = BlockOrientation::covector_rows) {
  SquareMat<S, 8> t;
  const bool swap = orientation == BlockOrientation::covector_rows;
  for (std::size_t nu = 0; nu < 4; ++nu)
    for (std::size_t mu = 0; mu < 4; ++mu) {
      const std::size_t r = swap ? mu : nu;
      const std::size_t c = swap ? nu : mu;
      t(nu, mu) = b.M(r, c);
      t(4 + nu, 4 + mu) = b.N(r, c);
      t(nu, 4 + mu) = b.L(r, c);
      t(4 + nu, mu) = b.R(r, c);
    }
  return t;
}

// The block operator as an evaluatable tensor field (torsion, Lie derivative).
struct BlockRecursionField {
  DeformationParams params;
  BlockForm form = BlockForm::patterned;
  BlockOrientation orientation = BlockOrientation::covector_rows;

  template <class S>
  SquareMat<S, 8> operator()(const Coords<S>& x) const {
    return assemble_blocks(recursion_original_blocks(x, params, form), orientation);
  }
};

inline Mat8 recursion_original_verbatim(const PhasePoint& x, const DeformationParams& params) {
  return assemble_blocks(recursion_original_blocks(to_point8(x), params, BlockForm::verbatim));
}

inline Mat8 recursion_original_patterned(const PhasePoint& x, const DeformationParams& params) {
  return assemble_blocks(recursion_original_blocks(to_point8(x), params, BlockForm::patterned));
}

// -- pullback construction ------------------------------------------------------

// The definitionally correct original-chart operator: J^{-1} T_canonical J
// with J the Jacobian of the forward transform.  Generic over the scalar so
// its own torsion and Lie derivative can be taken.
struct PullbackRecursionField {
  DeformationParams params;

  template <class S>
  SquareMat<S, 8> operator()(const Coords<S>& x) const {
    const Coords<Dual<S, 8>> yd = to_canonical_coords(lift(x), params);
    SquareMat<S, 8> J;
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t k = 0; k < 8; ++k) J(i, k) = yd[i].d[k];
    SquareMat<S, 8> t;
    for (std::size_t nu = 0; nu < 4; ++nu) {
      t(nu, nu) = yd[nu].v;
      t(4 + nu, 4 + nu) = yd[nu].v;
    }
    return inverse(J) * t * J;
  }
};

inline Mat8 recursion_original_pullback(const PhasePoint& x, const DeformationParams& params) {
  return PullbackRecursionField{params}(to_point8(x));
}

// Picks the block orientation with the smaller discrepancy against the
// pullback oracle in the commutative limit.
inline BlockOrientation resolve_block_orientation(std::uint64_t seed, int npoints,
                                                  double* covector_residual = nullptr,
                                                  double* vector_residual = nullptr) {
  const DeformationParams flat{};
  const PullbackRecursionField pull{flat};
  double cov = 0.0, vec = 0.0;
  for (int i = 0; i < npoints; ++i) {
    const Point8 x = to_point8(sample_point(seed, static_cast<std::uint64_t>(i)));
    const Mat8 oracle = pull(x);
    const auto blocks = recursion_original_blocks(x, flat, BlockForm::patterned);
    cov = std::max(cov,
                   max_abs_diff(oracle, assemble_blocks(blocks, BlockOrientation::covector_rows)));
    vec = std::max(vec,
                   max_abs_diff(oracle, assemble_blocks(blocks, BlockOrientation::vector_rows)));
  }
  if (covector_residual) *covector_residual = cov;
  if (vector_residual) *vector_residual = vec;
  return cov <= vec ? BlockOrientation::covector_rows : BlockOrientation::vector_rows;
}

// -- constants of motion ----------------------------------------------------------

struct MotionConstants {
  std::vector<double> c;  // c[l-1] = Tr(T^l)
};

// Closed form 2 H^l + 2 (p2^l + p3^l + p4^l).
inline MotionConstants trace_constants(const Point8& x, const DeformationParams& params,
                                       int lmax) {
  const double h = HamiltonianField{params}(x);
  MotionConstants m;
  m.c.reserve(static_cast<std::size_t>(lmax));
  for (int l = 1; l <= lmax; ++l) {
    double s = 2.0 * pow_int(h, l);
    for (std::size_t k = 1; k < 4; ++k) s += 2.0 * pow_int(x[4 + k], l);
    m.c.push_back(s);
  }
  return m;
}

// Cross-check route: traces of matrix powers of the pullback operator.
inline MotionConstants trace_constants_pullback(const Point8& x, const DeformationParams& params,
                                                int lmax) {
  const Mat8 t = PullbackRecursionField{params}(x);
  MotionConstants m;
  Mat8 power = t;
  for (int l = 1; l <= lmax; ++l) {
    m.c.push_back(trace(power));
    if (l < lmax) power = power * t;
  }
  return m;
}

// Tr(T^l) as a scalar field, for bracket evaluations.
struct TraceConstantField {
  DeformationParams params;
  int l = 1;

  template <class S>
  S operator()(const Coords<S>& x) const {
    S s = pow_int(HamiltonianField{params}(x), l) * 2.0;
    for (std::size_t k = 1; k < 4; ++k) s += pow_int(x[4 + k], l) * 2.0;
    return s;
  }
};

// Pairwise deformed brackets of the trace constants; antisymmetric, diagonal
// exactly zero.
inline std::vector<double> involution_matrix(const Point8& x, const DeformationParams& params,
                                             const ThetaVector& th, int lmax) {
  std::vector<double> m(static_cast<std::size_t>(lmax) * static_cast<std::size_t>(lmax), 0.0);
  for (int k = 1; k <= lmax; ++k)
    for (int l = 1; l <= lmax; ++l) {
      const TraceConstantField ck{params, k};
      const TraceConstantField cl{params, l};
      m[static_cast<std::size_t>(k - 1) * static_cast<std::size_t>(lmax) +
        static_cast<std::size_t>(l - 1)] = poisson_nc(ck, cl, th, x);
    }
  return m;
}

// -- block-structure hypothesis ---------------------------------------------------

struct Cond2Result {
  double residual = 0.0;
  bool pass = true;
  int worst_nu = 0;  // 1-based indices of the worst pair, 0 when clean
  int worst_mu = 0;
};

// Checks lambda_{nu mu} theta_nu = lambda_{mu nu} theta_mu over nu, mu in
// {2,3,4}.  With antisymmetric lambda this forces lambda_{nu mu}(theta_nu +
// theta_mu) = 0, so any nonzero lambda with same-sign thetas fails.
inline Cond2Result condition2_check(const DeformationParams& params) {
  const ThetaVector th = theta(params);
  Cond2Result r;
  for (std::size_t nu = 1; nu < 4; ++nu)
    for (std::size_t mu = 1; mu < 4; ++mu) {
      const double lhs = params.lambda(nu, mu) * th.theta[nu];
      const double rhs = params.lambda(mu, nu) * th.theta[mu];
      const double res = std::abs(lhs - rhs);
      if (res > r.residual) {
        r.residual = res;
        r.worst_nu = static_cast<int>(nu) + 1;
        r.worst_mu = static_cast<int>(mu) + 1;
      }
    }
  r.pass = r.residual <= 1e-14;
  return r;
}

// -- spectra ----------------------------------------------------------------------

// Eigenvalues of a dense nonsymmetric 8x8 matrix, sorted by (real, imag).
inline std::array<std::complex<double>, 8> spectrum8(const Mat8& m) {
  Eigen::Matrix<double, 8, 8> em;
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) em(static_cast<int>(i), static_cast<int>(j)) = m(i, j);
  const Eigen::EigenSolver<Eigen::Matrix<double, 8, 8>> solver(em, false);
  std::array<std::complex<double>, 8> ev;
  for (int i = 0; i < 8; ++i) ev[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  std::sort(ev.begin(), ev.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              if (a.real() != b.real()) return a.real() < b.real();
              return a.imag() < b.imag();
            });
  return ev;
}

// Max intra-pair gap after sorting: eigenvalues must cluster into 4 pairs.
inline double pairing_gap(const std::array<std::complex<double>, 8>& ev) {
  double gap = 0.0;
  for (std::size_t i = 0; i < 8; i += 2) gap = std::max(gap, std::abs(ev[i] - ev[i + 1]));
  return gap;
}

// -- verification battery ----------------------------------------------------------

struct VerifyTolerances {
  double primed = 1e-14;
  double theta_bracket = 1e-14;
  double canonical_torsion = 1e-12;
  double canonical_lie = 1e-13;
  double spectrum_gap = 1e-9;
  double roundtrip = 1e-12;
  double q1_transport = 1e-13;
  double trace = 1e-10;
  double pullback_match = 1e-9;
  double involution = 1e-12;
  double cond2 = 1e-14;
};

inline constexpr double kSpectrumSeparation = 1e-3;

// Runs every pointwise identity check at n seeded points and records
// residuals.  Claims that concern the deformed regime (condition (2), the
// block operator away from the commutative limit, involution for lambda != 0)
// are recorded, not asserted; domain errors at individual points are counted,
// not fatal.
inline VerificationReport verify_recursion(const DeformationParams& params, std::uint64_t seed,
                                           long n, const VerifyTolerances& tol = {},
                                           int lmax = 4) {
  VerificationReport rep;
  rep.seed = seed;
  rep.points = n;
  rep.params = params;
  rep.th = theta(params);
  const bool commutative = params.is_commutative();

  const CanonicalRecursionField t_can;
  const CanonicalFlowField x_can;
  const PullbackRecursionField t_pull{params};
  const BlockRecursionField t_verbatim{params, BlockForm::verbatim};
  const BlockRecursionField t_patterned{params, BlockForm::patterned};
  const HamiltonianVectorField x_orig = hamiltonian_vector_field(params);

  ResidualMax primed, theta_bracket, can_torsion, can_lie, spec_gap, spec_value;
  ResidualMax rt_orig, rt_canon, q1_transport, trace_id;
  ResidualMax pb_vs_patterned, pb_vs_verbatim;
  ResidualMax torsion_pb, lie_pb, torsion_verbatim, torsion_patterned;
  ResidualMax involution_res;
  long domain_errors = 0;

  for (long idx = 0; idx < n; ++idx) {
    const PhasePoint xp = sample_point(seed, static_cast<std::uint64_t>(idx));
    const Point8 x = to_point8(xp);
    try {
      // Shifted-coordinate brackets and the theta cross-check.
      const PrimedRelationsResiduals pr = verify_primed_relations(params, x);
      primed.record(pr.max(), x);
      for (std::size_t nu = 0; nu < 4; ++nu) {
        const PrimedCoordinateField qnu{params, nu};
        const PrimedMomentumField pnu{params, nu};
        theta_bracket.record(std::abs(rep.th.theta[nu] - poisson_standard(qnu, pnu, x)), x);
      }

      // Transformed-chart operator identities at y = forward(x).
      const CanonicalPoint yp = to_canonical(xp, params);
      const Point8 y = to_point8(yp);
      can_torsion.record(nijenhuis(t_can, y).max_abs(), y);
      can_lie.record(max_abs(lie_derivative_11(x_can, t_can, y)), y);

      // Spectrum of the canonical operator: 4 doubly degenerate eigenvalues.
      double sep = 1e300;
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = a + 1; b < 4; ++b)
          sep = std::min(sep, std::abs(yp.Q[a] - yp.Q[b]));
      if (sep < kSpectrumSeparation) {
        spec_gap.skip();
        spec_value.skip();
      } else {
        const auto ev = spectrum8(recursion_canonical(yp));
        spec_gap.record(pairing_gap(ev), y);
        std::array<double, 4> qs{yp.Q[0], yp.Q[1], yp.Q[2], yp.Q[3]};
        std::sort(qs.begin(), qs.end());
        double worst = 0.0;
        for (std::size_t a = 0; a < 4; ++a)
          worst = std::max(worst, std::abs(ev[2 * a] - qs[a]));
        spec_value.record(worst, y);
      }

      // Roundtrips and energy transport.
      const PhasePoint back = from_canonical(yp, params);
      const Point8 bx = to_point8(back);
      double rel = 0.0;
      for (std::size_t i = 0; i < 8; ++i)
        rel = std::max(rel, std::abs(bx[i] - x[i]) / std::max(1.0, std::abs(x[i])));
      rt_orig.record(rel, x);

      const Point8 ax = to_point8(to_canonical(back, params));
      double rel2 = 0.0;
      for (std::size_t i = 0; i < 8; ++i)
        rel2 = std::max(rel2, std::abs(ax[i] - y[i]) / std::max(1.0, std::abs(y[i])));
      rt_canon.record(rel2, y);

      q1_transport.record(std::abs(HamiltonianField{params}(bx) - yp.Q[0]), y);

      // Trace identity through the pullback route.
      const MotionConstants closed = trace_constants(x, params, lmax);
      const MotionConstants via = trace_constants_pullback(x, params, lmax);
      double worst_tr = 0.0;
      for (std::size_t l = 0; l < static_cast<std::size_t>(lmax); ++l)
        worst_tr = std::max(
            worst_tr, std::abs(via.c[l] - closed.c[l]) / std::max(1.0, std::abs(closed.c[l])));
      trace_id.record(worst_tr, x);

      // Original-chart operators vs the pullback oracle, plus their torsion.
      torsion_pb.record(nijenhuis(t_pull, x).max_abs(), x);
      lie_pb.record(max_abs(lie_derivative_11(x_orig, t_pull, x)), x);
      bool block_domain = true;
      for (std::size_t k = 1; k < 4; ++k)
        if (std::abs(x[4 + k]) < kMomentumCutoff) block_domain = false;
      if (block_domain) {
        const Mat8 pull = t_pull(x);
        pb_vs_patterned.record(max_abs_diff(pull, recursion_original_patterned(xp, params)), x);
        pb_vs_verbatim.record(max_abs_diff(pull, recursion_original_verbatim(xp, params)), x);
        torsion_verbatim.record(nijenhuis(t_verbatim, x).max_abs(), x);
        torsion_patterned.record(nijenhuis(t_patterned, x).max_abs(), x);
      } else {
        pb_vs_patterned.skip();
        pb_vs_verbatim.skip();
        torsion_verbatim.skip();
        torsion_patterned.skip();
      }

      // Involution residuals of the trace constants.
      const std::vector<double> inv = involution_matrix(x, params, rep.th, lmax);
      double worst_inv = 0.0;
      for (double e : inv) worst_inv = std::max(worst_inv, std::abs(e));
      involution_res.record(worst_inv, x);
    } catch (const Error&) {
      ++domain_errors;
    }
  }

  primed.finish(rep.add("primed_relations", tol.primed, true));
  theta_bracket.finish(rep.add("theta_vs_bracket", tol.theta_bracket, true));
  can_torsion.finish(rep.add("canonical_torsion", tol.canonical_torsion, true));
  can_lie.finish(rep.add("canonical_lie", tol.canonical_lie, true));
  spec_gap.finish(rep.add("spectrum_pair_gap", tol.spectrum_gap, true));
  spec_value.finish(rep.add("spectrum_matches_q", tol.spectrum_gap, true));
  rt_orig.finish(rep.add("roundtrip_original", tol.roundtrip, true));
  rt_canon.finish(rep.add("roundtrip_canonical", tol.roundtrip, true));
  q1_transport.finish(rep.add("q1_transport", tol.q1_transport, true));
  trace_id.finish(rep.add("trace_identity", tol.trace, true));
  pb_vs_patterned.finish(rep.add("pullback_vs_patterned", tol.pullback_match, commutative));
  pb_vs_verbatim.finish(rep.add("pullback_vs_verbatim", tol.pullback_match, false));
  torsion_pb.finish(rep.add("original_torsion_pullback", tol.canonical_torsion, false));
  lie_pb.finish(rep.add("original_lie_pullback", tol.canonical_lie, false));
  torsion_verbatim.finish(rep.add("original_torsion_verbatim", tol.canonical_torsion, false));
  torsion_patterned.finish(rep.add("original_torsion_patterned", tol.canonical_torsion, false));
  involution_res.finish(rep.add("involution", tol.involution, commutative));

  {
    const Cond2Result c2 = condition2_check(params);
    CheckResult& c = rep.add("condition2", tol.cond2, false);
    c.residual = c2.residual;
    c.pass = c2.pass;
    c.points_used = 1;
  }
  {
    // Which placement of the tabulated blocks matches the pullback oracle in
    // the commutative limit; the residual is the match of the chosen one.
    double cov = 0.0, vec = 0.0;
    const BlockOrientation o = resolve_block_orientation(seed, 32, &cov, &vec);
    CheckResult& c = rep.add("block_orientation_covector_rows", tol.pullback_match, false);
    c.residual = std::min(cov, vec);
    c.pass = o == BlockOrientation::covector_rows;
    c.points_used = 32;
  }
  {
    CheckResult& c = rep.add("domain_errors", 0.0, false);
    c.residual = static_cast<double>(domain_errors);
    c.pass = domain_errors == 0;
    c.points_used = n;
  }

  return rep;
}

}  // namespace ncrec
