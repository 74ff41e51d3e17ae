#include <gtest/gtest.h>

#include <cmath>

#include "ncrec/dynamics.hpp"
#include "test_fields.hpp"

namespace ncrec {
namespace {

using testing::random_poly_scalar;

const DeformationParams kFlat = validate_params({}, {});
const DeformationParams kDeformed = validate_params({{2, 3, 0.1}}, {{2, 3, 0.2}});

// Standard sample point used throughout: q = (0,1,2,3), p = (1,0.5,0.5,0.5).
const Point8 kStd{0, 1, 2, 3, 1, 0.5, 0.5, 0.5};

TEST(Hamiltonian, NullMomentumVector) {
  const HamiltonianField h{kFlat};
  EXPECT_DOUBLE_EQ(h(Point8{9, 9, 9, 9, 1, 1, 0, 0}), 0.0);
}

TEST(Hamiltonian, FlatDirectSum) {
  const HamiltonianField h{kFlat};
  EXPECT_DOUBLE_EQ(h(Point8{0, 0, 0, 0, 2, 1, 1, 1}), -0.5);
}

TEST(Hamiltonian, DeformedValueAndShiftedMomenta) {
  EXPECT_DOUBLE_EQ(shifted_momentum(kDeformed, kStd, 1), 0.6);
  EXPECT_DOUBLE_EQ(shifted_momentum(kDeformed, kStd, 2), 0.45);
  EXPECT_DOUBLE_EQ(shifted_momentum(kDeformed, kStd, 3), 0.5);
  EXPECT_DOUBLE_EQ(flow_momentum_coefficient(kDeformed, kStd, 1), 0.6);
  const HamiltonianField h{kDeformed};
  EXPECT_DOUBLE_EQ(h(kStd), -0.09375);
}

TEST(DifferentialHamiltonian, FlatGradient) {
  const Covector8 d = differential_hamiltonian(kFlat, Point8{0, 0, 0, 0, 2, 1, 1, 1});
  const Covector8 expect{0, 0, 0, 0, -2, 1, 1, 1};
  for (std::size_t i = 0; i < 8; ++i) EXPECT_DOUBLE_EQ(d[i], expect[i]);
}

TEST(DifferentialHamiltonian, DeformedComponentsAndAdCrossCheck) {
  const Covector8 d = differential_hamiltonian(kDeformed, kStd);
  EXPECT_DOUBLE_EQ(d[4], -1.0);
  EXPECT_DOUBLE_EQ(d[5], 0.6);
  EXPECT_DOUBLE_EQ(d[6], 0.45);
  EXPECT_DOUBLE_EQ(d[7], 0.5);
  // dq2 = (1/2) lambda_32 Omega_3 = (1/2)(-0.1)(0.45)
  EXPECT_NEAR(d[1], -0.0225, 1e-17);
  EXPECT_NEAR(d[2], 0.03, 1e-17);
  EXPECT_EQ(d[0], 0.0);
  EXPECT_EQ(d[3], 0.0);

  const auto [hv, grad] = eval_with_gradient(HamiltonianField{kDeformed}, kStd);
  (void)hv;
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(d[i], grad[i], 1e-15);
}

TEST(DifferentialHamiltonian, AdCrossCheckAtSampledPoints) {
  const DeformationParams p =
      validate_params({{2, 3, 0.1}, {2, 4, -0.4}, {3, 4, 0.25}}, {{2, 3, 0.2}});
  for (std::uint64_t i = 0; i < 50; ++i) {
    const Point8 x = to_point8(sample_point(1234, i));
    const Covector8 d = differential_hamiltonian(p, x);
    const auto [hv, grad] = eval_with_gradient(HamiltonianField{p}, x);
    (void)hv;
    for (std::size_t c = 0; c < 8; ++c) EXPECT_NEAR(d[c], grad[c], 1e-15);
  }
}

TEST(SymplecticMatrix, FlatAndDeformed) {
  const Mat8 flat = symplectic_matrix(theta(kFlat));
  for (std::size_t nu = 0; nu < 4; ++nu) {
    EXPECT_EQ(flat(4 + nu, nu), 1.0);
    EXPECT_EQ(flat(nu, 4 + nu), -1.0);
  }
  const Mat8 om = symplectic_matrix(theta(kDeformed));
  EXPECT_DOUBLE_EQ(om(5, 1), 1.005);
  EXPECT_DOUBLE_EQ(om(1, 5), -1.005);
  EXPECT_DOUBLE_EQ(om(6, 2), 1.005);
  // Antisymmetry for random theta.
  Mat8 sum = om + transpose(om);
  EXPECT_EQ(max_abs(sum), 0.0);
}

TEST(SymplecticMatrix, DegenerateThetaRejected) {
  ThetaVector t;
  t.theta = {1.0, 1e-12, 1.0, 1.0};
  EXPECT_THROW(symplectic_matrix(t), Error);
}

struct CoordinateField {
  std::size_t slot;
  template <class S>
  S operator()(const Coords<S>& x) const {
    return x[slot];
  }
};

TEST(PoissonNc, CanonicalPairs) {
  const ThetaVector th = theta(kDeformed);
  // {p2, q2} = 1/theta2
  const double b = poisson_nc(CoordinateField{5}, CoordinateField{1}, th, kStd);
  EXPECT_NEAR(b, 1.0 / 1.005, 1e-15);
  // flat limit: {p_i, q_j} = delta_ij
  const ThetaVector flat = theta(kFlat);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      const double v = poisson_nc(CoordinateField{4 + i}, CoordinateField{j}, flat, kStd);
      EXPECT_DOUBLE_EQ(v, i == j ? 1.0 : 0.0);
    }
}

TEST(PoissonNc, SelfBracketVanishesExactly) {
  const auto f = random_poly_scalar(77, 0);
  const ThetaVector th = theta(kDeformed);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const Point8 x = to_point8(sample_point(88, i));
    EXPECT_EQ(poisson_nc(f, f, th, x), 0.0);
  }
}

struct SumField {
  const testing::PolyScalarField* f;
  const testing::PolyScalarField* g;
  double a, b;
  template <class S>
  S operator()(const Coords<S>& x) const {
    return (*f)(x)*a + (*g)(x)*b;
  }
};

struct ProductField {
  const testing::PolyScalarField* f;
  const testing::PolyScalarField* g;
  template <class S>
  S operator()(const Coords<S>& x) const {
    return (*f)(x) * (*g)(x);
  }
};

// {g, h} as a scalar field; evaluating its gradient inside an outer bracket
// exercises nested duals.
struct BracketField {
  const testing::PolyScalarField* g;
  const testing::PolyScalarField* h;
  ThetaVector th;
  template <class S>
  S operator()(const Coords<S>& x) const {
    const auto xl = lift(x);
    const Dual<S, 8> gv = (*g)(xl);
    const Dual<S, 8> hv = (*h)(xl);
    S s{};
    for (std::size_t nu = 0; nu < 4; ++nu)
      s += (gv.d[4 + nu] * hv.d[nu] - gv.d[nu] * hv.d[4 + nu]) / th.theta[nu];
    return s;
  }
};

TEST(PoissonNc, BracketAxiomsAtSeededPoints) {
  const ThetaVector th = theta(kDeformed);
  double worst_bilinear = 0.0, worst_leibniz = 0.0, worst_jacobi = 0.0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const Point8 x = to_point8(sample_point(4242, i));
    const auto f = random_poly_scalar(1000 + i, 0);
    const auto g = random_poly_scalar(2000 + i, 0);
    const auto h = random_poly_scalar(3000 + i, 0);

    // Antisymmetry is exact by construction of the formula.
    EXPECT_EQ(poisson_nc(f, g, th, x), -poisson_nc(g, f, th, x));

    const SumField fg{&f, &g, 2.5, -1.25};
    const double lhs = poisson_nc(fg, h, th, x);
    const double rhs = 2.5 * poisson_nc(f, h, th, x) - 1.25 * poisson_nc(g, h, th, x);
    worst_bilinear = std::max(worst_bilinear, std::abs(lhs - rhs));

    const ProductField gh{&g, &h};
    const double leib = poisson_nc(f, gh, th, x) - g(x) * poisson_nc(f, h, th, x) -
                        h(x) * poisson_nc(f, g, th, x);
    worst_leibniz = std::max(worst_leibniz, std::abs(leib));

    const BracketField bgh{&g, &h, th};
    const BracketField bhf{&h, &f, th};
    const BracketField bfg{&f, &g, th};
    const double jac = poisson_nc(f, bgh, th, x) + poisson_nc(g, bhf, th, x) +
                       poisson_nc(h, bfg, th, x);
    worst_jacobi = std::max(worst_jacobi, std::abs(jac));
  }
  EXPECT_LE(worst_bilinear, 1e-12);
  EXPECT_LE(worst_leibniz, 1e-10);
  EXPECT_LE(worst_jacobi, 1e-9);
}

TEST(HamiltonianVectorField, FlatStraightLineFlow) {
  const auto field = hamiltonian_vector_field(kFlat);
  const Coords<double> v = field(Point8{0, 0, 0, 0, 2, 1, 1, 1});
  const Point8 expect{-2, 1, 1, 1, 0, 0, 0, 0};
  for (std::size_t i = 0; i < 8; ++i) EXPECT_DOUBLE_EQ(v[i], expect[i]);
}

TEST(HamiltonianVectorField, DeformedComponents) {
  const auto field = hamiltonian_vector_field(kDeformed);
  const Coords<double> v = field(kStd);
  EXPECT_DOUBLE_EQ(v[0], -1.0);
  EXPECT_DOUBLE_EQ(v[1], 0.6 / 1.005);
  EXPECT_DOUBLE_EQ(v[2], 0.45 / 1.005);
  EXPECT_DOUBLE_EQ(v[3], 0.5);
  EXPECT_EQ(v[4], 0.0);
  EXPECT_NEAR(v[5], 0.0225 / 1.005, 1e-16);
  EXPECT_NEAR(v[6], -0.03 / 1.005, 1e-16);
  EXPECT_EQ(v[7], 0.0);
}

TEST(HamiltonianVectorField, ContractionWithSymplecticFormIsMinusDh) {
  // Omega(X, v) + <dH, v> = 0 for 100 random directions at 100 seeded points.
  const DeformationParams p =
      validate_params({{2, 3, 0.1}, {3, 4, -0.2}}, {{2, 3, 0.2}, {2, 4, 0.3}});
  const auto field = hamiltonian_vector_field(p);
  const Mat8 omega = symplectic_matrix(theta(p));
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const Point8 x = to_point8(sample_point(515, i));
    const Coords<double> X = field(x);
    const Covector8 dh = differential_hamiltonian(p, x);
    for (std::uint64_t k = 0; k < 100; ++k) {
      Point8 v;
      for (std::size_t c = 0; c < 8; ++c)
        v[c] = -1.0 + 2.0 * uniform01_at(99, (i * 100 + k) * 8 + c);
      double om = 0.0, pair = 0.0;
      for (std::size_t r = 0; r < 8; ++r) {
        for (std::size_t c = 0; c < 8; ++c) om += X[r] * omega(r, c) * v[c];
        pair += dh[r] * v[r];
      }
      worst = std::max(worst, std::abs(om + pair));
    }
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(HamiltonianVectorField, BracketDefinitionAgreesWithPairing) {
  // poisson_nc(H, f) = <df, X_H> for random polynomial f.
  const auto field = hamiltonian_vector_field(kDeformed);
  const HamiltonianField h{kDeformed};
  const ThetaVector th = theta(kDeformed);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const Point8 x = to_point8(sample_point(616, i));
    const auto f = random_poly_scalar(5000 + i, 0);
    const double lhs = poisson_nc(h, f, th, x);
    const auto [fv, df] = eval_with_gradient(f, x);
    (void)fv;
    const Coords<double> X = field(x);
    double rhs = 0.0;
    for (std::size_t c = 0; c < 8; ++c) rhs += df[c] * X[c];
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(HamiltonianVectorField, EnergyConservationDirection) {
  // <dH, X_H> = 0 by bracket antisymmetry.
  for (std::uint64_t i = 0; i < 50; ++i) {
    const Point8 x = to_point8(sample_point(717, i));
    const Covector8 dh = differential_hamiltonian(kDeformed, x);
    const Coords<double> X = hamiltonian_vector_field(kDeformed)(x);
    double pair = 0.0;
    for (std::size_t c = 0; c < 8; ++c) pair += dh[c] * X[c];
    EXPECT_NEAR(pair, 0.0, 1e-12);
  }
}

TEST(PrimedRelations, IdentityTransformAtZeroParams) {
  const PrimedRelationsResiduals r = verify_primed_relations(kFlat, kStd);
  EXPECT_EQ(r.max(), 0.0);
}

TEST(PrimedRelations, DeformedBracketsMatchClosedForms) {
  const PrimedRelationsResiduals r = verify_primed_relations(kDeformed, kStd);
  EXPECT_LE(r.max(), 1e-15);

  // Spot values: {q'_2, q'_3} = 0.2, {p'_2, p'_3} = 0.1, {q'_2, p'_2} = 1.005.
  const PrimedCoordinateField q2{kDeformed, 1}, q3{kDeformed, 2};
  const PrimedMomentumField p2{kDeformed, 1}, p3{kDeformed, 2};
  EXPECT_NEAR(poisson_standard(q2, q3, kStd), 0.2, 1e-16);
  EXPECT_NEAR(poisson_standard(p2, p3, kStd), 0.1, 1e-16);
  EXPECT_NEAR(poisson_standard(q2, p2, kStd), 1.005, 1e-15);
  // Bracket antisymmetry: {p'_2, q'_3} = -{q'_3, p'_2} exactly.
  EXPECT_EQ(poisson_standard(p2, q3, kStd), -poisson_standard(q3, p2, kStd));
}

TEST(PrimedRelations, ThetaCrossCheck) {
  // theta_nu agrees with the standard bracket {q'_nu, p'_nu} to 1e-14.
  const DeformationParams p =
      validate_params({{2, 3, 0.1}, {2, 4, -0.4}, {3, 4, 0.25}}, {{2, 3, 0.2}, {2, 4, 0.15}});
  const ThetaVector th = theta(p);
  for (std::size_t nu = 0; nu < 4; ++nu) {
    const PrimedCoordinateField qn{p, nu};
    const PrimedMomentumField pn{p, nu};
    EXPECT_NEAR(th.theta[nu], poisson_standard(qn, pn, kStd), 1e-14);
  }
}

TEST(HamiltonianVectorField, JacobianMatchesOracle) {
  const auto field = hamiltonian_vector_field(kDeformed);
  for (std::uint64_t i = 0; i < 10; ++i) {
    const Point8 x = to_point8(sample_point(919, i));
    EXPECT_LE(max_abs_diff(jacobian(field, x), fd_jacobian(field, x)), 1e-6);
  }
}

TEST(HamiltonianVectorField, CommutativeLimitExact) {
  const auto field = hamiltonian_vector_field(kFlat);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const Point8 x = to_point8(sample_point(818, i));
    const Coords<double> v = field(x);
    EXPECT_EQ(v[0], -x[4]);
    for (std::size_t k = 1; k < 4; ++k) EXPECT_EQ(v[k], x[4 + k]);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(v[4 + k], 0.0);
  }
}

}  // namespace
}  // namespace ncrec
