// Deformation parameters of the noncommutative Minkowski phase space, the
// theta weights of its symplectic form, and the phase-space point types.
//
// Index conventions: mathematical indices run 1..4 in the public entry lists,
// storage is 0-based. The first row and column of both deformation matrices
// vanish identically (the time direction is undeformed), and gamma is the
// derived mixed-sector matrix gamma[i][j] = (1/4) sum_k alpha[i][k]*lambda[j][k].
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ncrec/errors.hpp"
#include "ncrec/linalg.hpp"

namespace ncrec {

struct MatrixEntry {
  int i = 0;  // 1-based row
  int j = 0;  // 1-based column
  double value = 0.0;
};

struct DeformationParams {
  Mat4 lambda;  // momentum-sector deformation
  Mat4 alpha;   // coordinate-sector deformation
  Mat4 gamma;   // derived, dimensionless

  bool is_commutative() const {
    for (std::size_t k = 0; k < 16; ++k)
      if (lambda.a[k] != 0.0 || alpha.a[k] != 0.0) return false;
    return true;
  }
};

struct ThetaVector {
  std::array<double, 4> theta{1.0, 1.0, 1.0, 1.0};

  double operator[](std::size_t nu) const { return theta[nu]; }
};

struct PhasePoint {
  std::array<double, 4> q{};
  std::array<double, 4> p{};

  bool is_valid() const { return p[0] > 0.0; }
};

struct CanonicalPoint {
  std::array<double, 4> P{};
  std::array<double, 4> Q{};

  // Radicand of the commutative-limit inverse map; positive on the image of
  // the forward transform for small deformations.
  double flat_radicand() const {
    return Q[1] * Q[1] + Q[2] * Q[2] + Q[3] * Q[3] - 2.0 * Q[0];
  }
};

namespace detail {

inline void apply_entries(Mat4& m, const std::vector<MatrixEntry>& entries, const char* which) {
  std::array<bool, 16> seen{};
  for (const MatrixEntry& e : entries) {
    if (e.i < 1 || e.i > 4 || e.j < 1 || e.j > 4 || e.i == e.j)
      throw Error(ErrorKind::IndexOutOfRange,
                  std::string(which) + " entry indices must be distinct and in 1..4");
    if (e.i == 1 || e.j == 1)
      throw Error(ErrorKind::FirstRowNonzero,
                  std::string(which) + " first row/column must stay zero");
    const std::size_t lo = static_cast<std::size_t>(std::min(e.i, e.j) - 1);
    const std::size_t hi = static_cast<std::size_t>(std::max(e.i, e.j) - 1);
    if (seen[lo * 4 + hi])
      throw Error(ErrorKind::DuplicatePair, std::string(which) + " pair given twice");
    seen[lo * 4 + hi] = true;
    m(static_cast<std::size_t>(e.i - 1), static_cast<std::size_t>(e.j - 1)) = e.value;
    m(static_cast<std::size_t>(e.j - 1), static_cast<std::size_t>(e.i - 1)) = -e.value;
  }
}

}  // namespace detail

// Builds validated parameters from sparse upper-triangle entries.
// Antisymmetric completion is bit-exact: the mirror entry is the negation.
inline DeformationParams validate_params(const std::vector<MatrixEntry>& lambda_entries,
                                         const std::vector<MatrixEntry>& alpha_entries) {
  DeformationParams p;
  detail::apply_entries(p.lambda, lambda_entries, "lambda");
  detail::apply_entries(p.alpha, alpha_entries, "alpha");
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 4; ++k) s += p.alpha(i, k) * p.lambda(j, k);
      p.gamma(i, j) = 0.25 * s;
    }
  return p;
}

inline constexpr double kThetaMin = 1e-9;

// theta[nu] = 1 + (1/4) sum_mu lambda[mu][nu] * alpha[mu][nu].  Rejected when
// any component falls below kThetaMin in magnitude: the symplectic form would
// be numerically singular.
inline ThetaVector theta(const DeformationParams& params) {
  ThetaVector t;
  for (std::size_t nu = 0; nu < 4; ++nu) {
    double s = 0.0;
    for (std::size_t mu = 0; mu < 4; ++mu) s += params.lambda(mu, nu) * params.alpha(mu, nu);
    t.theta[nu] = 1.0 + 0.25 * s;
    if (std::abs(t.theta[nu]) < kThetaMin)
      throw Error(ErrorKind::DegenerateTheta, "theta component vanishes");
  }
  return t;
}

// -- deterministic counter-based sampling ------------------------------------

// splitmix64 output at stream position n for a given seed; a pure function of
// (seed, n) so parallel generation is order-independent.
inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t n) {
  std::uint64_t z = seed + (n + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline double uniform01_at(std::uint64_t seed, std::uint64_t n) {
  return static_cast<double>(splitmix64_at(seed, n) >> 11) * 0x1.0p-53;
}

// Point i depends only on (seed, i).  p1 is kept in [0.5, 2.0], away from the
// divisions by p1 that pervade the canonical transform and the block operator;
// all other components are uniform in [-1, 1].
inline PhasePoint sample_point(std::uint64_t seed, std::uint64_t index) {
  PhasePoint x;
  const std::uint64_t base = index * 8;
  for (std::size_t c = 0; c < 4; ++c) x.q[c] = -1.0 + 2.0 * uniform01_at(seed, base + c);
  x.p[0] = 0.5 + 1.5 * uniform01_at(seed, base + 4);
  for (std::size_t c = 1; c < 4; ++c) x.p[c] = -1.0 + 2.0 * uniform01_at(seed, base + 4 + c);
  return x;
}

inline std::vector<PhasePoint> sample_points(std::uint64_t seed, std::size_t n,
                                             const DeformationParams& /*params*/) {
  if (n < 1) throw Error(ErrorKind::InvalidValue, "sample count must be >= 1");
  std::vector<PhasePoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pts.push_back(sample_point(seed, i));
  return pts;
}

}  // namespace ncrec
