// Seeded random polynomial fields (total degree <= 3) used as test subjects
// for the derivative machinery and bracket axioms.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ncrec/calculus.hpp"
#include "ncrec/core.hpp"

namespace ncrec::testing {

struct Monomial {
  double coef = 0.0;
  std::array<int, 8> exps{};
};

struct PolyScalarField {
  std::vector<Monomial> terms;

  template <class S>
  S operator()(const Coords<S>& x) const {
    S sum{};
    for (const Monomial& m : terms) {
      S t(m.coef);
      for (std::size_t i = 0; i < 8; ++i)
        for (int e = 0; e < m.exps[i]; ++e) t = t * x[i];
      sum += t;
    }
    return sum;
  }
};

struct PolyVectorField {
  std::array<PolyScalarField, 8> comp;

  template <class S>
  Coords<S> operator()(const Coords<S>& x) const {
    Coords<S> r;
    for (std::size_t i = 0; i < 8; ++i) r[i] = comp[i](x);
    return r;
  }
};

struct PolyTensorField {
  std::array<PolyScalarField, 64> comp;

  template <class S>
  SquareMat<S, 8> operator()(const Coords<S>& x) const {
    SquareMat<S, 8> r;
    for (std::size_t i = 0; i < 64; ++i) r.a[i] = comp[i](x);
    return r;
  }
};

inline PolyScalarField random_poly_scalar(std::uint64_t seed, std::uint64_t stream,
                                          int nterms = 6) {
  PolyScalarField f;
  std::uint64_t n = stream * 1024;
  for (int t = 0; t < nterms; ++t) {
    Monomial m;
    m.coef = -1.0 + 2.0 * uniform01_at(seed, n++);
    int degree = static_cast<int>(splitmix64_at(seed, n++) % 4);  // 0..3
    for (int d = 0; d < degree; ++d) {
      const std::size_t var = splitmix64_at(seed, n++) % 8;
      m.exps[var] += 1;
    }
    f.terms.push_back(m);
  }
  return f;
}

inline PolyVectorField random_poly_vector(std::uint64_t seed, std::uint64_t stream) {
  PolyVectorField f;
  for (std::size_t i = 0; i < 8; ++i)
    f.comp[i] = random_poly_scalar(seed, stream * 8 + i);
  return f;
}

inline PolyTensorField random_poly_tensor(std::uint64_t seed, std::uint64_t stream) {
  PolyTensorField f;
  for (std::size_t i = 0; i < 64; ++i)
    f.comp[i] = random_poly_scalar(seed, stream * 64 + i, 3);
  return f;
}

}  // namespace ncrec::testing
