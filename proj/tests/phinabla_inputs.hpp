#pragma once

// Generators for Frobenius matrices and transition matrices.

#include <random>
#include <string>
#include <vector>

#include "logdecay/phinabla.hpp"

namespace testgen {

using namespace logdecay;

/// sum p^{min_vp} * c_i T^{e_i} with e_i in [lo, hi], c_i in [1, p^N).
inline GrowthSeries random_laurent(std::mt19937_64& rng, const RingSpec* r, int lo, int hi, int nterms,
                                   int min_vp = 0) {
  std::uniform_int_distribution<int> e(lo, hi);
  std::uniform_int_distribution<long long> c(1, ipow64(r->p(), r->N()) - 1);
  GrowthSeries s = GrowthSeries::zero(r);
  for (int i = 0; i < nterms; ++i) s = s + GrowthSeries::monomial(r, c(rng) * ipow64(r->p(), min_vp), e(rng));
  return s;
}

inline GrowthSeries frobenius_image(long p, int N, bool shifted) {
  const RingSpec* r = RingSpec::get(FieldSpec::prime(p), N);
  if (!shifted) return GrowthSeries::monomial(r, 1, p);
  GrowthSeries x = GrowthSeries::from_ints(FieldSpec::prime(p), N, {{0, 1}, {1, 1}});
  return series_pow(x, p) - GrowthSeries::one(r);
}

struct Rank1Case {
  std::string kind;
  GrowthSeries P;  // sigma(T)
  GrowthSeries C;
};

/// Rank-1 unit-root Frobenius matrices whose trivialization stays within the
/// exponent budget. Three families:
///   monomial: C = T^{a(p-1)} (1 + p g), g with positive exponents, sigma(T) = T^p
///   coboundary: C = sigma(U) / U for U = 1 + p h, h Laurent, sigma(T) = T^p
///   shifted: C = 1 + p g, sigma(T) = (1+T)^p - 1
inline Rank1Case rank1_case(std::mt19937_64& rng, long p, int N, int which) {
  const RingSpec* r = RingSpec::get(FieldSpec::prime(p), N);
  std::uniform_int_distribution<int> a(-2, 2), nt(1, 3);
  switch (which % 3) {
    case 0: {
      GrowthSeries g = random_laurent(rng, r, 1, 4, nt(rng), 1);
      GrowthSeries C = GrowthSeries::monomial(r, 1, a(rng) * (p - 1)) * (GrowthSeries::one(r) + g);
      return {"monomial", frobenius_image(p, N, false), C};
    }
    case 1: {
      GrowthSeries U = GrowthSeries::one(r) + random_laurent(rng, r, -3, 3, nt(rng), 1);
      GrowthSeries P = frobenius_image(p, N, false);
      return {"coboundary", P, series_compose_frobenius(U, P) * series_inv(U, 24)};
    }
    default: {
      GrowthSeries g = random_laurent(rng, r, 1, 4, nt(rng), 1);
      return {"shifted", frobenius_image(p, N, true), GrowthSeries::one(r) + g};
    }
  }
}

/// d x d matrix over O_E whose reduction mod p is invertible over k((T)).
inline SeriesMatrix random_transition(std::mt19937_64& rng, long p, int N, int d) {
  const RingSpec* r = RingSpec::get(FieldSpec::prime(p), N);
  for (;;) {
    SeriesMatrix L(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        GrowthSeries x = random_laurent(rng, r, 0, 3, 2) + random_laurent(rng, r, -4, 4, 2, 1);
        if (i == j) x = x + GrowthSeries::one(r);
        L[i].push_back(x);
      }
    GrowthSeries D = det(L);
    bool unit_residue = false;
    for (const auto& t : D.terms()) unit_residue = unit_residue || t.second.vp() == 0;
    if (unit_residue && D.p_shift() == 0) return L;
  }
}

}  // namespace testgen
