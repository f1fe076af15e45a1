#pragma once

// Random generators shared by property tests and the acceptance gate.

#include <random>
#include <vector>

#include "logdecay/perf_series.hpp"
#include "logdecay/witt.hpp"

namespace testgen {

using namespace logdecay;

/// Up to max_terms terms with exponents k/p^d, d <= max_den, k in [lo*p^d, hi*p^d].
/// With probability 1/2 the series is truncated above its last term.
inline PerfSeries random_series(std::mt19937_64& rng, const FieldSpec* f, int max_terms, int lo, int hi,
                                int max_den = 1, bool allow_truncation = true) {
  const long p = f->p();
  std::uniform_int_distribution<int> nterms(0, max_terms), den(0, max_den), coin(0, 1);
  std::uniform_int_distribution<long> coef(1, static_cast<long>(f->size()) - 1);
  PerfSeries s = PerfSeries::zero(f, ExtRational::infinity(), 64);
  const int n = nterms(rng);
  Rational top = lo;
  for (int i = 0; i < n; ++i) {
    const int d = den(rng);
    const long long pd = ipow64(p, d);
    std::uniform_int_distribution<long long> num(lo * pd, hi * pd);
    Rational e = Rational(num(rng)) / Rational(pd);
    top = std::max(top, e);
    s += PerfSeries::monomial(FqElem(f, static_cast<std::uint32_t>(coef(rng))), e, 64);
  }
  if (allow_truncation && coin(rng)) {
    std::uniform_int_distribution<int> extra(1, 3);
    s = s.truncate(ExtRational(Rational(floor(top)) + extra(rng)));
  }
  return s;
}

inline std::vector<PerfSeries> random_slices(std::mt19937_64& rng, const FieldSpec* f, int N, int max_terms,
                                             int lo, int hi, int max_den = 1, bool allow_truncation = true) {
  std::vector<PerfSeries> s;
  for (int i = 0; i < N; ++i) s.push_back(random_series(rng, f, max_terms, lo, hi, max_den, allow_truncation));
  return s;
}

inline WittElem random_witt(std::mt19937_64& rng, const FieldSpec* f, int N, int max_terms, int lo, int hi,
                            int max_den = 1, bool allow_truncation = true) {
  return WittElem(0, random_slices(rng, f, N, max_terms, lo, hi, max_den, allow_truncation));
}

}  // namespace testgen
