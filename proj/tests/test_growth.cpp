#include <gtest/gtest.h>

#include <random>

#include "logdecay/growth.hpp"

using namespace logdecay;

namespace {

const FieldSpec* F(long p) { return FieldSpec::prime(p); }

GrowthSeries S(long p, int N, std::vector<std::pair<std::int64_t, long long>> t) {
  return GrowthSeries::from_ints(F(p), N, t);
}

// Naive valuation straight from the definition, on integer coefficient lists.
ExtRational naive_oracle(const std::vector<std::pair<std::int64_t, long long>>& terms, long p, int N, int n) {
  std::int64_t best = detail::kInfExp;
  long long pN = ipow64(p, N);
  for (const auto& [e, c] : terms) {
    long long r = ((c % pN) + pN) % pN;
    if (r == 0) continue;
    int v = 0;
    while (r % p == 0) {
      r /= p;
      ++v;
    }
    if (v <= n) best = std::min(best, e);
  }
  return best == detail::kInfExp ? ExtRational::infinity() : ExtRational(Rational(best));
}

// Random exact series in O_E with v_n >= -c p^{rn} style spread.
GrowthSeries random_series(std::mt19937_64& rng, long p, int N, int lo, int hi, int nterms) {
  std::uniform_int_distribution<int> e(lo, hi);
  std::uniform_int_distribution<long long> c(0, ipow64(p, N) - 1);
  std::vector<std::pair<std::int64_t, long long>> t;
  for (int i = 0; i < nterms; ++i) t.push_back({e(rng), c(rng)});
  return S(p, N, t);
}

}  // namespace

namespace logdecay {
void PrintTo(const GrowthSeries& f, std::ostream* os) { *os << f.str(); }
}  // namespace logdecay

TEST(NaiveValuation, Examples) {
  GrowthSeries f = S(2, 3, {{-1, 1}, {-3, 2}, {-9, 4}});
  EXPECT_EQ(naive_partial_valuation(f, 0), ExtRational(-1));
  EXPECT_EQ(naive_partial_valuation(f, 1), ExtRational(-3));
  EXPECT_EQ(naive_partial_valuation(f, 2), ExtRational(-9));
  GrowthSeries g = S(2, 3, {{5, 2}});
  EXPECT_TRUE(naive_partial_valuation(g, 0).is_inf());
  EXPECT_EQ(naive_partial_valuation(g, 1), ExtRational(5));
  EXPECT_THROW(naive_partial_valuation(g, 3), PrecisionExhausted);
}

TEST(NaiveValuation, MatchesDefinition) {
  std::mt19937_64 rng(1);
  for (long p : {2, 3, 5}) {
    for (int trial = 0; trial < 50; ++trial) {
      std::uniform_int_distribution<int> e(-10, 10);
      std::uniform_int_distribution<long long> c(0, ipow64(p, 3) - 1);
      std::vector<std::pair<std::int64_t, long long>> t;
      for (int i = 0; i < 6; ++i) t.push_back({e(rng), c(rng)});
      std::map<std::int64_t, long long> merged;
      for (auto [x, y] : t) merged[x] += y;
      std::vector<std::pair<std::int64_t, long long>> m(merged.begin(), merged.end());
      GrowthSeries f = S(p, 3, m);
      for (int n = 0; n < 3; ++n) EXPECT_EQ(naive_partial_valuation(f, n), naive_oracle(m, p, 3, n));
    }
  }
}

TEST(NaiveValuation, SumAndProductInequalities) {
  std::mt19937_64 rng(2);
  for (long p : {2, 3}) {
    for (int trial = 0; trial < 60; ++trial) {
      GrowthSeries f = random_series(rng, p, 3, -8, 8, 5), g = random_series(rng, p, 3, -8, 8, 5);
      GrowthSeries s = series_add(f, g), m = series_mul(f, g);
      for (int n = 0; n < 3; ++n) {
        ExtRational vf = naive_partial_valuation(f, n), vg = naive_partial_valuation(g, n);
        EXPECT_GE(naive_partial_valuation(s, n), min(vf, vg));
        if (!(vf == vg)) EXPECT_EQ(naive_partial_valuation(s, n), min(vf, vg));
        ExtRational bound = ExtRational::infinity();
        int attained = 0;
        for (int i = 0; i <= n; ++i) {
          ExtRational b = naive_partial_valuation(f, i) + naive_partial_valuation(g, n - i);
          if (b < bound) {
            bound = b;
            attained = 1;
          } else if (b == bound) {
            ++attained;
          }
        }
        EXPECT_GE(naive_partial_valuation(m, n), bound);
        if (attained == 1) EXPECT_EQ(naive_partial_valuation(m, n), bound);
      }
    }
  }
}

TEST(SeriesArith, GeometricInverse) {
  GrowthSeries f = S(2, 4, {{0, 1}, {-1, -2}});
  GrowthSeries want = S(2, 4, {{0, 1}, {-1, 2}, {-2, 4}, {-3, 8}});
  EXPECT_EQ(series_inv(f), want);
  for (int n = 0; n < 4; ++n) EXPECT_EQ(naive_partial_valuation(series_inv(f), n), ExtRational(-n));
}

TEST(SeriesArith, MonomialInverse) {
  const RingSpec* r = RingSpec::get(F(3), 3);
  GrowthSeries t = GrowthSeries::monomial(r, 1, 1);
  EXPECT_EQ(series_mul(t, series_inv(t)), GrowthSeries::one(r));
  GrowthSeries pt = GrowthSeries::monomial(r, 3, -2);
  GrowthSeries inv = series_inv(pt);
  EXPECT_EQ(inv.p_shift(), -1);
  // Absolute precision of the product is p^1.
  EXPECT_EQ(series_mul(pt, inv).normalized(), GrowthSeries::one(RingSpec::get(F(3), 1)));
  EXPECT_THROW(series_inv(GrowthSeries::zero(r)), NotInvertible);
}

TEST(SeriesArith, InverseRoundTripWithHonestCutoffs) {
  std::mt19937_64 rng(4);
  for (long p : {2, 3}) {
    for (int trial = 0; trial < 20; ++trial) {
      GrowthSeries f = random_series(rng, p, 3, -5, 5, 5);
      f = series_add(f, GrowthSeries::monomial(RingSpec::get(F(p), 3), 1, 0));
      if (f.is_zero()) continue;
      GrowthSeries g;
      try {
        g = series_inv(f, 20);
      } catch (const NotInvertible&) {
        continue;
      }
      GrowthSeries one = series_mul(f, g);
      ASSERT_EQ(one.p_shift(), 0);
      for (const auto& [e, c] : one.terms()) EXPECT_TRUE(e == 0 && c == Zq::from_int(one.ring(), 1)) << one.str();
    }
  }
}

TEST(SeriesArith, InversePreservesLogDecay) {
  std::mt19937_64 rng(5);
  for (long p : {2, 3}) {
    const int N = 4;
    const RingSpec* r = RingSpec::get(F(p), N);
    for (int trial = 0; trial < 30; ++trial) {
      // Unit residue, layer n supported at exponents >= -c p^{rn} with r = 1, c = 1.
      GrowthSeries f = GrowthSeries::one(r);
      for (int n = 1; n < N; ++n) {
        std::uniform_int_distribution<int> e(-static_cast<int>(ipow64(p, n)), 3);
        std::uniform_int_distribution<long long> c(1, p - 1);
        f = series_add(f, GrowthSeries::monomial(r, c(rng) * ipow64(p, n), e(rng)));
      }
      f = series_add(f, GrowthSeries::monomial(r, 1, 1));
      GrowthSeries g = series_inv(f, 24);
      GrowthClass cf = classify_growth(f, 1), cg = classify_growth(g, 1);
      ASSERT_TRUE(cf.witness_c && cg.witness_c);
      EXPECT_TRUE(*cg.witness_c <= PowRat::of(1, p)) << g.str();
      for (int n = 0; n < N; ++n) {
        ExtRational v = naive_partial_valuation(g, n);
        EXPECT_GE(v, ExtRational(-Rational(ipow64(p, n))));
      }
    }
  }
}

TEST(Classify, Examples) {
  GrowthSeries f = S(2, 3, {{0, 1}, {-4, 2}, {-16, 4}});
  GrowthClass g = classify_growth(f, 2);
  EXPECT_EQ(g.kind, GrowthClass::Kind::rlog);
  ASSERT_TRUE(g.r_hat);
  EXPECT_TRUE(g.r_hat->exact());
  EXPECT_EQ(g.r_hat->lo, Rational(2));
  EXPECT_EQ(g.witness_c->to_rational(), Rational(1));

  GrowthSeries h = S(3, 3, {{0, 1}, {2, 3}, {5, 9}});
  EXPECT_EQ(classify_growth(h, 1).kind, GrowthClass::Kind::dagger);
}

TEST(Classify, HalfExponentByExactSupremum) {
  // v_n = -ceil(3^{n/2}) for p = 3, r = 1/2: d = max_n ceil(3^{n/2}) 3^{-n/2}.
  const long p = 3;
  const int N = 4;
  std::vector<std::pair<std::int64_t, long long>> t = {{0, 1}};
  std::vector<long long> v = {0, -2, -3, -6};  // ceil(sqrt 3) = 2, 3, ceil(3 sqrt 3) = 6
  for (int n = 1; n < N; ++n) t.push_back({v[n], ipow64(p, n)});
  GrowthClass g = classify_growth(S(p, N, t), rat(1, 2));
  // Oracle: compare every candidate -v_n 3^{-n/2} against the reported maximum.
  PowRat best = *g.witness_c;
  for (int n = 1; n < N; ++n) EXPECT_TRUE(PowRat(-v[n], -rat(n, 2), p) <= best);
  // n = 1 is binding: 2/sqrt 3 > 6/(3 sqrt 3) = 2/sqrt 3 and > 1.
  EXPECT_EQ(compare(best, PowRat(2, rat(-1, 2), p)), 0);
}

TEST(SeriesArith, DerivativeAndComposition) {
  const long p = 2;
  const RingSpec* r = RingSpec::get(F(p), 3);
  GrowthSeries f = S(p, 3, {{-2, 1}, {3, 5}});
  EXPECT_EQ(series_derivative(f), S(p, 3, {{-3, -2}, {2, 15}}));
  GrowthSeries P = GrowthSeries::monomial(r, 1, 2);
  EXPECT_EQ(series_compose_frobenius(f, P), S(p, 3, {{-4, 1}, {6, 5}}));
}
