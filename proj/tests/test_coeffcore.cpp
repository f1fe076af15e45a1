#include <gtest/gtest.h>

#include <random>

#include "logdecay/perf_series.hpp"

using namespace logdecay;

namespace {

const FieldSpec* F(long p) { return FieldSpec::prime(p); }

PerfSeries mono(const FieldSpec* f, long c, Rational e) {
  return PerfSeries::monomial(FqElem::from_int(f, c), e);
}

PerfSeries poly(const FieldSpec* f, const std::vector<long>& coeffs, ExtRational cutoff = ExtRational::infinity()) {
  PerfSeries s = PerfSeries::zero(f);
  for (std::size_t i = 0; i < coeffs.size(); ++i) s += mono(f, coeffs[i], static_cast<long long>(i));
  return s.truncate(cutoff);
}

}  // namespace

TEST(FiniteField, PrimeFieldArithmetic) {
  auto f = F(5);
  FqElem a = FqElem::from_int(f, 3), b = FqElem::from_int(f, 4);
  EXPECT_EQ((a + b).code(), 2u);
  EXPECT_EQ((a * b).code(), 2u);
  EXPECT_EQ((a * a.inv()).code(), 1u);
  EXPECT_EQ(a.frob(), a);
}

TEST(FiniteField, ExtensionFieldFrobeniusRoundTrip) {
  auto f = FieldSpec::get(3, {1, 0, 1});  // x^2 + 1 over F_3
  EXPECT_EQ(f->size(), 9u);
  for (std::uint32_t c = 0; c < 9; ++c) {
    FqElem x(f, c);
    EXPECT_EQ(x.frob().frob_inv(), x);
    EXPECT_EQ(x.pow(9), x);
  }
  FqElem i = FqElem::from_coords(f, {0, 1});
  EXPECT_EQ((i * i), FqElem::from_int(f, -1));
}

TEST(FiniteField, RejectsReducibleModulus) {
  EXPECT_THROW(FieldSpec::get(2, {1, 0, 1}), InputError);  // x^2+1 = (x+1)^2 over F_2
}

TEST(PerfSeries, AddInCharacteristicTwo) {
  auto f = F(2);
  PerfSeries t = mono(f, 1, 1);
  EXPECT_TRUE((t + t).empty());
  EXPECT_TRUE((t + t).is_exact());
}

TEST(PerfSeries, HalfExponentsMultiply) {
  auto f = F(2);
  PerfSeries h = mono(f, 1, rat(1, 2));
  EXPECT_EQ(h.denom_exp(), 1);
  PerfSeries t = h * h;
  EXPECT_EQ(t, mono(f, 1, 1));
}

TEST(PerfSeries, TruncatedProductMatchesConvolution) {
  auto f = F(3);
  PerfSeries a = poly(f, {1, 1});
  PerfSeries b = poly(f, {1, 1, 1, 1}, ExtRational(4));
  PerfSeries c = a * b;
  EXPECT_EQ(c.cutoff(), ExtRational(4));
  // Direct convolution of coefficient lists, reduced mod 3.
  std::vector<long> av{1, 1}, bv{1, 1, 1, 1}, conv(4, 0);
  for (std::size_t i = 0; i < av.size(); ++i)
    for (std::size_t j = 0; j < bv.size() && i + j < 4; ++j) conv[i + j] += av[i] * bv[j];
  EXPECT_EQ(c, poly(f, conv, ExtRational(4)));
}

TEST(PerfSeries, InverseExamples) {
  auto f = F(2);
  EXPECT_EQ(poly(f, {1, 1}).inv(ExtRational(4)), poly(f, {1, 1, 1, 1}, ExtRational(4)));
  EXPECT_EQ(mono(f, 1, 1).inv(ExtRational::infinity()), mono(f, 1, -1));
  PerfSeries x = mono(f, 1, 2) * poly(f, {1, 1});
  PerfSeries y = x.inv(ExtRational(1));
  EXPECT_EQ(y, (mono(f, 1, -2) + mono(f, 1, -1) + mono(f, 1, 0)).truncate(ExtRational(1)));
  PerfSeries check = x * y;
  EXPECT_TRUE(agree(check, PerfSeries::one(f)));
  EXPECT_THROW(PerfSeries::zero(f).inv(ExtRational(3)), NotInvertible);
}

TEST(PerfSeries, FrobeniusPowers) {
  auto f = F(3);
  EXPECT_EQ(mono(f, 1, 1).frob_pow(1), mono(f, 1, 3));
  EXPECT_EQ(mono(f, 1, 3).frob_pow(-1), mono(f, 1, 1));
  auto f9 = FieldSpec::get(3, {1, 0, 1});
  FqElem c = FqElem::from_coords(f9, {1, 1});
  PerfSeries x = PerfSeries::monomial(c, rat(1, 3));
  PerfSeries y = x.frob_pow(-1);
  EXPECT_EQ(y, PerfSeries::monomial(c.pow(3), rat(1, 9)));
  EXPECT_EQ(y.frob_pow(1), x);
}

TEST(PerfSeries, BudgetIsEnforced) {
  auto f = F(2);
  PerfSeries x = PerfSeries::monomial(FqElem(f, 1), 1, 2);
  EXPECT_NO_THROW(x.frob_pow(-2));
  EXPECT_THROW(x.frob_pow(-3), BudgetExceeded);
}

TEST(PerfSeriesProperty, RingAxiomsUpToSharedCutoff) {
  std::mt19937_64 rng(11);
  for (long p : {2L, 3L, 5L}) {
    auto f = F(p);
    auto rnd = [&]() {
      PerfSeries s = PerfSeries::zero(f);
      int n = static_cast<int>(rng() % 5);
      for (int i = 0; i < n; ++i) {
        long long num = static_cast<long long>(rng() % 13) - 4;
        int k = static_cast<int>(rng() % 3);
        s += mono(f, static_cast<long>(rng() % p), Rational(num) / Rational(ipow(BigInt(p), k)));
      }
      return s.truncate(ExtRational(Rational(static_cast<long long>(rng() % 10) + 6)));
    };
    for (int trial = 0; trial < 200; ++trial) {
      PerfSeries a = rnd(), b = rnd(), c = rnd();
      EXPECT_TRUE(agree(a + b, b + a));
      EXPECT_TRUE(agree(a * b, b * a));
      EXPECT_TRUE(agree((a * b) * c, a * (b * c)));
      EXPECT_TRUE(agree(a * (b + c), a * b + a * c));
      EXPECT_EQ(a.frob_pow(-1).frob_pow(1), a);
      if (a.valuation_known() && b.valuation_known() && !(a * b).empty()) {
        EXPECT_EQ((a * b).valuation(), a.valuation() + b.valuation());
      }
      if (a.valuation_known() && b.valuation_known() && a.valuation() != b.valuation()) {
        PerfSeries s = a + b;
        EXPECT_EQ(s.valuation(), min(a.valuation(), b.valuation()));
      }
    }
  }
}
