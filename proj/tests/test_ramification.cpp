#include <gtest/gtest.h>

#include <random>

#include "logdecay/artin_schreier.hpp"
#include "logdecay/ramification.hpp"
#include "ram_oracle.hpp"

using namespace logdecay;
using namespace ramoracle;

TEST(Filtration, Validation) {
  EXPECT_THROW(upper(4, {{2, 4}, {1, 2}}), InputError);
  EXPECT_THROW(upper(4, {{1, 4}, {2, 4}}), InputError);
  EXPECT_THROW(upper(4, {{1, 2}}), InputError);
  EXPECT_THROW(upper(6, {{1, 6}, {2, 4}}), InputError);
  EXPECT_THROW(upper(4, {}), InputError);
  EXPECT_NO_THROW(upper(1, {}));
  RamFiltration f = upper(4, {{1, 4}, {3, 2}});
  EXPECT_EQ(f.order_at(0), 4);
  EXPECT_EQ(f.order_at(1), 4);
  EXPECT_EQ(f.order_at(Rational(3, 2)), 2);
  EXPECT_EQ(f.order_at(3), 2);
  EXPECT_EQ(f.order_at(4), 1);
}

TEST(Herbrand, TwoBreaks) {
  Herbrand h = herbrand(upper(4, {{1, 4}, {3, 2}}));
  EXPECT_EQ(h.psi(3), Rational(5));
  EXPECT_EQ(h.phi(5), Rational(3));
}

TEST(Herbrand, SingleBreakIsIdentityBelowBreak) {
  Herbrand h = herbrand(upper(3, {{2, 3}}));
  for (Rational x : {Rational(0), Rational(1, 2), Rational(2)}) EXPECT_EQ(h.psi(x), x);
  EXPECT_EQ(h.psi(3), Rational(5));
}

TEST(Herbrand, TameBreakAtZero) {
  Herbrand h = herbrand(upper(6, {{0, 6}, {2, 3}}));
  EXPECT_EQ(h.psi(1), Rational(2));
  EXPECT_EQ(h.psi(2), Rational(4));
  EXPECT_EQ(h.psi(3), Rational(10));
}

TEST(Herbrand, InverseCompositionOnRandomFiltrations) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> n(0, 400), d(1, 7);
  for (int trial = 0; trial < 100; ++trial) {
    long p = trial % 2 ? 3 : 2;
    RamFiltration f = random_filtration(rng, p);
    if (trial % 3 == 0) f = convert_numbering(f);
    Herbrand h = herbrand(f);
    for (int k = 0; k < 10; ++k) {
      Rational x(n(rng), d(rng));
      EXPECT_EQ(h.phi(h.psi(x)), x);
      EXPECT_EQ(h.psi(h.phi(x)), x);
    }
    EXPECT_EQ(compose(h.phi, h.psi), PiecewiseLinear());
    RamFiltration up = as_numbering(f, Numbering::upper);
    EXPECT_EQ(herbrand(up).psi(up.top_break()), as_numbering(f, Numbering::lower).top_break());
  }
}

TEST(ConvertNumbering, CyclicOracle) {
  RamFiltration low = convert_numbering(cyclic_upper(2, {1, 2}));
  EXPECT_EQ(low.numbering, Numbering::lower);
  EXPECT_EQ(low.breaks, (std::vector<Rational>{1, 3}));
  EXPECT_EQ(low.orders, (std::vector<long>{4, 2, 1}));
  // l_{i+1} = l_i + p^i (u_{i+1} - u_i) on every admissible Z/p^3 sequence.
  for (long p : {2, 3}) {
    std::vector<long> cur;
    admissible_sequences(p, 3, ipow64(p, 4), cur, [&](const std::vector<long>& u) {
      RamFiltration l = convert_numbering(cyclic_upper(p, u));
      Rational want = u[0];
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (i > 0) want += Rational(ipow64(p, static_cast<int>(i))) * (u[i] - u[i - 1]);
        EXPECT_EQ(l.breaks[i], want);
      }
    });
  }
}

TEST(ConvertNumbering, SingleBreakUnchangedAndRoundTrip) {
  RamFiltration f = upper(5, {{Rational(7, 2), 5}});
  EXPECT_EQ(convert_numbering(f).breaks, f.breaks);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    RamFiltration g = random_filtration(rng, trial % 2 ? 2 : 3);
    EXPECT_EQ(convert_numbering(convert_numbering(g)), g);
    RamFiltration lo = convert_numbering(g);
    EXPECT_EQ(convert_numbering(convert_numbering(lo)), lo);
  }
}

TEST(Different, Examples) {
  EXPECT_EQ(different(lower(3, {{2, 3}})), 6);
  EXPECT_EQ(different(lower(4, {{1, 4}, {3, 2}})), 8);
  EXPECT_EQ(different(lower(1, {})), 0);
  EXPECT_EQ(different(cyclic_upper(2, {1, 2})), 8);
  EXPECT_THROW(different(lower(3, {{Rational(3, 2), 3}})), InputError);
}

TEST(Different, AgreesWithIntegralForm) {
  for (long p : {2, 3}) {
    for (int n = 1; n <= 3; ++n) {
      std::vector<long> cur;
      admissible_sequences(p, n, ipow64(p, 4), cur, [&](const std::vector<long>& u) {
        RamFiltration l = convert_numbering(cyclic_upper(p, u));
        EXPECT_EQ(different(l), different_by_integral(l));
        EXPECT_EQ(different(l), different_by_loop(l));
      });
    }
  }
}

TEST(BoundChecks, UpperBreakAndDifferentOnSingleBreak) {
  BoundReport rep = bound_checks(lower(3, {{2, 3}}));
  ASSERT_TRUE(rep.delta.has_value());
  EXPECT_EQ(*rep.delta, 6);
  bool seen = false;
  for (const auto& r : rep.rows) {
    if (r.name != "upper_break_and_different") continue;
    seen = true;
    EXPECT_EQ(r.lhs, Rational(2, 3));
    EXPECT_EQ(r.rhs, Rational(2));
    EXPECT_TRUE(r.holds);
  }
  EXPECT_TRUE(seen);
  EXPECT_TRUE(rep.all_hold());
}

TEST(BoundChecks, DifferentIdentityIsOffByConstant) {
  // delta/|G| - (mu - lambda/|G|) = (|G| - 1)/|G| on a single break.
  for (long p : {2, 3, 5}) {
    for (long s : {1, 2, 4, 7}) {
      if (s % p == 0) continue;
      BoundReport rep = bound_checks(lower(p, {{s, p}}));
      for (const auto& r : rep.rows) {
        if (r.name != "different_and_breaks") continue;
        EXPECT_FALSE(r.asserted);
        EXPECT_EQ(r.lhs - r.rhs, Rational(p - 1, p));
      }
    }
  }
}

TEST(BoundChecks, BoundingUpperBreakOnQuotient) {
  RamFiltration L = cyclic_upper(2, {1, 2});
  RamFiltration K = quotient_filtration(L, 2);
  EXPECT_EQ(K.breaks, (std::vector<Rational>{1}));
  EXPECT_EQ(K.orders, (std::vector<long>{2, 1}));
  BoundReport rep = bound_checks(L, K);
  bool seen = false;
  for (const auto& r : rep.rows) {
    if (r.name != "bounding_upper_break") continue;
    seen = true;
    EXPECT_EQ(r.lhs, Rational(2));
    EXPECT_EQ(r.rhs, Rational(5, 2));
    EXPECT_TRUE(r.holds);
  }
  EXPECT_TRUE(seen);
  EXPECT_THROW(bound_checks(L, upper(2, {{2, 2}})), InputError);
}

TEST(BoundChecks, AllCyclicFiltrations) {
  int checked = 0;
  for (long p : {2, 3}) {
    for (int n = 1; n <= 3; ++n) {
      std::vector<long> cur;
      admissible_sequences(p, n, ipow64(p, 4), cur, [&](const std::vector<long>& u) {
        RamFiltration L = cyclic_upper(p, u);
        for (int j = 0; j < n; ++j) {
          std::optional<RamFiltration> K;
          if (j > 0) K = quotient_filtration(L, ipow64(p, n - j));
          BoundReport rep = bound_checks(L, K);
          ++checked;
          for (const auto& r : rep.rows)
            EXPECT_TRUE(!r.asserted || r.holds) << r.name << " u_1=" << u[0] << " n=" << n;
        }
      });
    }
  }
  EXPECT_GT(checked, 500);
}

TEST(BoundChecks, RandomFiltrations) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    RamFiltration f = random_filtration(rng, trial % 2 ? 2 : 3);
    BoundReport rep = bound_checks(f);
    for (const auto& r : rep.rows) EXPECT_TRUE(!r.asserted || r.holds) << r.name;
    // Grid {0, mu} always bounds lambda; the full break grid is exact.
    EXPECT_EQ(rep.rows[1].lhs, rep.rows[1].rhs);
  }
}

TEST(Herbrand, TransitivityInCyclicTowers) {
  for (long p : {2, 3}) {
    std::vector<long> cur;
    admissible_sequences(p, 2, ipow64(p, 4), cur, [&](const std::vector<long>& u) {
      RamFiltration L = cyclic_upper(p, u);
      RamFiltration K = quotient_filtration(L, p);                 // K/F
      RamFiltration H = subgroup_filtration(convert_numbering(L), p);  // L/K, lower
      PiecewiseLinear lhs = herbrand(L).phi;
      PiecewiseLinear rhs = compose(herbrand(K).phi, herbrand(H).phi);
      EXPECT_EQ(lhs, rhs) << lhs.str() << " vs " << rhs.str();
    });
  }
}

namespace {

ASExtension as_ext(long p, std::vector<std::pair<int, long>> terms, int M = 0) {
  const FieldSpec* k = FieldSpec::prime(p);
  PerfSeries f = PerfSeries::zero(k);
  long n = 0;
  for (auto [e, c] : terms) {
    f += PerfSeries::monomial(FqElem::from_int(k, c), e);
    n = std::max<long>(n, -e);
  }
  return {f, M ? M : static_cast<int>(8 * n * p)};
}

/// Row-reduced basis over F_p; add() reports whether v was independent.
struct SpanFp {
  long p;
  std::vector<std::vector<long>> rows;
  std::vector<std::size_t> pivots;

  std::vector<long> reduce(std::vector<long> v) const {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      long c = v[pivots[r]];
      if (!c) continue;
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = ((v[i] - c * rows[r][i]) % p + p) % p;
    }
    return v;
  }
  bool contains(const std::vector<long>& v) const {
    auto w = reduce(v);
    return std::all_of(w.begin(), w.end(), [](long x) { return x == 0; });
  }
  void add(const std::vector<long>& v) {
    auto w = reduce(v);
    std::size_t piv = 0;
    while (piv < w.size() && !w[piv]) ++piv;
    if (piv == w.size()) return;
    long inv = 1;
    for (long t = 1; t < p; ++t)
      if (w[piv] * t % p == 1) inv = t;
    for (auto& x : w) x = x * inv % p;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      long c = rows[r][piv];
      if (!c) continue;
      for (std::size_t i = 0; i < w.size(); ++i) rows[r][i] = ((rows[r][i] - c * w[i]) % p + p) % p;
    }
    rows.push_back(w);
    pivots.push_back(piv);
  }
};

/// Coefficients of T^0..T^{M-1} of each coordinate, shifted by T^e.
std::vector<long> flatten(const std::vector<PerfSeries>& c, int M, int e) {
  std::vector<long> v;
  for (const auto& s : c) {
    for (int m = 0; m < M; ++m) {
      FqElem x = s.coefficient(Rational(m - e));
      v.push_back(static_cast<long>(x.code()));
    }
  }
  return v;
}

/// Least e with T^e ker(trace) inside im(1 - g), by F_p linear algebra modulo T^M.
long torsion_oracle(const ASExtension& ext) {
  const long p = ext.p(), n = ext.pole_order();
  const int M = ext.M;
  const ASElem TL = as_uniformizer(ext);
  SpanFp im{p, {}, {}};
  ASElem power = TL;
  for (long i = 1; i < p; ++i) {
    auto e = (power.galois() - power).integral_coords();
    for (int m = 0; m < M; ++m) im.add(flatten(e, M, m));
    power = power * TL;
  }
  // Kernel of the trace in z-coordinates, using the coordinate of least trace valuation.
  std::vector<PerfSeries> t;
  for (long i = 0; i < p; ++i) {
    std::vector<PerfSeries> a(p, PerfSeries::zero(ext.field()));
    a[i] = PerfSeries::monomial(FqElem(ext.field(), 1), Rational(ceil(Rational(n * i, p))));
    t.push_back(ASElem(&ext, a).trace());
  }
  long j = 0;
  for (long i = 1; i < p; ++i)
    if (t[i].valuation() < t[j].valuation()) j = i;
  PerfSeries tj_inv = t[j].inv(ExtRational(M));
  std::vector<std::vector<PerfSeries>> ker;
  for (long i = 0; i < p; ++i) {
    if (i == j) continue;
    std::vector<PerfSeries> v(p, PerfSeries::zero(ext.field()));
    v[i] = PerfSeries::one(ext.field());
    v[j] = -(t[i] * tj_inv);
    ker.push_back(v);
  }
  for (int e = 0; e < M; ++e) {
    bool all = true;
    for (const auto& v : ker) all = all && im.contains(flatten(v, M, e));
    if (all) return e;
  }
  return -1;
}

}  // namespace

TEST(ArtinSchreier, Validation) {
  EXPECT_THROW(as_analyze(as_ext(3, {{-3, 1}})), InputError);
  EXPECT_THROW(as_analyze(as_ext(2, {{1, 1}})), InputError);
  EXPECT_THROW(as_analyze(as_ext(3, {{-1, 1}}, 4)), InputError);
}

TEST(ArtinSchreier, ThreeOverInverseT) {
  ASExtension ext = as_ext(3, {{-1, 1}});
  ASReport rep = as_analyze(ext);
  EXPECT_EQ(rep.break_lower, 1);
  EXPECT_EQ(rep.break_upper, 1);
  EXPECT_LE(rep.torsion_exponent, 1);
  EXPECT_TRUE(rep.torsion_within_bound);
  EXPECT_EQ(rep.torsion_exponent, torsion_oracle(ext));
}

TEST(ArtinSchreier, TwoOverInverseTCubed) {
  ASExtension ext = as_ext(2, {{-3, 1}});
  ASReport rep = as_analyze(ext);
  EXPECT_EQ(rep.break_lower, 3);
  // v_L(g(T_L) - T_L) = n + 1 with the classical indexing, so v_L(e_1) = n + 1.
  ASSERT_EQ(rep.e_valuations.size(), 1u);
  EXPECT_EQ(rep.e_valuations[0], Rational(4));
  EXPECT_EQ(rep.torsion_exponent, torsion_oracle(ext));
}

TEST(ArtinSchreier, BreakEqualsPoleOrder) {
  for (long p : {2, 3, 5}) {
    for (long n = 1; n <= 9; ++n) {
      if (n % p == 0) continue;
      // Lower-order terms, including ones at multiples of p, do not move the break.
      std::vector<std::pair<int, long>> f{{static_cast<int>(-n), 1}, {2, 1}};
      if (n > 1) f.emplace_back(-1, 1);
      ASExtension ext = as_ext(p, f);
      ASReport rep = as_analyze(ext);
      EXPECT_EQ(rep.break_lower, n) << "p=" << p << " n=" << n;
      EXPECT_EQ(rep.break_upper, n);
      for (long i = 1; i < p; ++i) EXPECT_EQ(rep.e_valuations[i - 1], Rational(n + i)) << "i=" << i;
      EXPECT_TRUE(rep.samples_hold);
      EXPECT_EQ(rep.samples.size(), 11u);
      EXPECT_TRUE(rep.torsion_within_bound) << "p=" << p << " n=" << n << " e=" << rep.torsion_exponent;
      EXPECT_LE(rep.torsion_exponent, ceil(Rational(n, p)));
    }
  }
}

TEST(ArtinSchreier, TorsionMatchesLinearAlgebraOracle) {
  for (auto [p, n] : std::vector<std::pair<long, long>>{{2, 1}, {2, 3}, {2, 5}, {3, 1}, {3, 2}, {3, 4}, {5, 3}}) {
    ASExtension ext = as_ext(p, {{static_cast<int>(-n), 1}});
    ASReport rep = as_analyze(ext);
    EXPECT_EQ(rep.torsion_exponent, torsion_oracle(ext)) << "p=" << p << " n=" << n;
  }
}

TEST(ArtinSchreier, DisplacementSamples) {
  ASReport rep = as_analyze(as_ext(3, {{-2, 1}}));
  for (const auto& s : rep.samples) {
    EXPECT_TRUE(s.holds) << "j=" << s.j;
    if (s.j == 0) {
      EXPECT_TRUE(s.v_diff.is_inf());
    } else if (s.j % 3 != 0) {
      EXPECT_EQ(s.v_diff, ExtRational(Rational(s.j + 2, 3)));
    }
  }
}

TEST(BoundChecks, UpperToLowerNeedsIntegralLowerBreaks) {
  BoundReport rep = bound_checks(upper(3, {{Rational(1, 3), 3}}));
  bool seen = false;
  for (const auto& r : rep.rows) {
    if (r.name != "upper_to_lower") continue;
    seen = true;
    EXPECT_FALSE(r.asserted);
    EXPECT_FALSE(r.holds);
  }
  EXPECT_TRUE(seen);
  EXPECT_TRUE(rep.all_hold());
  for (const auto& r : bound_checks(cyclic_upper(3, {1, 3})).rows) {
    if (r.name == "upper_to_lower") {
      EXPECT_TRUE(r.asserted && r.holds);
    }
  }
}
