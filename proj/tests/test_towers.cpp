#include <gtest/gtest.h>

#include "logdecay/towers.hpp"

using namespace logdecay;

namespace {

TowerSpec one_point(long p, std::vector<long> u, long g0 = 0) {
  TowerSpec s;
  s.p = p;
  s.n_max = static_cast<int>(u.size());
  s.branch_points = {u};
  s.g0 = g0;
  return s;
}

/// Lower breaks l_{i+1} = l_i + p^i (u_{i+1} - u_i), then the different by segments.
BigInt cyclic_different_oracle(long p, const std::vector<long>& u) {
  std::vector<BigInt> l{u[0]};
  for (std::size_t i = 1; i < u.size(); ++i)
    l.push_back(l.back() + ipow(BigInt(p), i) * (u[i] - u[i - 1]));
  BigInt delta = 0, prev = -1, order = ipow(BigInt(p), u.size());
  for (const auto& s : l) {
    delta += (s - prev) * (order - 1);
    prev = s;
    order /= p;
  }
  return delta;
}

}  // namespace

TEST(TowerRamification, Examples) {
  auto lv = tower_ramification(one_point(2, {1, 2}));
  ASSERT_EQ(lv.size(), 3u);
  EXPECT_EQ(lv[2].points[0].lower_breaks, (std::vector<Rational>{1, 3}));
  EXPECT_EQ(lv[2].points[0].delta, 8);
  EXPECT_EQ(lv[2].points[0].mu, Rational(2));
  EXPECT_EQ(lv[2].points[0].lambda, Rational(3));

  auto lv3 = tower_ramification(one_point(3, {1, 3}));
  EXPECT_EQ(lv3[2].points[0].lower_breaks, (std::vector<Rational>{1, 7}));
  EXPECT_EQ(lv3[2].points[0].delta, cyclic_different_oracle(3, {1, 3}));

  for (long p : {2, 3, 5})
    for (long u1 : {1, 2, 4})
      EXPECT_EQ(tower_ramification(one_point(p, {u1}))[1].points[0].delta, (u1 + 1) * (p - 1));
}

TEST(TowerRamification, RejectsInadmissible) {
  EXPECT_THROW(tower_ramification(one_point(2, {3, 3})), InputError);
  EXPECT_THROW(tower_ramification(one_point(3, {2, 5})), InputError);
  EXPECT_THROW(tower_ramification(one_point(2, {0, 1})), InputError);
}

TEST(TowerRamification, DifferentMatchesOracleOnGeneratedTowers) {
  for (long p : {2, 3}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      TowerSpec s = generate_tower(p, 1, 3, 8, seed);
      auto lv = tower_ramification(s);
      const auto& u = s.branch_points[0];
      for (int n = 1; n <= s.n_max; ++n)
        EXPECT_EQ(lv[n].points[0].delta, cyclic_different_oracle(p, std::vector<long>(u.begin(), u.begin() + n)));
    }
  }
}

TEST(GenusSequence, Examples) {
  auto g = genus_sequence(one_point(2, {1, 2}));
  EXPECT_EQ(g[0].g, 0);
  EXPECT_EQ(g[2].g, 1);
  EXPECT_EQ(g[2].delta_sum, 8);

  TowerSpec etale;
  etale.p = 3;
  etale.n_max = 4;
  etale.g0 = 1;
  for (const auto& lv : genus_sequence(etale)) EXPECT_EQ(lv.g, 1);

  TowerSpec base = one_point(3, {2, 7}, 5);
  base.n_max = 0;
  EXPECT_EQ(genus_sequence(base)[0].g, 5);
}

TEST(GenusSequence, PrintedFormIsReportedAlongside) {
  // The printed relation g - 2 = d (g_0 - 2) + sum delta gives 2 - 8 + 8 = 2 at
  // level 2 of the p = 2, u = (1, 2) tower, where the standard form gives 1.
  auto g = genus_sequence(one_point(2, {1, 2}));
  EXPECT_EQ(g[2].g_printed, 2);
  EXPECT_EQ(g[2].ratio_printed, Rational(-2) + Rational(8, 4) + Rational(2, 4));
  // Etale over an elliptic base: the printed form gives g_n = 2 - d_n, not 1.
  TowerSpec etale;
  etale.p = 2;
  etale.n_max = 3;
  etale.g0 = 1;
  EXPECT_EQ(genus_sequence(etale)[3].g_printed, -6);
}

TEST(GenusSequence, RiemannHurwitzIsExact) {
  for (long p : {2, 3}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      TowerSpec s = generate_tower(p, seed % 2 ? 1 : 2, 2, 10, seed, static_cast<long>(seed % 3));
      s.branch_points.push_back(generate_tower(p, 1, 1, 10, seed + 100).branch_points[0]);
      for (const auto& lv : genus_sequence(s)) {
        EXPECT_GE(lv.g, 0);
        EXPECT_EQ(2 * lv.g - 2, lv.d * (2 * s.g0 - 2) + lv.delta_sum);
      }
    }
  }
}

TEST(ClassifyRlog, PowersOfP) {
  // For p = 2 the breaks 2^n are not realizable: 2g - 2 comes out odd.
  EXPECT_THROW(classify_rlog(one_point(2, {2, 4, 8, 16}), 1), InputError);
  for (long p : {3, 5}) {
    std::vector<long> u;
    for (int n = 1; n <= 10; ++n) u.push_back(ipow64(p, n));
    GrowthVerdict v = classify_rlog(one_point(p, u), 1);
    EXPECT_GE(v.delta.r_hat_max, 1 - 1.0 / 10);
    EXPECT_LE(v.delta.r_hat_max, 1 + 1e-9);
    EXPECT_EQ(v.mu.witness, PowRat(1, 0, p));
    EXPECT_EQ(v.mu.exponent_class, 1);
    EXPECT_TRUE(v.classes_agree);
    EXPECT_TRUE(v.forward_implication);
    EXPECT_TRUE(v.backward_implication);
  }
}

TEST(ClassifyRlog, LogFactorRaisesWitness) {
  // u_n = n p^n: witnesses against p^n grow with the horizon, against p^{3n/2} they do not.
  const long p = 3;
  Rational prev_w1 = 0;
  for (int horizon : {6, 8, 10}) {
    std::vector<long> u;
    for (int n = 1; n <= horizon; ++n) u.push_back(n * ipow64(p, n));
    TowerSpec s = one_point(p, u);
    GrowthVerdict v1 = classify_rlog(s, 1);
    EXPECT_EQ(v1.mu.witness, PowRat(horizon, 0, p));
    EXPECT_GT(v1.mu.witness.q, prev_w1);
    prev_w1 = v1.mu.witness.q;
    GrowthVerdict v2 = classify_rlog(s, Rational(3, 2));
    EXPECT_LE(compare(v2.mu.witness, Rational(2)), 0);
  }
}

TEST(ClassifyRlog, RequiresHorizon) { EXPECT_THROW(classify_rlog(one_point(2, {1, 2}), 1), InputError); }

TEST(RepProfile, Examples) {
  std::vector<Rational> mu;
  for (int n = 1; n <= 8; ++n) mu.push_back(Rational(ipow64(2, n - 1)));
  RepProfile rp = rep_profile_check(mu, 2, 1, 1, Rational(1));
  ASSERT_TRUE(rp.least_c.has_value());
  EXPECT_EQ(*rp.least_c, PowRat(1, 0, 2));
  EXPECT_TRUE(rp.c0_exact);
  EXPECT_EQ(rp.c0_lower, Rational(4));
  EXPECT_EQ(rp.propagated.size(), mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) EXPECT_GE(rp.propagated[i], mu[i].convert_to<double>());
}

TEST(RepProfile, GrowthFasterThanR) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    TowerSpec s = generate_tower(2, 2, 1, 10, seed);
    std::vector<Rational> mu;
    for (long u : s.branch_points[0]) mu.push_back(u);
    RepProfile r1 = rep_profile_check(mu, 2, 1, 1);
    RepProfile r2 = rep_profile_check(mu, 2, 2, 1);
    // Against p^{n}: the least c grows like p^{n} at the horizon; against p^{2n} it stays below c p^2.
    EXPECT_GT(compare(*r1.least_c, Rational(100)), 0);
    EXPECT_LE(compare(*r2.least_c, Rational(8)), 0);
  }
}

TEST(RepProfile, AgreesWithClassifier) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    TowerSpec s = generate_tower(3, 1, 2, 6, seed);
    GrowthVerdict v = classify_rlog(s, 1);
    std::vector<Rational> mu;
    for (long u : s.branch_points[0]) mu.push_back(u);
    RepProfile rp = rep_profile_check(mu, 3, 1, 1);
    // mu_{n+1} <= p^{nr} c  is  mu_m <= p^{mr} (c / p^r).
    EXPECT_EQ(*rp.least_c, PowRat(v.mu.witness.q, v.mu.witness.e + 1, 3));
  }
}

TEST(GenerateTower, Examples) {
  // r = 1, c = 1, p = 2: the only admissible breaks prime to 2 are 2^n - 1.
  TowerSpec s = generate_tower(2, 1, 1, 8, 3);
  for (int n = 1; n <= 8; ++n) EXPECT_EQ(s.branch_points[0][n - 1], ipow64(2, n) - 1);

  TowerSpec t = generate_tower(2, 2, 1, 10, 7);
  EXPECT_NO_THROW(t.validate());
  GrowthVerdict v = classify_rlog(t, 2);
  EXPECT_LE(compare(v.mu.witness, Rational(1)), 0);
  EXPECT_EQ(v.mu.exponent_class, 2);

  TowerSpec z = generate_tower(3, 0, 1, 5, 1);
  EXPECT_EQ(z.branch_points[0], (std::vector<long>{1, 3, 9, 27, 81}));
  EXPECT_THROW(generate_tower(2, 1, Rational(1, 2), 4, 1), InputError);
}

TEST(GenerateTower, Deterministic) {
  EXPECT_EQ(generate_tower(3, 2, 2, 10, 42).branch_points, generate_tower(3, 2, 2, 10, 42).branch_points);
}

TEST(Towers, MuBoundedByDifferentPerDegree) {
  // mu_n / p^{d^2} <= delta_n / d_n, using |G^mu| <= p^{d^2}.
  for (long p : {2, 3}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      TowerSpec s = generate_tower(p, 2, 1, 10, seed);
      auto lv = tower_ramification(s);
      for (int n = 1; n <= s.n_max; ++n) {
        const auto& pt = lv[n].points[0];
        EXPECT_LE(pt.mu / Rational(ipow64(p, s.rep_dim * s.rep_dim)), Rational(pt.delta) / Rational(lv[n].d));
      }
    }
  }
}
