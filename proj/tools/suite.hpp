#pragma once

// Property-suite runner: every invariant group runs on its own seeded stream,
// groups run concurrently, and the report lists them sorted by name. A
// violation is an inequality or identity that failed; the report is
// byte-identical for equal (seed, quick).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <future>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "logdecay/artin_schreier.hpp"
#include "logdecay/embed.hpp"
#include "logdecay/phinabla.hpp"
#include "logdecay/ramification.hpp"
#include "logdecay/towers.hpp"
#include "phinabla_inputs.hpp"
#include "random_inputs.hpp"

namespace logdecay::suite {

struct GroupResult {
  std::string name;
  long checks = 0;
  long violations = 0;
  std::vector<std::string> notes;  // first few violations, in check order

  void check(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    ++violations;
    if (notes.size() < 5) notes.push_back(what);
  }
};

struct Config {
  std::uint64_t seed = 1;
  bool quick = false;
  int threads = 4;
};

struct Report {
  std::vector<GroupResult> groups;

  long violations() const {
    long v = 0;
    for (const auto& g : groups) v += g.violations;
    return v;
  }
  bool ok() const { return violations() == 0; }

  std::string text() const {
    std::ostringstream os;
    os << "group,checks,violations\n";
    long c = 0;
    for (const auto& g : groups) {
      os << g.name << "," << g.checks << "," << g.violations << "\n";
      c += g.checks;
    }
    os << "total," << c << "," << violations() << "\n";
    for (const auto& g : groups)
      for (const auto& n : g.notes) os << "violation," << g.name << "," << n << "\n";
    return os.str();
  }
};

namespace detail {

inline std::uint64_t stream_seed(std::uint64_t seed, const std::string& name) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : name) h = (h ^ c) * 1099511628211ULL;
  return h ^ (seed * 0x9E3779B97F4A7C15ULL);
}

inline const FieldSpec* F(long p) { return FieldSpec::prime(p); }

// Perfect Laurent series: commutative ring axioms, Frobenius round trip, valuation rules.
inline void coeffcore(GroupResult& g, std::mt19937_64& rng, bool quick) {
  const int trials = quick ? 40 : 200;
  for (int t = 0; t < trials; ++t) {
    const long p = std::vector<long>{2, 3, 5}[t % 3];
    auto gen = [&] { return testgen::random_series(rng, F(p), 4, -3, 4, 2, false); };
    PerfSeries a = gen(), b = gen(), c = gen();
    g.check(a + b == b + a && a * b == b * a, "commutativity");
    g.check((a + b) + c == a + (b + c) && (a * b) * c == a * (b * c), "associativity");
    g.check(a * (b + c) == a * b + a * c, "distributivity");
    g.check(a.frob_pow(-1).frob_pow(1) == a && a.frob_pow(1).frob_pow(-1) == a, "frobenius round trip");
    g.check((a * b).valuation() == a.valuation() + b.valuation(), "v(ab) = v(a) + v(b)");
    ExtRational m = min(a.valuation(), b.valuation());
    g.check(!((a + b).valuation() < m), "v(a+b) >= min");
    if (!(a.valuation() == b.valuation())) g.check((a + b).valuation() == m, "v(a+b) = min when distinct");
  }
}

// Partial valuations of sums and products, with equality on a unique minimum.
inline void witt_inequalities(GroupResult& g, std::mt19937_64& rng, bool quick) {
  const int trials = quick ? 100 : 1000;
  for (int t = 0; t < trials; ++t) {
    const long p = std::vector<long>{2, 3, 5}[t % 3];
    WittElem x = testgen::random_witt(rng, F(p), 3, 4, -3, 3, 1, false);
    WittElem y = testgen::random_witt(rng, F(p), 3, 4, -3, 3, 1, false);
    WittElem s = witt_add(x, y), m = witt_mul(x, y);
    for (int k = 0; k < 3; ++k) {
      ExtRational wx = witt_partial_valuation(x, k), wy = witt_partial_valuation(y, k);
      g.check(!(witt_partial_valuation(s, k) < min(wx, wy)), "w_k(x+y) >= min");
      if (!(wx == wy)) g.check(witt_partial_valuation(s, k) == min(wx, wy), "w_k(x+y) = min on unique minimum");
      ExtRational bound = ExtRational::infinity();
      int attained = 0;
      for (int i = 0; i <= k; ++i)
        for (int j = 0; i + j <= k; ++j) {
          ExtRational b = witt_partial_valuation(x, i) + witt_partial_valuation(y, j);
          if (b < bound) {
            bound = b;
            attained = 1;
          } else if (b == bound) {
            ++attained;
          }
        }
      g.check(!(witt_partial_valuation(m, k) < bound), "w_k(xy) >= min_{i+j<=k}");
      if (attained == 1) g.check(witt_partial_valuation(m, k) == bound, "w_k(xy) equality on unique minimum");
    }
  }
}

/// A random member of A^{r,c} with slice 0 integral; c is its least constant.
inline WittElem integral_member(std::mt19937_64& rng, long p) {
  auto s = testgen::random_slices(rng, F(p), 4, 3, -6, 3, 0, false);
  PerfSeries pos = PerfSeries::zero(F(p));
  for (auto& [e, c] : s[0].terms())
    if (e >= 0) pos += PerfSeries::monomial(c, e);
  s[0] = pos;
  return WittElem(0, s);
}

// Closure of A^{r,c} under products; Frobenius maps A^{r,c} onto A^{r,pc}.
inline void witt_subrings(GroupResult& g, std::mt19937_64& rng, bool quick) {
  const int trials = quick ? 40 : 200;
  const std::vector<std::pair<long, Rational>> cases{{2, 1}, {3, 1}, {2, 2}};
  for (const auto& [p, r] : cases) {
    for (int t = 0; t < trials; ++t) {
      WittElem x = integral_member(rng, p), y = integral_member(rng, p);
      const Rational c = std::max({arc_least_c(x, r)->hi, arc_least_c(y, r)->hi, Rational(1)});
      auto member = [&](const WittElem& z, const Rational& cc) {
        return growth_membership(z, GrowthQuery::Arc(r, cc)).verdict == Verdict::member;
      };
      g.check(member(x, c) && member(y, c), "generated members");
      g.check(member(witt_mul(x, y), c), "product closure");
      WittElem fx = witt_frobenius(x, 1);
      g.check(member(fx, p * c), "Frob: A^{r,c} -> A^{r,pc}");
      g.check(member(witt_frobenius(fx, -1), c) && witt_frobenius(fx, -1) == x, "Frob^{-1}: A^{r,pc} -> A^{r,c}");
    }
  }
}

// Naive partial valuations of sums and products in E; inverses of units.
inline void growth_series(GroupResult& g, std::mt19937_64& rng, bool quick) {
  const int trials = quick ? 40 : 200;
  for (int t = 0; t < trials; ++t) {
    const long p = t % 2 ? 3 : 2;
    const RingSpec* r = RingSpec::get(F(p), 3);
    GrowthSeries f = testgen::random_laurent(rng, r, -4, 4, 3) + testgen::random_laurent(rng, r, -9, -1, 2, 1);
    GrowthSeries h = testgen::random_laurent(rng, r, -4, 4, 3) + testgen::random_laurent(rng, r, -9, -1, 2, 1);
    if (f.is_zero() || h.is_zero() || f.p_shift() || h.p_shift()) continue;
    GrowthSeries s = f + h, m = f * h;
    for (int n = 0; n < 3; ++n) {
      g.check(!(naive_partial_valuation(s, n) < min(naive_partial_valuation(f, n), naive_partial_valuation(h, n))),
              "v_n(f+g) >= min");
      ExtRational bound = ExtRational::infinity();
      for (int i = 0; i <= n; ++i)
        bound = min(bound, naive_partial_valuation(f, i) + naive_partial_valuation(h, n - i));
      g.check(m.p_shift() > 0 || !(naive_partial_valuation(m, n) < bound), "v_n(fg) >= min_{i+k=n}");
    }
    GrowthSeries u = GrowthSeries::one(r) + testgen::random_laurent(rng, r, -4, 4, 3, 1);
    GrowthSeries ui = series_inv(u, 48);
    GrowthSeries e = u * ui - GrowthSeries::one(r);
    bool small = true;
    for (const auto& [x, c] : e.terms()) small = small && x >= 40;
    g.check(small, "u * u^{-1} = 1 below the cutoff");
  }
}

// Frobenius-equivariant embedding of T for the three standard lifts.
inline void embedding(GroupResult& g, std::mt19937_64&, bool quick) {
  const int N = quick ? 3 : 4;
  for (long p : {2, 3}) {
    const auto* f = F(p);
    const RingSpec* r = RingSpec::get(f, N);
    EmbedResult a = solve_frobenius_embed(GrowthSeries::monomial(r, 1, p), N);
    g.check(a.residual_zero && a.slices == WittElem::teichmuller(PerfSeries::monomial(FqElem(f, 1), 1), N),
            "sigma = T^p gives [T]");
    GrowthSeries x = GrowthSeries::from_ints(f, N, {{0, 1}, {1, 1}});
    EmbedResult b = solve_frobenius_embed(series_pow(x, p) - GrowthSeries::one(r), N);
    WittElem want = witt_sub(WittElem::teichmuller(PerfSeries::one(f) + PerfSeries::monomial(FqElem(f, 1), 1), N),
                             WittElem::from_int(f, 1, N));
    g.check(b.residual_zero && b.slices == want, "sigma = (1+T)^p - 1 gives [1+T] - 1");
    GrowthSeries P = GrowthSeries::from_ints(f, N, {{1, p}, {p, 1}});
    EmbedResult c = solve_frobenius_embed(P, N);
    g.check(c.residual_zero, "sigma = T^p + pT residual");
    for (Rational rr : {Rational(1), Rational(2)}) {
      Rational d = embedding_lemma_bound(P, rr).d_min + Rational(1, 1000);
      g.check(growth_membership(c.slices, GrowthQuery::Arc(rr, d)).verdict == Verdict::member,
              "sigma = T^p + pT in A^{r,d}");
    }
  }
}

// Membership in A^{r,c} of the embedded series agrees with the naive condition.
inline void witt_naive(GroupResult& g, std::mt19937_64& rng, bool quick) {
  const int trials = quick ? 10 : 50;
  const int N = 4;
  for (long p : {2, 3}) {
    const RingSpec* ring = RingSpec::get(F(p), N);
    GrowthSeries x = GrowthSeries::from_ints(F(p), N, {{0, 1}, {1, 1}});
    for (const GrowthSeries& P : {GrowthSeries::monomial(ring, 1, p), series_pow(x, p) - GrowthSeries::one(ring)}) {
      EmbedResult sigma = solve_frobenius_embed(P, N);
      const Rational r = 1;
      const Rational c = std::max(Rational(1), Rational(ceil(embedding_constant(sigma.v, r).hi)));
      for (int t = 0; t < trials; ++t) {
        GrowthSeries f = GrowthSeries::zero(ring);
        for (int n = 0; n < N; ++n) {
          Rational edge = c - c * Rational(ipow64(p, n));
          std::uniform_int_distribution<int> d(-1, 2);
          std::int64_t a = static_cast<std::int64_t>(floor(edge)) + d(rng);
          if (n == 0) a = std::max<std::int64_t>(a, -1);
          std::uniform_int_distribution<long long> u(1, p - 1);
          f = f + GrowthSeries::monomial(ring, u(rng) * ipow64(p, n), a);
          f = f + GrowthSeries::monomial(ring, u(rng) * ipow64(p, n), a + 1);
        }
        CompareReport rep = witt_naive_compare(f, r, c, sigma);
        g.check(rep.agree, "verdicts agree for " + f.str());
      }
    }
  }
}

// Period matrices obey w_n(A) >= w_n(C)/(p-1); polynomial descent of transition matrices.
inline void period_growth(GroupResult& g, std::mt19937_64& rng, bool quick) {
  const int cases = quick ? 10 : 50;
  for (int i = 0; i < cases; ++i) {
    const long p = i % 2 ? 3 : 2;
    testgen::Rank1Case c = testgen::rank1_case(rng, p, 3, i);
    EmbedResult s = solve_frobenius_embed(c.P, 3);
    PeriodMatrix A = trivialize_phi({{c.C}}, s, 3);
    PeriodGrowthReport rep = verify_period_growth(A.A, embed_matrix({{c.C}}, s, 3));
    g.check(rep.verdict == Verdict::member, "period growth for " + c.kind + " " + c.C.str());
  }
  const int mats = quick ? 20 : 100;
  for (int i = 0; i < mats; ++i) {
    const long p = i % 2 ? 3 : 2;
    SeriesMatrix L = testgen::random_transition(rng, p, 3, 1 + (i / 2) % 2);
    PolynomialDescent D = descend_to_polynomial(L, 3, 24);
    bool stages = std::all_of(D.stage_polynomial.begin(), D.stage_polynomial.end(), [](bool b) { return b; });
    g.check(D.BL_polynomial && D.B_invertible && stages, "descent to Laurent polynomials");
  }
}

inline RamFiltration cyclic_upper(long p, const std::vector<long>& u) {
  return cyclic_filtration(p, u, static_cast<int>(u.size()));
}

/// Admissible upper breaks of Z/p^n: u_1 prime to p, u_{i+1} >= p u_i, prime to p unless equal to p u_i.
inline void admissible(long p, int n, long limit, std::vector<long>& cur,
                       const std::function<void(const std::vector<long>&)>& visit) {
  if (static_cast<int>(cur.size()) == n) {
    visit(cur);
    return;
  }
  for (long u = cur.empty() ? 1 : p * cur.back(); u <= limit; ++u) {
    if (u % p == 0 && !(!cur.empty() && u == p * cur.back())) continue;
    cur.push_back(u);
    admissible(p, n, limit, cur, visit);
    cur.pop_back();
  }
}

inline void check_bounds(GroupResult& g, const RamFiltration& L, const std::optional<RamFiltration>& K) {
  BoundReport rep = bound_checks(L, K);
  for (const auto& r : rep.rows)
    if (r.asserted) g.check(r.holds, r.name + " lhs=" + to_string(r.lhs) + " rhs=" + to_string(r.rhs));
}

// Herbrand functions, numbering conversion and the break/different inequalities.
inline void ramification(GroupResult& g, std::mt19937_64& rng, bool quick) {
  for (long p : {2, 3}) {
    for (int n = 1; n <= 3; ++n) {
      std::vector<long> cur;
      admissible(p, n, ipow64(p, quick ? 3 : 4), cur, [&](const std::vector<long>& u) {
        RamFiltration L = cyclic_upper(p, u);
        Herbrand h = herbrand(L);
        g.check(compose(h.phi, h.psi) == PiecewiseLinear(), "phi o psi = id");
        g.check(convert_numbering(convert_numbering(L)) == L, "numbering round trip");
        for (int j = 0; j < n; ++j) {
          std::optional<RamFiltration> K;
          if (j > 0) K = quotient_filtration(L, ipow64(p, n - j));
          check_bounds(g, L, K);
        }
        if (n == 2) {
          RamFiltration K = quotient_filtration(L, p);
          RamFiltration H = subgroup_filtration(convert_numbering(L), p);
          g.check(h.phi == compose(herbrand(K).phi, herbrand(H).phi), "transitivity of phi");
        }
      });
    }
  }
  std::uniform_int_distribution<int> len(1, 3), drop(1, 2), num(1, 30), den(1, 4);
  const int trials = quick ? 50 : 200;
  for (int t = 0; t < trials; ++t) {
    const long p = t % 2 ? 2 : 3;
    const int k = len(rng);
    std::vector<int> exps{0};
    for (int i = 0; i < k; ++i) exps.push_back(exps.back() + drop(rng));
    std::vector<std::pair<Rational, long>> steps;
    Rational s = 0;
    for (int i = 0; i < k; ++i) {
      s += Rational(num(rng), den(rng));
      steps.emplace_back(s, ipow64(p, exps.back() - exps[i]));
    }
    RamFiltration f = RamFiltration::from_steps(Numbering::upper, ipow64(p, exps.back()), steps);
    Herbrand h = herbrand(f);
    g.check(compose(h.phi, h.psi) == PiecewiseLinear() && compose(h.psi, h.phi) == PiecewiseLinear(),
            "phi o psi = psi o phi = id");
    check_bounds(g, f, std::nullopt);
  }
}

// Artin-Schreier extensions y^p - y = T^{-n}: break, cohomology torsion, displacement.
inline void artin_schreier(GroupResult& g, std::mt19937_64&, bool) {
  for (auto [p, n] : std::vector<std::pair<long, long>>{{2, 1}, {2, 3}, {3, 1}, {3, 2}}) {
    const FieldSpec* k = F(p);
    ASExtension ext{PerfSeries::monomial(FqElem(k, 1), Rational(-n)), 64};
    ASReport rep = as_analyze(ext);
    const std::string tag = " p=" + std::to_string(p) + " n=" + std::to_string(n);
    g.check(rep.break_lower == n, "break equals pole order" + tag);
    g.check(rep.torsion_within_bound, "torsion exponent within bound" + tag);
    for (const auto& s : rep.samples) g.check(s.holds, "v(x - gx) >= v(x) + (lambda-1)/p" + tag);
  }
}

// Tower genera, mu_n / p^{d^2} <= delta_n / d_n at every level, and the growth equivalence.
inline void towers(GroupResult& g, std::mt19937_64& rng, bool quick) {
  const int seeds = quick ? 3 : 10;
  std::uniform_int_distribution<std::uint64_t> draw;
  for (long p : {2, 3}) {
    for (Rational r : {Rational(1), Rational(2)}) {
      for (int i = 0; i < seeds; ++i) {
        TowerSpec s = generate_tower(p, r, 2, 10, draw(rng), static_cast<long>(i % 3));
        for (const auto& lv : genus_sequence(s))
          g.check(lv.g >= 0 && 2 * lv.g - 2 == lv.d * (2 * s.g0 - 2) + lv.delta_sum, "Riemann-Hurwitz exact");
        auto levels = tower_ramification(s);
        for (int n = 1; n <= s.n_max; ++n) {
          const auto& pt = levels[n].points[0];
          g.check(pt.mu / Rational(ipow64(p, s.rep_dim * s.rep_dim)) <= Rational(pt.delta) / Rational(levels[n].d),
                  "mu_n / p^{d^2} <= delta_n / d_n");
        }
        GrowthVerdict v = classify_rlog(s, r);
        g.check(v.forward_implication && v.backward_implication, "mu and delta/d growth imply each other");
        std::vector<Rational> mu;
        for (long u : s.branch_points[0]) mu.push_back(u);
        g.check(rep_profile_check(mu, p, r, s.rep_dim).least_c.has_value(), "Rep^r constant exists");
      }
    }
  }
}

struct Group {
  const char* name;
  void (*run)(GroupResult&, std::mt19937_64&, bool);
};

inline const std::vector<Group>& groups() {
  static const std::vector<Group> g{
      {"artin_schreier", artin_schreier}, {"coeffcore", coeffcore},         {"embedding", embedding},
      {"growth_series", growth_series},   {"period_growth", period_growth}, {"ramification", ramification},
      {"towers", towers},                 {"witt_inequalities", witt_inequalities},
      {"witt_naive", witt_naive},         {"witt_subrings", witt_subrings},
  };
  return g;
}

}  // namespace detail

inline GroupResult run_group(const detail::Group& grp, const Config& cfg) {
  GroupResult res;
  res.name = grp.name;
  std::mt19937_64 rng(detail::stream_seed(cfg.seed, res.name));
  try {
    grp.run(res, rng, cfg.quick);
  } catch (const std::exception& e) {
    ++res.violations;
    res.notes.push_back(std::string("aborted: ") + e.what());
  }
  return res;
}

/// Runs every group; results are ordered by group name whatever the scheduling.
inline Report run(const Config& cfg) {
  const auto& gs = detail::groups();
  std::vector<GroupResult> out(gs.size());
  std::size_t next = 0;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next == gs.size()) return;
        i = next++;
      }
      out[i] = run_group(gs[i], cfg);
    }
  };
  std::vector<std::future<void>> fs;
  for (int t = 0; t < std::max(1, cfg.threads); ++t) fs.push_back(std::async(std::launch::async, worker));
  for (auto& f : fs) f.get();
  std::sort(out.begin(), out.end(), [](const GroupResult& a, const GroupResult& b) { return a.name < b.name; });
  return {out};
}

}  // namespace logdecay::suite
