#pragma once

// The Frobenius-compatible embedding i_sigma: E -> W(F^perf)[1/p]. The image v
// of T solves Frob(v) = P(v) with P = sigma(T); a series f maps to f(v).

#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "growth.hpp"
#include "lifted.hpp"
#include "witt.hpp"

namespace logdecay {

/// sum_i a_i v^i for the terms of f, computed in the lifted ring with n levels.
/// Negative powers use the inverse of v, known below inv_cutoff.
inline detail::Lifted evaluate_at(const GrowthSeries& f, const detail::Lifted& v, int n,
                                  const ExtRational& inv_cutoff = ExtRational(Rational(kDefaultInverseCutoff))) {
  if (!f.is_exact()) throw PrecisionExhausted("embedding needs an exactly known series");
  const RingSpec* r = RingSpec::get(f.field(), n);
  detail::Lifted vn = v.with_levels(n);
  detail::Lifted acc(r);
  std::vector<GrowthSeries::Term> negatives, positives;
  const detail::Lifted body = f.body().with_levels(n);
  for (const auto& t : body.terms()) (t.first < 0 ? negatives : positives).push_back(t);
  detail::Lifted pw = detail::Lifted::from_int(r, 1);
  std::int64_t e = 0;
  for (const auto& [k, c] : positives) {
    for (; e < k; ++e) pw = pw * vn;
    acc += pw.scale_by(c);
  }
  if (!negatives.empty()) {
    detail::Lifted vinv = vn.inv(inv_cutoff);
    pw = detail::Lifted::from_int(r, 1);
    e = 0;
    for (auto it = negatives.rbegin(); it != negatives.rend(); ++it) {
      for (; e > it->first; --e) pw = pw * vinv;
      acc += pw.scale_by(it->second);
    }
  }
  return acc;
}

struct EmbedResult {
  GrowthSeries image;        // P = sigma(T)
  detail::Lifted v;          // image of T in the lifted ring
  WittElem slices;           // its Teichmuller expansion
  int iterations = 0;
  bool residual_zero = false;
  std::string residual;      // Frob(v) - P(v), printed
};

/// Check that P reduces to T^p modulo p.
inline void check_frobenius_lift(const GrowthSeries& P) {
  if (P.p_shift() != 0) throw InputError("Frobenius image must be integral");
  const auto& cuts = P.cuts();
  if (cuts[0] != detail::kInfExp && cuts[0] <= P.p()) throw PrecisionExhausted("Frobenius image known too coarsely");
  bool found = false;
  for (const auto& [e, c] : P.terms()) {
    if (c.vp() > 0) continue;
    if (e != P.p() || !(c.residue() == FqElem::from_int(P.field(), 1)))
      throw InputError("not a Frobenius lift: P differs from T^p modulo p at T^" + std::to_string(e));
    found = true;
  }
  if (!found) throw InputError("not a Frobenius lift: P vanishes modulo p");
}

/// Fixed-point iteration v <- Frob^{-1}(P(v)) from v = T.
inline EmbedResult solve_frobenius_embed(const GrowthSeries& P, int N, int budget = kDefaultDenomBudget) {
  if (N < 1 || N > kMaxWittPrecision) throw InputError("precision N out of range");
  if (P.N() < N) throw PrecisionExhausted("Frobenius image known to lower p-adic precision");
  check_frobenius_lift(P);
  const RingSpec* r = RingSpec::get(P.field(), N);
  detail::Lifted v = detail::Lifted::monomial(Zq::from_int(r, 1), 1, 0);
  EmbedResult res;
  for (int it = 0; it <= N; ++it) {
    detail::Lifted next = evaluate_at(P, v, N).frob(-1);
    ++res.iterations;
    const bool same = next.equal_at_precision(v) && v.equal_at_precision(next);
    v = std::move(next);
    if (same) break;
  }
  detail::Lifted residual = v.frob(1) - evaluate_at(P, v, N);
  res.residual_zero = residual.terms().empty();
  std::ostringstream os;
  os << residual.terms().size() << " known nonzero terms";
  res.residual = os.str();
  if (!res.residual_zero) throw VerdictFailure("embedding residual Frob(v) - P(v) is nonzero");
  res.image = P;
  res.v = v;
  res.slices = WittElem::from_lifted(0, v, budget);
  return res;
}

/// i_sigma(f) as a Witt element, for the image v of T.
inline WittElem embed_series(const GrowthSeries& f, const detail::Lifted& v, int budget = kDefaultDenomBudget) {
  const int n = std::min(f.N(), v.levels());
  return WittElem::from_lifted(f.p_shift(), evaluate_at(f, v, n), budget);
}

/// Least c (bracketed) with v * [T^{-1}] in A^{r,c}, at the precision of v.
inline Bracket embedding_constant(const detail::Lifted& v, const Rational& r, int budget = kDefaultDenomBudget) {
  detail::Lifted u = v * detail::Lifted::monomial(Zq::from_int(v.ring(), 1), -1, 0);
  auto c = arc_least_c(WittElem::from_lifted(0, u, budget), r);
  if (!c) throw VerdictFailure("v * [T^-1] is not integral at slice 0");
  return *c;
}

namespace detail {

// Rational y with p^x - width <= y <= p^x.
inline Rational power_lower_bound(long p, const Rational& x, const Rational& width) {
  Rational lo = 0, hi = Rational(ipow(BigInt(p), static_cast<unsigned long long>(std::max<BigInt>(0, ceil(x)) + 1)));
  if (compare_with_power(hi, p, x) < 0) throw InputError("power bound failed");
  while (hi - lo > width) {
    Rational mid = (lo + hi) / 2;
    if (compare_with_power(mid, p, x) <= 0) lo = mid; else hi = mid;
  }
  return lo;
}

}  // namespace detail

/// Growth constants of the embedding for P = sum a_n T^n: c with
/// v_p(a_n) - log_p(-n)/r > c for the known negative terms, and the bound
/// d_min such that v lies in A^{r,d} for every d > d_min.
struct EmbeddingLemmaBound {
  std::optional<Rational> c;  // absent when P has no negative terms
  Rational d_min;
};

inline EmbeddingLemmaBound embedding_lemma_bound(const GrowthSeries& P, const Rational& r) {
  const long p = P.p();
  EmbeddingLemmaBound b;
  for (const auto& [n, a] : P.terms()) {
    if (n >= 0) continue;
    Bracket lg = log_p_bracket(Rational(-n), p, 1 << 12);
    Rational cand = Rational(P.p_shift() + a.vp()) - lg.hi / r - Rational(1, 1 << 12);
    b.c = b.c ? std::min(*b.c, cand) : cand;
  }
  const Rational width(1, 1 << 20);
  const Rational pr = detail::power_lower_bound(p, r, width);
  Rational d = Rational(1) / (pr - 1);
  if (b.c) {
    const Rational prc = detail::power_lower_bound(p, r * *b.c, width);
    if (prc <= 1) throw InputError("embedding growth constant c must be positive");
    d = std::max(d, Rational(1) / (p * (prc - 1)));
    const Rational t = detail::power_lower_bound(p, r - *b.c * r - 1, width);
    // An upper bound for p^{r - cr - 1} is t + width.
    d = std::max(d, (t + width) / (pr - 1));
  }
  b.d_min = d;
  return b;
}

struct CompareRow {
  int n = 0;
  ExtRational naive_v;       // v_n(f)
  ExtRational witt_v;        // v_T(x_n) of the embedded element
  bool naive_ok = true;      // v_n >= c - p^{rn} c
  Verdict witt_ok = Verdict::member;
};

struct CompareReport {
  Rational r, c;
  Bracket c0;
  bool naive_member = true;
  Verdict witt_verdict = Verdict::member;
  bool agree = true;
  std::vector<CompareRow> rows;
};

inline CompareReport witt_naive_compare(const GrowthSeries& f, const Rational& r, const Rational& c,
                                        const EmbedResult& sigma, int budget = kDefaultDenomBudget) {
  CompareReport rep;
  rep.r = r;
  rep.c = c;
  rep.c0 = embedding_constant(sigma.v, r, budget);
  if (c < rep.c0.hi) throw InputError("c is below the embedding constant " + rep.c0.str());
  WittElem x = embed_series(f, sigma.v, budget);
  MembershipResult m = growth_membership(x, GrowthQuery::Arc(r, c));
  rep.witt_verdict = m.verdict;
  rep.naive_member = naive_arc_member(f, r, c);
  for (int n = 0; n < std::min(f.absolute_precision(), x.absolute_precision()); ++n) {
    CompareRow row;
    row.n = n;
    row.naive_v = naive_partial_valuation(f, n);
    row.witt_v = witt_digit_valuation(x, n);
    row.naive_ok = row.naive_v.is_inf() || compare(PowRat(c, r * n, f.p()), c - row.naive_v.v) >= 0;
    row.witt_ok = m.digits[n].verdict;
    rep.rows.push_back(row);
  }
  rep.agree = rep.witt_verdict != Verdict::undetermined &&
              (rep.witt_verdict == Verdict::member) == rep.naive_member;
  return rep;
}

}  // namespace logdecay
