#pragma once

// Truncated elements p^s * sum_{i<N} [x_i] p^i of W(F^perf)[1/p], partial
// valuations w_k, and membership in the growth rings.

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "lifted.hpp"
#include "perf_series.hpp"
#include "rational.hpp"

namespace logdecay {

/// Largest p-adic precision accepted by Witt-backed operations.
inline constexpr int kMaxWittPrecision = 5;

class WittElem {
 public:
  WittElem() = default;
  WittElem(int p_shift, std::vector<PerfSeries> slices) : p_shift_(p_shift), slices_(std::move(slices)) {
    if (slices_.empty()) throw PrecisionExhausted("Witt element needs at least one slice");
    for (const auto& s : slices_)
      if (s.field() != slices_.front().field()) throw FieldMismatch("slices over different fields");
  }

  static WittElem zero(const FieldSpec* f, int N, int budget = kDefaultDenomBudget) {
    return WittElem(0, std::vector<PerfSeries>(N, PerfSeries::zero(f, ExtRational::infinity(), budget)));
  }
  /// [x] with N slices.
  static WittElem teichmuller(const PerfSeries& x, int N) {
    std::vector<PerfSeries> s(N, PerfSeries::zero(x.field(), ExtRational::infinity(), x.budget()));
    s[0] = x;
    return WittElem(0, std::move(s));
  }
  static WittElem from_int(const FieldSpec* f, long long v, int N, int budget = kDefaultDenomBudget) {
    return from_lifted(0, detail::Lifted::from_int(RingSpec::get(f, N), v), budget);
  }
  /// Element given in the lifted picture: p^shift * L.
  static WittElem from_lifted(int shift, const detail::Lifted& L, int budget) {
    return WittElem(shift, L.slices(budget));
  }

  int p_shift() const { return p_shift_; }
  int N() const { return static_cast<int>(slices_.size()); }
  const std::vector<PerfSeries>& slices() const { return slices_; }
  const PerfSeries& slice(int i) const { return slices_.at(i); }
  const FieldSpec* field() const { return slices_.front().field(); }
  long p() const { return field()->p(); }
  int budget() const {
    int b = 0;
    for (const auto& s : slices_) b = std::max(b, s.budget());
    return b;
  }
  /// Absolute p-adic precision: the element is known modulo p^{p_shift + N}.
  int absolute_precision() const { return p_shift_ + N(); }

  /// Unit part sum [x_i] p^i in the lifted picture, with n levels.
  detail::Lifted lifted(int n) const {
    if (n > N()) throw PrecisionExhausted("requested more slices than known");
    std::vector<PerfSeries> s(slices_.begin(), slices_.begin() + n);
    return detail::Lifted::from_slices(s);
  }

  /// Same value with exactly-zero leading slices moved into p_shift.
  WittElem normalized() const {
    int k = 0;
    while (k + 1 < N() && slices_[k].empty() && slices_[k].is_exact()) ++k;
    if (k == 0) return *this;
    return WittElem(p_shift_ + k, std::vector<PerfSeries>(slices_.begin() + k, slices_.end()));
  }

  friend bool operator==(const WittElem& a, const WittElem& b) {
    return a.p_shift_ == b.p_shift_ && a.slices_ == b.slices_;
  }

  std::string str() const {
    std::ostringstream os;
    os << "p^" << p_shift_ << " * (";
    for (int i = 0; i < N(); ++i) os << (i ? ", " : "") << slices_[i].str();
    os << ")";
    return os.str();
  }

 private:
  int p_shift_ = 0;
  std::vector<PerfSeries> slices_;
};

inline void check_compatible(const WittElem& x, const WittElem& y) {
  if (x.field() != y.field()) throw FieldMismatch("Witt elements over different residue fields");
}

inline WittElem witt_add(const WittElem& x, const WittElem& y) {
  check_compatible(x, y);
  const int s = std::min(x.p_shift(), y.p_shift());
  const int A = std::min(x.absolute_precision(), y.absolute_precision());
  const int n = A - s;
  if (n <= 0) throw PrecisionExhausted("precision underflow after shift alignment");
  const int dx = x.p_shift() - s, dy = y.p_shift() - s;
  detail::Lifted acc(RingSpec::get(x.field(), n));
  if (n - dx > 0) acc += x.lifted(n - dx).times_p(dx, n);
  if (n - dy > 0) acc += y.lifted(n - dy).times_p(dy, n);
  return WittElem::from_lifted(s, acc, std::max(x.budget(), y.budget()));
}

inline WittElem witt_neg(const WittElem& x) {
  return WittElem::from_lifted(x.p_shift(), -x.lifted(x.N()), x.budget());
}

inline WittElem witt_sub(const WittElem& x, const WittElem& y) { return witt_add(x, witt_neg(y)); }

inline WittElem witt_mul(const WittElem& x, const WittElem& y) {
  check_compatible(x, y);
  const int n = std::min(x.N(), y.N());
  detail::Lifted prod = x.lifted(n) * y.lifted(n);
  return WittElem::from_lifted(x.p_shift() + y.p_shift(), prod, std::max(x.budget(), y.budget()));
}

inline WittElem witt_pow(const WittElem& x, long long k) {
  if (k < 0) throw InputError("negative power; use witt_inv");
  detail::Lifted L = x.lifted(x.N()).pow(k);
  return WittElem::from_lifted(static_cast<int>(x.p_shift() * k), L, x.budget());
}

/// Inverse; slice 0 (after removing exact zero slices) needs a known leading term.
/// Slices of the result are known below a cutoff derived from t_cutoff.
inline WittElem witt_inv(const WittElem& x, const ExtRational& t_cutoff) {
  WittElem u = x.normalized();
  if (u.slice(0).empty()) {
    if (u.slice(0).is_exact()) throw NotInvertible("zero Witt element");
    throw PrecisionExhausted("leading slice unknown, cannot invert");
  }
  detail::Lifted L = u.lifted(u.N()).inv(t_cutoff);
  return WittElem::from_lifted(-u.p_shift(), L, u.budget());
}

/// Slice-wise Frobenius power: Frob(sum [x_n] p^n) = sum [x_n^p] p^n.
inline WittElem witt_frobenius(const WittElem& x, int e) {
  std::vector<PerfSeries> s;
  s.reserve(x.N());
  for (const auto& sl : x.slices()) s.push_back(sl.frob_pow(e));
  return WittElem(x.p_shift(), std::move(s));
}

/// Honest lower bound for v_T of the Teichmuller digit at absolute index n.
inline ExtRational witt_digit_valuation(const WittElem& x, int n) {
  if (n < x.p_shift()) return ExtRational::infinity();
  if (n >= x.absolute_precision()) throw PrecisionExhausted("digit index beyond precision");
  return x.slice(n - x.p_shift()).valuation();
}

/// w_k(x) = min_{n <= k} v_T(x_n) over absolute digit indices.
inline ExtRational witt_partial_valuation(const WittElem& x, int k) {
  if (k >= x.absolute_precision()) throw PrecisionExhausted("w_k needs k < precision");
  ExtRational w = ExtRational::infinity();
  for (int n = std::min(0, x.p_shift()); n <= k; ++n) w = min(w, witt_digit_valuation(x, n));
  return w;
}

/// Whether w_k(x) is known exactly, i.e. attained by a digit with a known leading term.
inline bool witt_partial_valuation_exact(const WittElem& x, int k) {
  ExtRational w = witt_partial_valuation(x, k);
  if (w.is_inf()) return true;
  for (int n = std::max(0, x.p_shift()); n <= k; ++n) {
    const PerfSeries& s = x.slice(n - x.p_shift());
    if (s.valuation_known() && s.valuation() == w) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Growth ring membership.

enum class Verdict { member, non_member, undetermined };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::member: return "member";
    case Verdict::non_member: return "non_member";
    default: return "undetermined";
  }
}

struct GrowthQuery {
  enum class Kind { Arc, Br, Bdagger, Ercn };
  Kind kind = Kind::Arc;
  Rational r = 1;
  Rational c = 1;
  int n = 1;
  /// |w_1(T)| for the embedded variable; enters the last Ercn condition.
  Rational w1T = 1;

  static GrowthQuery Arc(Rational r, Rational c) { return {Kind::Arc, r, c, 0, 1}; }
  static GrowthQuery Br(Rational r) { return {Kind::Br, r, 0, 0, 1}; }
  static GrowthQuery Bdagger() { return {Kind::Bdagger, 0, 0, 0, 1}; }
  static GrowthQuery Ercn(Rational r, Rational c, int n, Rational w1T) {
    return {Kind::Ercn, r, c, n, w1T};
  }
};

struct DigitCheck {
  int index = 0;
  ExtRational valuation;
  bool valuation_exact = false;
  Verdict verdict = Verdict::member;
};

struct MembershipResult {
  Verdict verdict = Verdict::member;
  /// Least admissible constant at this precision (Arc, Br, Bdagger); absent if none exists.
  std::optional<Bracket> least_c;
  /// Exact closed form of least_c when it is q*p^e.
  std::optional<PowRat> least_c_exact;
  std::vector<DigitCheck> digits;
};

namespace detail {

// Decide c * p^{ir} + v >= c, i.e. c * p^{ir} >= c - v, exactly.
inline bool arc_holds(const Rational& c, const Rational& ir, long p, const Rational& v) {
  return compare(PowRat(c, ir, p), c - v) >= 0;
}

inline Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::non_member || b == Verdict::non_member) return Verdict::non_member;
  if (a == Verdict::undetermined || b == Verdict::undetermined) return Verdict::undetermined;
  return Verdict::member;
}

inline DigitCheck digit_check(const WittElem& x, int n, bool holds) {
  DigitCheck d;
  d.index = n;
  d.valuation = witt_digit_valuation(x, n);
  d.valuation_exact = n < x.p_shift() || x.slice(n - x.p_shift()).valuation_known() ||
                      x.slice(n - x.p_shift()).is_exact();
  d.verdict = holds ? Verdict::member : (d.valuation_exact ? Verdict::non_member : Verdict::undetermined);
  return d;
}

}  // namespace detail

/// Least c > = 0 with p^{ir} c + v_T(x_i) >= c for all known digits, if any.
inline std::optional<Bracket> arc_least_c(const WittElem& x, const Rational& r,
                                          std::optional<PowRat>* exact = nullptr) {
  const long p = x.p();
  if (x.p_shift() < 0) throw InputError("integral-ring query on an element with negative p_shift");
  Rational lower = 0;
  bool rational_exact = true;
  std::vector<std::pair<int, Rational>> binding;
  for (int n = 0; n < x.absolute_precision(); ++n) {
    ExtRational v = witt_digit_valuation(x, n);
    if (v.is_inf() || v.v >= 0) continue;
    if (n == 0) return std::nullopt;
    binding.emplace_back(n, v.v);
    Rational ir = r * n;
    if (den(ir) != 1) {
      rational_exact = false;
      continue;
    }
    Rational denom = PowRat(1, ir, p).to_rational() - 1;
    lower = std::max(lower, -v.v / denom);
  }
  if (rational_exact) {
    if (exact) *exact = PowRat::of(lower, p);
    return Bracket{lower, lower};
  }
  auto holds = [&](const Rational& c) {
    for (const auto& [n, v] : binding)
      if (!detail::arc_holds(c, r * n, p, v)) return false;
    return true;
  };
  Rational upper = 1;
  while (!holds(upper)) upper *= 2;
  return least_true(holds, lower, upper, Rational(1) / Rational(1 << 20));
}

inline MembershipResult growth_membership(const WittElem& x, const GrowthQuery& q) {
  MembershipResult res;
  const long p = x.p();
  using K = GrowthQuery::Kind;
  if ((q.kind == K::Arc || q.kind == K::Ercn) && x.p_shift() < 0)
    throw InputError("integral-ring query on an element with negative p_shift");
  switch (q.kind) {
    case K::Arc: {
      for (int n = 0; n < x.absolute_precision(); ++n) {
        ExtRational v = witt_digit_valuation(x, n);
        bool holds = v.is_inf() || detail::arc_holds(q.c, q.r * n, p, v.v);
        res.digits.push_back(detail::digit_check(x, n, holds));
        res.verdict = detail::combine(res.verdict, res.digits.back().verdict);
      }
      std::optional<PowRat> ex;
      res.least_c = arc_least_c(x, q.r, &ex);
      res.least_c_exact = ex;
      break;
    }
    case K::Ercn: {
      if (q.n + 1 > x.absolute_precision()) throw PrecisionExhausted("Ercn query needs digits up to n");
      for (int i = 0; i <= q.n; ++i) {
        ExtRational v = witt_digit_valuation(x, i);
        bool holds;
        if (v.is_inf()) {
          holds = true;
        } else if (i < q.n) {
          holds = detail::arc_holds(q.c, q.r * i, p, v.v);
        } else {
          holds = detail::arc_holds(q.c, q.r * (q.n - 1), p, v.v + q.w1T);
        }
        res.digits.push_back(detail::digit_check(x, i, holds));
        res.verdict = detail::combine(res.verdict, res.digits.back().verdict);
      }
      break;
    }
    case K::Br: {
      // Least c with v_T(x_n) >= -p^{nr} c, i.e. c >= -v_T(x_n) p^{-nr}.
      PowRat best = PowRat::of(0, p);
      for (int n = std::min(0, x.p_shift()); n < x.absolute_precision(); ++n) {
        ExtRational v = witt_digit_valuation(x, n);
        DigitCheck d = detail::digit_check(x, n, true);
        res.digits.push_back(d);
        if (v.is_inf() || v.v >= 0) continue;
        PowRat cand(-v.v, -q.r * n, p);
        if (best < cand) best = cand;
      }
      res.least_c_exact = best;
      if (best.is_rational()) {
        res.least_c = Bracket{best.to_rational(), best.to_rational()};
      } else {
        res.least_c = Bracket{Rational(ceil(best)) - 1, Rational(ceil(best))};
        auto ge = [&](const Rational& c) { return compare(best, c) <= 0; };
        res.least_c = least_true(ge, res.least_c->lo, res.least_c->hi, Rational(1) / Rational(1 << 20));
      }
      break;
    }
    case K::Bdagger: {
      // Linear witness: c with n c + v_T(x_n) >= -c' for c' = max(0, -v_T(x_0)).
      Rational cprime = 0;
      ExtRational v0 = witt_partial_valuation(x, 0);
      if (!v0.is_inf() && v0.v < 0) cprime = -v0.v;
      Rational c = 0;
      for (int n = 1; n < x.absolute_precision(); ++n) {
        ExtRational v = witt_digit_valuation(x, n);
        res.digits.push_back(detail::digit_check(x, n, true));
        if (v.is_inf()) continue;
        c = std::max(c, (-v.v - cprime) / n);
      }
      res.least_c = Bracket{c, c};
      res.least_c_exact = PowRat::of(c, p);
      break;
    }
  }
  return res;
}

}  // namespace logdecay
