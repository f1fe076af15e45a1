#pragma once

// Truncated elements of O_E[1/p] = W_N(k)((T))^[p-adic completion], naive partial
// valuations v_n, and growth classification.
//
// A series is p^{p_shift} * body, where body has integral T-exponents and
// coefficients in W_N(k). Coefficients modulo p^{j+1} are known below
// body.cuts()[j]; no terms lie below tail_cutoff.

#include <algorithm>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "lifted.hpp"
#include "rational.hpp"

namespace logdecay {

inline constexpr std::int64_t kNoTail = std::numeric_limits<std::int64_t>::min();
/// T-adic target used when inverting an exactly known series.
inline constexpr int kDefaultInverseCutoff = 64;

class GrowthSeries {
 public:
  using Term = detail::Lifted::Term;

  GrowthSeries() = default;
  GrowthSeries(int p_shift, detail::Lifted body, std::int64_t tail_cutoff = kNoTail)
      : p_shift_(p_shift), body_(std::move(body)), tail_(tail_cutoff) {
    if (body_.scale() != 0) throw InputError("series exponents must be integers");
    if (tail_ == kNoTail) tail_ = lowest_exponent();
    for (const auto& t : body_.terms())
      if (t.first < tail_) throw InputError("term below tail_cutoff");
  }

  /// sum coeff * T^exp with coefficients given as integers (K unramified, coordinates of W_N(k)).
  static GrowthSeries from_terms(const FieldSpec* k, int N, const std::vector<std::pair<std::int64_t, Zq>>& terms,
                                 std::int64_t tail_cutoff = kNoTail, std::int64_t known_below = detail::kInfExp,
                                 int p_shift = 0) {
    const RingSpec* r = RingSpec::get(k, N);
    std::vector<Term> t;
    for (const auto& [e, c] : terms) {
      if (c.ring() != r) throw FieldMismatch("coefficient ring does not match the series");
      t.push_back({e, c});
    }
    return GrowthSeries(p_shift, detail::Lifted::from_parts(r, 0, std::move(t), std::vector<std::int64_t>(N, known_below)),
                        tail_cutoff);
  }
  static GrowthSeries from_ints(const FieldSpec* k, int N, const std::vector<std::pair<std::int64_t, long long>>& terms,
                                std::int64_t tail_cutoff = kNoTail, std::int64_t known_below = detail::kInfExp) {
    const RingSpec* r = RingSpec::get(k, N);
    std::vector<std::pair<std::int64_t, Zq>> t;
    for (const auto& [e, c] : terms) t.push_back({e, Zq::from_int(r, c)});
    return from_terms(k, N, t, tail_cutoff, known_below);
  }
  static GrowthSeries monomial(const RingSpec* r, long long c, std::int64_t e) {
    return GrowthSeries(0, detail::Lifted::monomial(Zq::from_int(r, c), e, 0));
  }
  static GrowthSeries one(const RingSpec* r) { return monomial(r, 1, 0); }
  static GrowthSeries zero(const RingSpec* r) { return GrowthSeries(0, detail::Lifted(r)); }

  const RingSpec* ring() const { return body_.ring(); }
  const FieldSpec* field() const { return ring()->field(); }
  long p() const { return ring()->p(); }
  int N() const { return body_.levels(); }
  int p_shift() const { return p_shift_; }
  int absolute_precision() const { return p_shift_ + N(); }
  std::int64_t tail_cutoff() const { return tail_; }
  const detail::Lifted& body() const { return body_; }
  const std::vector<Term>& terms() const { return body_.terms(); }
  const std::vector<std::int64_t>& cuts() const { return body_.cuts(); }
  bool is_exact() const {
    for (auto c : cuts())
      if (c != detail::kInfExp) return false;
    return true;
  }
  bool is_zero() const { return terms().empty(); }

  /// Same value with the common power of p moved into p_shift, when the known
  /// terms and exact low levels determine it.
  GrowthSeries normalized() const {
    int v = N();
    for (const auto& t : terms()) v = std::min(v, t.second.vp());
    int k = 0;
    while (k < v && k + 1 < N() && cuts()[k] == detail::kInfExp) ++k;
    detail::Lifted b = body_;
    for (int i = 0; i < k; ++i) b = b.div_p();
    return GrowthSeries(p_shift_ + k, b, tail_);
  }

  friend bool operator==(const GrowthSeries& a, const GrowthSeries& b) {
    return a.p_shift_ == b.p_shift_ && a.body_.ring() == b.body_.ring() && a.body_.terms() == b.body_.terms() &&
           a.body_.cuts() == b.body_.cuts();
  }

  std::string str() const {
    std::ostringstream os;
    if (p_shift_ != 0) os << "p^" << p_shift_ << " * (";
    bool first = true;
    for (const auto& [e, c] : terms()) {
      os << (first ? "" : " + ") << c.str() << "*T^" << e;
      first = false;
    }
    if (first) os << "0";
    if (!is_exact()) {
      os << " + O(";
      for (int j = 0; j < N(); ++j) {
        if (j) os << ",";
        if (cuts()[j] == detail::kInfExp) os << "inf"; else os << "T^" << cuts()[j];
      }
      os << ")";
    }
    if (p_shift_ != 0) os << ")";
    return os.str();
  }

 private:
  std::int64_t lowest_exponent() const {
    return terms().empty() ? 0 : terms().front().first;
  }

  int p_shift_ = 0;
  detail::Lifted body_;
  std::int64_t tail_ = kNoTail;
};

namespace detail {

inline void check_same_field(const GrowthSeries& f, const GrowthSeries& g) {
  if (f.field() != g.field()) throw FieldMismatch("series over different residue fields");
}

/// p^s-aligned bodies of f and g with common precision, or PrecisionExhausted.
inline std::pair<Lifted, Lifted> align_shifts(const GrowthSeries& f, const GrowthSeries& g, int* shift) {
  const int s = std::min(f.p_shift(), g.p_shift());
  const int A = std::min(f.absolute_precision(), g.absolute_precision());
  const int n = A - s;
  if (n <= 0) throw PrecisionExhausted("precision underflow after shift alignment");
  auto part = [&](const GrowthSeries& x) {
    const int d = x.p_shift() - s;
    if (n - d <= 0) return Lifted(RingSpec::get(x.field(), n));
    return x.body().with_levels(n - d).times_p(d, n);
  };
  *shift = s;
  return {part(f), part(g)};
}

}  // namespace detail

inline GrowthSeries series_add(const GrowthSeries& f, const GrowthSeries& g) {
  detail::check_same_field(f, g);
  int s = 0;
  auto [a, b] = detail::align_shifts(f, g, &s);
  return GrowthSeries(s, a + b, std::min(f.tail_cutoff(), g.tail_cutoff()));
}

inline GrowthSeries series_neg(const GrowthSeries& f) {
  return GrowthSeries(f.p_shift(), -f.body(), f.tail_cutoff());
}

inline GrowthSeries series_sub(const GrowthSeries& f, const GrowthSeries& g) { return series_add(f, series_neg(g)); }

inline GrowthSeries series_mul(const GrowthSeries& f, const GrowthSeries& g) {
  detail::check_same_field(f, g);
  const int n = std::min(f.N(), g.N());
  detail::Lifted prod = f.body().with_levels(n) * g.body().with_levels(n);
  return GrowthSeries(f.p_shift() + g.p_shift(), prod, f.tail_cutoff() + g.tail_cutoff());
}

inline GrowthSeries series_pow(const GrowthSeries& f, long long k) {
  if (k < 0) throw InputError("negative power; use series_inv");
  GrowthSeries result = GrowthSeries::one(f.ring()), base = f;
  while (k) {
    if (k & 1) result = series_mul(result, base);
    k >>= 1;
    if (k) base = series_mul(base, base);
  }
  return result;
}

/// Multiplication by a scalar of W_N(k).
inline GrowthSeries operator+(const GrowthSeries& f, const GrowthSeries& g) { return series_add(f, g); }
inline GrowthSeries operator-(const GrowthSeries& f, const GrowthSeries& g) { return series_sub(f, g); }
inline GrowthSeries operator-(const GrowthSeries& f) { return series_neg(f); }
inline GrowthSeries operator*(const GrowthSeries& f, const GrowthSeries& g) { return series_mul(f, g); }

inline GrowthSeries series_scale(const GrowthSeries& f, const Zq& c) {
  detail::Lifted cc = detail::Lifted::constant(c).with_levels(std::min(f.N(), c.ring()->N()));
  return series_mul(f, GrowthSeries(0, cc, 0));
}

/// Factorization f = p^a T^b u with u a unit of O_E whose residue is a unit of k[[T]].
struct Normalization {
  int a = 0;
  std::int64_t b = 0;
  GrowthSeries unit;
};

inline Normalization normalize_unit(const GrowthSeries& f) {
  if (f.is_zero()) {
    if (f.is_exact()) throw NotInvertible("zero series");
    throw PrecisionExhausted("no known nonzero term");
  }
  int v = f.N();
  for (const auto& t : f.terms()) v = std::min(v, t.second.vp());
  for (int i = 0; i < v; ++i)
    if (f.cuts()[i] != detail::kInfExp) throw PrecisionExhausted("p-adic valuation not determined by known terms");
  detail::Lifted body = f.body();
  for (int i = 0; i < v; ++i) body = body.div_p();
  std::int64_t b = detail::kInfExp;
  for (const auto& [e, c] : body.terms())
    if (c.vp() == 0) b = std::min(b, e);
  if (b == detail::kInfExp || b >= body.cuts()[0]) throw PrecisionExhausted("leading unit term unknown");
  detail::Lifted shifted = body * detail::Lifted::monomial(Zq::from_int(body.ring(), 1), -b, 0);
  return {f.p_shift() + v, b, GrowthSeries(0, shifted, kNoTail)};
}

/// Inverse by normalization and Newton iteration; t_cutoff bounds the T-adic
/// length of the computation when f is known exactly.
inline GrowthSeries series_inv(const GrowthSeries& f, std::int64_t t_cutoff = kDefaultInverseCutoff) {
  Normalization nz = normalize_unit(f);
  const detail::Lifted& u = nz.unit.body();
  PerfSeries res = u.residue(0);
  PerfSeries y0 = res.inv(ExtRational(Rational(t_cutoff)));
  detail::Lifted y = u.inv_from(detail::Lifted::lift_coordinates(y0, u.ring()), ExtRational(Rational(t_cutoff)));
  y = y * detail::Lifted::monomial(Zq::from_int(u.ring(), 1), -nz.b, 0);
  return GrowthSeries(-nz.a, y, kNoTail);
}

/// d/dT, exact on known terms; the cutoff of each level drops by one.
inline GrowthSeries series_derivative(const GrowthSeries& f) {
  std::vector<GrowthSeries::Term> t;
  for (const auto& [e, c] : f.terms()) {
    Zq d = c.scale(e);
    if (!d.is_zero()) t.push_back({e - 1, d});
  }
  std::vector<std::int64_t> cuts = f.cuts();
  for (auto& c : cuts)
    if (c != detail::kInfExp) c -= 1;
  const std::int64_t tail = f.tail_cutoff() == kNoTail ? kNoTail : f.tail_cutoff() - 1;
  return GrowthSeries(f.p_shift(), detail::Lifted::from_parts(f.ring(), 0, std::move(t), cuts), tail);
}

/// Coefficientwise Witt Frobenius of W_N(k) (identity when k = F_p).
inline GrowthSeries series_coefficient_frobenius(const GrowthSeries& f) {
  std::vector<GrowthSeries::Term> t;
  for (const auto& [e, c] : f.terms()) t.push_back({e, c.frob()});
  return GrowthSeries(f.p_shift(), detail::Lifted::from_parts(f.ring(), 0, std::move(t), f.cuts()), f.tail_cutoff());
}

/// f(P) with Frobenius on coefficients: sigma(f) for the Frobenius sending T to P.
/// P must have a known leading unit term when f has negative exponents.
inline GrowthSeries series_compose_frobenius(const GrowthSeries& f, const GrowthSeries& P,
                                             std::int64_t t_cutoff = kDefaultInverseCutoff) {
  detail::check_same_field(f, P);
  const int n = std::min(f.N(), P.N());
  if (P.p_shift() != 0) throw InputError("Frobenius image must be integral");
  const RingSpec* r = RingSpec::get(f.field(), n);
  GrowthSeries Pn(0, P.body().with_levels(n), P.tail_cutoff());
  GrowthSeries fn(f.p_shift(), f.body().with_levels(n), f.tail_cutoff());
  fn = series_coefficient_frobenius(fn);
  GrowthSeries acc = GrowthSeries::zero(r);
  bool need_inv = false;
  for (const auto& t : fn.terms()) need_inv = need_inv || t.first < 0;
  std::optional<GrowthSeries> Pinv;
  if (need_inv) Pinv = series_inv(Pn, t_cutoff);
  // Powers of P and P^{-1} by increasing exponent.
  GrowthSeries pos = GrowthSeries::one(r), neg = GrowthSeries::one(r);
  std::int64_t pos_e = 0, neg_e = 0;
  std::vector<GrowthSeries::Term> negatives, positives;
  for (const auto& t : fn.terms()) (t.first < 0 ? negatives : positives).push_back(t);
  std::reverse(negatives.begin(), negatives.end());
  for (const auto& [e, c] : positives) {
    while (pos_e < e) {
      pos = series_mul(pos, Pn);
      ++pos_e;
    }
    acc = series_add(acc, series_scale(pos, c));
  }
  for (const auto& [e, c] : negatives) {
    while (neg_e > e) {
      neg = series_mul(neg, *Pinv);
      --neg_e;
    }
    acc = series_add(acc, series_scale(neg, c));
  }
  // Unknown coefficients of f are only tracked through a monomial image T^p.
  if (!fn.is_exact()) {
    const bool monomial_image = Pn.is_exact() && Pn.terms().size() == 1 && Pn.terms()[0].first == f.p() &&
                                Pn.terms()[0].second == Zq::from_int(r, 1);
    if (!monomial_image) throw PrecisionExhausted("composition with a non-monomial image needs an exact series");
    std::vector<std::int64_t> extra = fn.cuts();
    for (auto& c : extra)
      if (c != detail::kInfExp) c = detail::checked_mul(c, f.p());
    acc = series_add(acc, GrowthSeries(fn.p_shift(), detail::Lifted::from_parts(r, 0, {}, extra), 0));
  }
  return GrowthSeries(acc.p_shift(), acc.body(), kNoTail);
}

// ---------------------------------------------------------------------------
// Naive partial valuations and growth classification.

/// v_n(f) = min{ i : v_p(a_i) <= n }, +inf when no such term. Where the known
/// terms do not decide, the level cutoff is returned as a lower bound.
inline ExtRational naive_partial_valuation(const GrowthSeries& f, int n) {
  if (n >= f.absolute_precision()) throw PrecisionExhausted("v_n needs n < precision");
  const int j = n - f.p_shift();
  if (j < 0) return ExtRational::infinity();
  std::int64_t best = f.cuts()[j];
  for (const auto& [e, c] : f.terms()) {
    if (e >= best) break;
    if (c.vp() <= j) {
      best = e;
      break;
    }
  }
  if (best == detail::kInfExp) return ExtRational::infinity();
  return ExtRational(Rational(best));
}

/// True when v_n(f) is attained by a known term or f vanishes exactly at level n.
inline bool naive_partial_valuation_exact(const GrowthSeries& f, int n) {
  const int j = n - f.p_shift();
  if (j < 0) return true;
  ExtRational v = naive_partial_valuation(f, n);
  return v.is_inf() || v.v < Rational(f.cuts()[j] == detail::kInfExp ? std::numeric_limits<std::int64_t>::max()
                                                                        : f.cuts()[j]);
}

struct GrowthClass {
  enum class Kind { convergent, dagger, rlog, unclassified };
  Kind kind = Kind::unclassified;
  Rational r = 0;
  /// Least d with v_n >= -p^{rn} d over known slices (rlog), or 0 (dagger with v_n >= 0).
  std::optional<PowRat> witness_c;
  /// Bracket for the empirical exponent max_n log_p(-v_n)/n over n >= 1 with v_n < 0.
  std::optional<Bracket> r_hat;
  /// Linear witness (c, c') with v_n >= -c n - c' for all known n.
  Rational linear_c = 0, linear_c0 = 0;
  std::vector<ExtRational> v;
};

inline std::string to_string(GrowthClass::Kind k) {
  switch (k) {
    case GrowthClass::Kind::convergent: return "convergent";
    case GrowthClass::Kind::dagger: return "dagger";
    case GrowthClass::Kind::rlog: return "rlog";
    default: return "unclassified";
  }
}

inline GrowthClass classify_growth(const GrowthSeries& f, const Rational& r) {
  if (f.is_zero() && f.is_exact()) throw InputError("cannot classify the zero series");
  GrowthClass g;
  g.r = r;
  const long p = f.p();
  bool any_negative = false;
  PowRat d = PowRat::of(0, p);
  for (int n = 0; n < f.absolute_precision(); ++n) {
    ExtRational v = naive_partial_valuation(f, n);
    g.v.push_back(v);
    if (v.is_inf() || v.v >= 0) continue;
    any_negative = true;
    PowRat cand(-v.v, -r * n, p);
    if (d < cand) d = cand;
    if (n >= 1) {
      Bracket b = log_p_bracket(-v.v, p);
      Bracket e{b.lo / n, b.hi / n};
      if (!g.r_hat) {
        g.r_hat = e;
      } else {
        g.r_hat->lo = std::max(g.r_hat->lo, e.lo);
        g.r_hat->hi = std::max(g.r_hat->hi, e.hi);
      }
    }
  }
  // Linear witness anchored at n = 0: c' = max(0, -v_0), c = max_n (-v_n - c')/n.
  if (!g.v.empty() && !g.v[0].is_inf() && g.v[0].v < 0) g.linear_c0 = -g.v[0].v;
  for (int n = 1; n < static_cast<int>(g.v.size()); ++n)
    if (!g.v[n].is_inf()) g.linear_c = std::max(g.linear_c, (-g.v[n].v - g.linear_c0) / n);
  if (!any_negative) {
    g.kind = GrowthClass::Kind::dagger;
    g.witness_c = PowRat::of(0, p);
  } else {
    g.kind = GrowthClass::Kind::rlog;
    g.witness_c = d;
  }
  return g;
}

/// Whether v_n(f) >= c - p^{rn} c for all n < precision (membership in O_{E^{r,c}}).
inline bool naive_arc_member(const GrowthSeries& f, const Rational& r, const Rational& c) {
  for (int n = 0; n < f.absolute_precision(); ++n) {
    ExtRational v = naive_partial_valuation(f, n);
    if (v.is_inf()) continue;
    if (compare(PowRat(c, r * n, f.p()), c - v.v) < 0) return false;
  }
  return true;
}

}  // namespace logdecay
