#pragma once

// Truncated Laurent series over F_q with exponents in (1/p^m)Z: the elements of
// the perfection of k((T)) known below a T-adic cutoff.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "field.hpp"
#include "rational.hpp"

namespace logdecay {

inline constexpr int kDefaultDenomBudget = 8;

namespace detail {

inline constexpr std::int64_t kInfExp = std::numeric_limits<std::int64_t>::max();

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r) || r == kInfExp) throw InputError("exponent overflow");
  return r;
}

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  if (a == kInfExp || b == kInfExp) return kInfExp;
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r) || r == kInfExp) throw InputError("exponent overflow");
  return r;
}

/// Scaled exponent num/p^m as an exact rational.
inline Rational scaled_to_rational(std::int64_t num, int m, long p) {
  return Rational(num) / Rational(ipow(BigInt(p), static_cast<unsigned long long>(m)));
}

/// num with e = num/p^m; raises if the denominator of e exceeds p^m.
inline std::int64_t rational_to_scaled(const Rational& e, int m, long p) {
  BigInt d = den(e);
  BigInt pm = ipow(BigInt(p), static_cast<unsigned long long>(m));
  if (pm % d != 0) throw InputError("exponent denominator exceeds scale");
  BigInt n = num(e) * (pm / d);
  if (abs(n) > BigInt(std::numeric_limits<std::int64_t>::max() / 4)) throw InputError("exponent overflow");
  return static_cast<std::int64_t>(n);
}

/// Least m with denominator of e dividing p^m; throws if den(e) is not a p-power.
inline int denominator_exponent(const Rational& e, long p) {
  int k = p_power_exponent(den(e), p);
  if (k < 0) throw InputError("exponent denominator is not a power of p");
  return k;
}

}  // namespace detail

/// A truncated element of k((T^{1/p^inf})). Terms at exponents >= cutoff are unknown.
class PerfSeries {
 public:
  using Term = std::pair<std::int64_t, std::uint32_t>;  // (scaled exponent, field code)

  PerfSeries() = default;
  explicit PerfSeries(const FieldSpec* f, int budget = kDefaultDenomBudget) : f_(f), budget_(budget) {}

  static PerfSeries zero(const FieldSpec* f, ExtRational cutoff = ExtRational::infinity(),
                         int budget = kDefaultDenomBudget) {
    PerfSeries s(f, budget);
    s.set_cutoff(cutoff);
    return s;
  }
  static PerfSeries one(const FieldSpec* f, int budget = kDefaultDenomBudget) {
    return monomial(FqElem(f, 1), 0, budget);
  }
  static PerfSeries monomial(const FqElem& c, const Rational& e, int budget = kDefaultDenomBudget) {
    PerfSeries s(c.field(), budget);
    if (c.is_zero()) return s;
    s.m_ = detail::denominator_exponent(e, c.p());
    s.check_budget();
    s.terms_.push_back({detail::rational_to_scaled(e, s.m_, c.p()), c.code()});
    return s;
  }
  /// Series from (exponent, coefficient) pairs; repeated exponents are summed.
  static PerfSeries from_terms(const FieldSpec* f, const std::vector<std::pair<Rational, FqElem>>& terms,
                               ExtRational cutoff = ExtRational::infinity(),
                               int budget = kDefaultDenomBudget) {
    PerfSeries s = zero(f, ExtRational::infinity(), budget);
    for (const auto& [e, c] : terms) s = s + monomial(c, e, budget);
    return s.truncate(cutoff);
  }

  const FieldSpec* field() const { return f_; }
  long p() const { return f_->p(); }
  int budget() const { return budget_; }
  int denom_exp() const { return m_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  std::vector<std::pair<Rational, FqElem>> terms() const {
    std::vector<std::pair<Rational, FqElem>> out;
    out.reserve(terms_.size());
    for (const auto& [e, c] : terms_) out.emplace_back(exp_of(e), FqElem(f_, c));
    return out;
  }
  ExtRational cutoff() const {
    return cut_ == detail::kInfExp ? ExtRational::infinity() : ExtRational(exp_of(cut_));
  }
  bool is_exact() const { return cut_ == detail::kInfExp; }
  /// Honest lower bound for v_T: leading known exponent, or the cutoff if no term is known.
  ExtRational valuation() const {
    if (!terms_.empty()) return exp_of(terms_.front().first);
    return cutoff();
  }
  /// True when the leading term is known, so valuation() is exact.
  bool valuation_known() const { return !terms_.empty(); }
  FqElem leading_coefficient() const {
    if (terms_.empty()) throw PrecisionExhausted("no known leading term");
    return FqElem(f_, terms_.front().second);
  }
  FqElem coefficient(const Rational& e) const {
    if (cutoff() <= ExtRational(e)) throw PrecisionExhausted("coefficient at or beyond cutoff");
    for (const auto& [x, c] : terms_)
      if (exp_of(x) == e) return FqElem(f_, c);
    return FqElem(f_, 0);
  }

  PerfSeries truncate(const ExtRational& c) const {
    if (c >= cutoff()) return *this;
    PerfSeries s = *this;
    s.set_cutoff(c);
    return s;
  }

  PerfSeries operator-() const {
    PerfSeries s = *this;
    for (auto& t : s.terms_) t.second = f_->neg(t.second);
    return s;
  }
  PerfSeries operator+(const PerfSeries& o) const {
    check(o);
    PerfSeries a = *this, b = o;
    align(a, b);
    PerfSeries s(f_, std::max(budget_, o.budget_));
    s.m_ = a.m_;
    s.cut_ = std::min(a.cut_, b.cut_);
    std::size_t i = 0, j = 0;
    while (i < a.terms_.size() || j < b.terms_.size()) {
      Term t;
      if (j == b.terms_.size() || (i < a.terms_.size() && a.terms_[i].first < b.terms_[j].first)) {
        t = a.terms_[i++];
      } else if (i == a.terms_.size() || b.terms_[j].first < a.terms_[i].first) {
        t = b.terms_[j++];
      } else {
        t = {a.terms_[i].first, f_->add(a.terms_[i].second, b.terms_[j].second)};
        ++i;
        ++j;
      }
      if (t.second != 0 && t.first < s.cut_) s.terms_.push_back(t);
    }
    s.normalize();
    return s;
  }
  PerfSeries operator-(const PerfSeries& o) const { return *this + (-o); }
  PerfSeries operator*(const PerfSeries& o) const {
    check(o);
    PerfSeries a = *this, b = o;
    align(a, b);
    PerfSeries s(f_, std::max(budget_, o.budget_));
    s.m_ = a.m_;
    std::int64_t va = a.terms_.empty() ? a.cut_ : a.terms_.front().first;
    std::int64_t vb = b.terms_.empty() ? b.cut_ : b.terms_.front().first;
    s.cut_ = std::min(detail::checked_add(va, b.cut_), detail::checked_add(vb, a.cut_));
    std::vector<Term> prod;
    prod.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        std::int64_t e = detail::checked_add(ea, eb);
        if (e >= s.cut_) break;
        prod.push_back({e, f_->mul(ca, cb)});
      }
    }
    s.terms_ = combine(f_, std::move(prod));
    s.normalize();
    return s;
  }
  PerfSeries& operator+=(const PerfSeries& o) { return *this = *this + o; }
  PerfSeries& operator-=(const PerfSeries& o) { return *this = *this - o; }
  PerfSeries& operator*=(const PerfSeries& o) { return *this = *this * o; }

  PerfSeries scale(const FqElem& c) const {
    if (c.field() != f_) throw FieldMismatch("scalar over another field");
    PerfSeries s = *this;
    s.terms_.clear();
    if (!c.is_zero())
      for (const auto& [e, x] : terms_) s.terms_.push_back({e, f_->mul(x, c.code())});
    return s;
  }
  /// Multiplication by T^e.
  PerfSeries shift(const Rational& e) const {
    return *this * monomial(FqElem(f_, 1), e, budget_);
  }

  PerfSeries pow(long long k) const {
    if (k < 0) throw InputError("negative power needs perf_inv");
    PerfSeries result = one(f_, budget_), base = *this;
    while (k) {
      if (k & 1) result *= base;
      k >>= 1;
      if (k) base *= base;
    }
    return result;
  }

  /// Inverse known below min(cutoff, own cutoff - 2 v_T).
  PerfSeries inv(const ExtRational& cutoff) const {
    if (terms_.empty()) {
      if (is_exact()) throw NotInvertible("zero series");
      throw PrecisionExhausted("leading term unknown, cannot invert");
    }
    Rational v = exp_of(terms_.front().first);
    FqElem lc(f_, terms_.front().second);
    ExtRational target = min(cutoff, this->cutoff() + ExtRational(-2 * v));
    PerfSeries lead = monomial(lc.inv(), -v, budget_);
    if (terms_.size() == 1) return lead.truncate(target);
    if (target.is_inf()) throw PrecisionExhausted("inverse of a non-monomial needs a finite cutoff");
    // u = x / (c T^v) = 1 + w with v_T(w) > 0.
    Rational rel = target.v + v;
    PerfSeries u = (*this * lead).truncate(ExtRational(rel));
    Rational reached = u.terms_.size() > 1 ? u.exp_of(u.terms_[1].first) : rel;
    // Newton: y <- y (2 - u y) doubles the number of correct leading exponents.
    PerfSeries y = one(f_, budget_);
    PerfSeries two = monomial(FqElem::from_int(f_, 2), 0, budget_);
    while (reached < rel) {
      PerfSeries uy = (u * y).truncate(ExtRational(rel));
      y = (y * (two - uy)).truncate(ExtRational(rel));
      reached *= 2;
    }
    y = y.truncate(ExtRational(rel));
    return (y * lead).truncate(target);
  }

  /// Exponents multiplied by p^e, coefficients raised to p^e.
  PerfSeries frob_pow(int e) const {
    PerfSeries s = *this;
    const long P = p();
    for (int i = 0; i < e; ++i) {
      for (auto& t : s.terms_) t.second = f_->frob(t.second);
      if (s.m_ > 0) {
        --s.m_;
      } else {
        for (auto& t : s.terms_) t.first = detail::checked_mul(t.first, P);
        if (s.cut_ != detail::kInfExp) s.cut_ = detail::checked_mul(s.cut_, P);
      }
    }
    for (int i = 0; i < -e; ++i) {
      for (auto& t : s.terms_) t.second = f_->frob_inv(t.second);
      ++s.m_;
    }
    s.normalize();
    return s;
  }

  /// Equality of terms and cutoff.
  friend bool operator==(const PerfSeries& a, const PerfSeries& b) {
    if (a.f_ != b.f_) return false;
    return a.terms() == b.terms() && a.cutoff() == b.cutoff();
  }
  friend bool operator!=(const PerfSeries& a, const PerfSeries& b) { return !(a == b); }

  /// Equality below the smaller cutoff.
  friend bool agree(const PerfSeries& a, const PerfSeries& b) {
    ExtRational c = min(a.cutoff(), b.cutoff());
    PerfSeries d = (a - b).truncate(c);
    return d.empty();
  }

  std::string str() const {
    std::string s;
    for (const auto& [e, c] : terms()) {
      if (!s.empty()) s += " + ";
      std::string cs = c.str();
      s += (cs == "1" ? std::string() : cs + "*") + "T^" + (den(e) == 1 ? to_string(e) : "(" + to_string(e) + ")");
    }
    if (s.empty()) s = "0";
    if (!is_exact()) s += " + O(T^" + cutoff().str() + ")";
    return s;
  }

  // Raw scaled access for the Witt layer.
  const std::vector<Term>& raw_terms() const { return terms_; }
  std::int64_t raw_cutoff() const { return cut_; }
  static PerfSeries from_raw(const FieldSpec* f, int m, std::vector<Term> terms, std::int64_t cut,
                             int budget) {
    PerfSeries s(f, budget);
    s.m_ = m;
    s.cut_ = cut;
    s.terms_ = combine(f, std::move(terms));
    s.terms_.erase(std::remove_if(s.terms_.begin(), s.terms_.end(),
                                  [cut](const Term& t) { return t.first >= cut; }),
                   s.terms_.end());
    s.normalize();
    return s;
  }
  /// Rescale to exponent denominator p^m (m >= current).
  PerfSeries rescaled(int m) const {
    PerfSeries s = *this;
    s.raise_scale(m);
    return s;
  }
  Rational exp_of(std::int64_t scaled) const { return detail::scaled_to_rational(scaled, m_, p()); }

 private:
  void check(const PerfSeries& o) const {
    if (o.f_ != f_) throw FieldMismatch("series over different fields");
  }
  void check_budget() const {
    if (m_ > budget_) throw BudgetExceeded("exponent denominator p^" + std::to_string(m_) +
                                           " exceeds budget p^" + std::to_string(budget_));
  }
  void set_cutoff(const ExtRational& c) {
    if (c.is_inf()) {
      cut_ = detail::kInfExp;
    } else {
      int k = detail::denominator_exponent(c.v, p());
      if (k > m_) raise_scale(k);
      cut_ = detail::rational_to_scaled(c.v, m_, p());
    }
    terms_.erase(std::remove_if(terms_.begin(), terms_.end(),
                                [this](const Term& t) { return t.first >= cut_; }),
                 terms_.end());
    normalize();
  }
  void raise_scale(int m) {
    while (m_ < m) {
      for (auto& t : terms_) t.first = detail::checked_mul(t.first, p());
      if (cut_ != detail::kInfExp) cut_ = detail::checked_mul(cut_, p());
      ++m_;
    }
  }
  static void align(PerfSeries& a, PerfSeries& b) {
    int m = std::max(a.m_, b.m_);
    a.raise_scale(m);
    b.raise_scale(m);
  }
  static std::vector<Term> combine(const FieldSpec* f, std::vector<Term> v) {
    std::sort(v.begin(), v.end(), [](const Term& x, const Term& y) { return x.first < y.first; });
    std::vector<Term> out;
    out.reserve(v.size());
    for (const auto& t : v) {
      if (!out.empty() && out.back().first == t.first) {
        out.back().second = f->add(out.back().second, t.second);
      } else {
        out.push_back(t);
      }
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return t.second == 0; }),
              out.end());
    return out;
  }
  void normalize() {
    const long P = p();
    while (m_ > 0) {
      bool divisible = cut_ == detail::kInfExp || cut_ % P == 0;
      for (const auto& t : terms_) {
        if (!divisible) break;
        divisible = t.first % P == 0;
      }
      if (!divisible) break;
      for (auto& t : terms_) t.first /= P;
      if (cut_ != detail::kInfExp) cut_ /= P;
      --m_;
    }
    check_budget();
  }

  const FieldSpec* f_ = nullptr;
  int budget_ = kDefaultDenomBudget;
  int m_ = 0;
  std::vector<Term> terms_;
  std::int64_t cut_ = detail::kInfExp;
};

}  // namespace logdecay
