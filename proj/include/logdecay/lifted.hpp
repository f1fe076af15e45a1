#pragma once

// W_n of the perfected Laurent field, realized as series in T^{1/p^inf} with
// coefficients in W_n(F_q). The Teichmuller representative of T is T itself.
//
// Knowledge is tracked per p-adic level: coefficients modulo p^{j+1} are known
// at exponents below cut[j]. cut is non-increasing in j, and every stored
// coefficient is reduced modulo p^{l(e)} with l(e) = #{j : e < cut[j]}.

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "galois_ring.hpp"
#include "perf_series.hpp"

namespace logdecay::detail {

class Lifted {
 public:
  using Term = std::pair<std::int64_t, Zq>;

  Lifted() = default;
  explicit Lifted(const RingSpec* r) : r_(r), cut_(r->N(), kInfExp) {}

  static Lifted constant(const Zq& c) {
    Lifted l(c.ring());
    if (!c.is_zero()) l.terms_.push_back({0, c});
    return l;
  }
  static Lifted from_int(const RingSpec* r, long long v) { return constant(Zq::from_int(r, v)); }
  /// c * T^(num / p^m).
  static Lifted monomial(const Zq& c, std::int64_t num, int m) {
    Lifted l(c.ring());
    l.m_ = m;
    if (!c.is_zero()) l.terms_.push_back({num, c});
    l.canonicalize();
    return l;
  }

  /// Element with the given scaled terms and per-level cutoffs.
  static Lifted from_parts(const RingSpec* r, int m, std::vector<Term> terms, std::vector<std::int64_t> cuts) {
    if (static_cast<int>(cuts.size()) != r->N()) throw InputError("one cutoff per level required");
    Lifted l(r);
    l.m_ = m;
    l.terms_ = combine(std::move(terms));
    l.cut_ = std::move(cuts);
    l.canonicalize();
    return l;
  }
  /// Coordinatewise lift of a residue series with every level declared exact.
  static Lifted lift_coordinates(const PerfSeries& x, const RingSpec* r) {
    std::vector<Term> t;
    for (const auto& [e, c] : x.raw_terms()) t.push_back({e, Zq::lift(r, FqElem(x.field(), c))});
    return from_parts(r, x.denom_exp(), std::move(t), std::vector<std::int64_t>(r->N(), kInfExp));
  }

  const RingSpec* ring() const { return r_; }
  int levels() const { return r_->N(); }
  int scale() const { return m_; }
  long p() const { return r_->p(); }
  const std::vector<Term>& terms() const { return terms_; }
  const std::vector<std::int64_t>& cuts() const { return cut_; }

  Lifted operator-() const {
    Lifted s = *this;
    for (auto& t : s.terms_) t.second = -t.second;
    s.canonicalize();
    return s;
  }
  Lifted operator+(const Lifted& o) const {
    check(o);
    Lifted a = *this, b = o;
    align(a, b);
    Lifted s(r_);
    s.m_ = a.m_;
    for (int j = 0; j < levels(); ++j) s.cut_[j] = std::min(a.cut_[j], b.cut_[j]);
    std::size_t i = 0, k = 0;
    while (i < a.terms_.size() || k < b.terms_.size()) {
      if (k == b.terms_.size() || (i < a.terms_.size() && a.terms_[i].first < b.terms_[k].first)) {
        s.terms_.push_back(a.terms_[i++]);
      } else if (i == a.terms_.size() || b.terms_[k].first < a.terms_[i].first) {
        s.terms_.push_back(b.terms_[k++]);
      } else {
        s.terms_.push_back({a.terms_[i].first, a.terms_[i].second + b.terms_[k].second});
        ++i;
        ++k;
      }
    }
    s.canonicalize();
    return s;
  }
  Lifted operator-(const Lifted& o) const { return *this + (-o); }

  Lifted operator*(const Lifted& o) const {
    check(o);
    Lifted a = *this, b = o;
    align(a, b);
    const int n = levels();
    Lifted s(r_);
    s.m_ = a.m_;
    auto min_exp_by_vp = [n](const Lifted& x) {
      std::vector<std::int64_t> best(n, kInfExp);
      for (const auto& [e, c] : x.terms_) {
        int v = c.vp();
        if (v < n) best[v] = std::min(best[v], e);
      }
      return best;
    };
    std::vector<std::int64_t> ea = min_exp_by_vp(a), eb = min_exp_by_vp(b);
    for (int j = 0; j < n; ++j) {
      std::int64_t c = kInfExp;
      for (int t = 0; t <= j; ++t) {
        c = std::min(c, checked_add(ea[t], b.cut_[j - t]));
        c = std::min(c, checked_add(eb[t], a.cut_[j - t]));
        c = std::min(c, checked_add(a.cut_[t], b.cut_[j - t]));
      }
      s.cut_[j] = c;
    }
    const std::int64_t top = *std::max_element(s.cut_.begin(), s.cut_.end());
    std::vector<Term> prod;
    prod.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& [xa, ca] : a.terms_) {
      for (const auto& [xb, cb] : b.terms_) {
        std::int64_t e = checked_add(xa, xb);
        if (e >= top) break;
        prod.push_back({e, ca * cb});
      }
    }
    s.terms_ = combine(std::move(prod));
    s.canonicalize();
    return s;
  }
  Lifted& operator+=(const Lifted& o) { return *this = *this + o; }
  Lifted& operator-=(const Lifted& o) { return *this = *this - o; }
  Lifted& operator*=(const Lifted& o) { return *this = *this * o; }

  Lifted scale_by(const Zq& c) const { return *this * constant(c); }

  Lifted pow(long long k) const {
    if (k < 0) throw InputError("negative power of lifted series");
    Lifted result = from_int(r_, 1), base = *this;
    while (k) {
      if (k & 1) result *= base;
      k >>= 1;
      if (k) base *= base;
    }
    return result;
  }

  /// Frobenius: T^e -> T^{pe}, coefficients through the Witt Frobenius of W_n(F_q).
  Lifted frob(int e) const {
    Lifted s = *this;
    for (int i = 0; i < e; ++i) {
      for (auto& t : s.terms_) t.second = t.second.frob();
      if (s.m_ > 0) {
        --s.m_;
      } else {
        for (auto& t : s.terms_) t.first = checked_mul(t.first, p());
        for (auto& c : s.cut_)
          if (c != kInfExp) c = checked_mul(c, p());
      }
    }
    for (int i = 0; i < -e; ++i) {
      for (auto& t : s.terms_) t.second = t.second.frob_inv();
      ++s.m_;
    }
    s.reduce_scale();
    return s;
  }

  /// The same element viewed with fewer levels.
  Lifted with_levels(int n) const {
    if (n > levels()) throw PrecisionExhausted("cannot raise p-adic precision");
    if (n < 1) throw PrecisionExhausted("p-adic precision underflow");
    const RingSpec* r = RingSpec::get(r_->field(), n);
    Lifted s(r);
    s.m_ = m_;
    for (int j = 0; j < n; ++j) s.cut_[j] = cut_[j];
    for (const auto& [e, c] : terms_) s.terms_.push_back({e, recoef(c, r)});
    s.canonicalize();
    return s;
  }

  /// p^k * this, viewed in a ring with levels() + k levels.
  Lifted times_p(int k, int target_levels) const {
    if (target_levels > levels() + k) throw PrecisionExhausted("cannot raise p-adic precision");
    const RingSpec* r = RingSpec::get(r_->field(), target_levels);
    Lifted s(r);
    s.m_ = m_;
    for (int j = 0; j < target_levels; ++j) s.cut_[j] = j < k ? kInfExp : cut_[j - k];
    std::int64_t pk = 1;
    for (int i = 0; i < k; ++i) pk *= p();
    for (const auto& [e, c] : terms_) s.terms_.push_back({e, recoef(c, r).scale(pk)});
    s.canonicalize();
    return s;
  }

  /// this / p, one level fewer. Requires level 0 to vanish on its known range.
  Lifted div_p() const {
    if (levels() < 2) throw PrecisionExhausted("p-adic precision underflow");
    const RingSpec* r = RingSpec::get(r_->field(), levels() - 1);
    Lifted s(r);
    s.m_ = m_;
    for (int j = 0; j + 1 < levels(); ++j) s.cut_[j] = cut_[j + 1];
    for (const auto& [e, c] : terms_) {
      if (e >= s.cut_[0]) continue;
      s.terms_.push_back({e, recoef(c.div_p(1), r)});
    }
    s.canonicalize();
    return s;
  }

  /// Level-0 reduction as a series over F_q.
  PerfSeries residue(int budget) const {
    std::vector<PerfSeries::Term> t;
    for (const auto& [e, c] : terms_) {
      if (e >= cut_[0]) continue;
      FqElem x = c.residue();
      if (!x.is_zero()) t.push_back({e, x.code()});
    }
    return PerfSeries::from_raw(r_->field(), m_, std::move(t), cut_[0], std::max(budget, m_));
  }

  /// Teichmuller representative of x with n levels.
  static Lifted teichmuller(const PerfSeries& x, const RingSpec* r) {
    const int n = r->N();
    const long P = r->p();
    Lifted out(r);
    if (x.empty()) {
      out.m_ = x.denom_exp();
      std::fill(out.cut_.begin(), out.cut_.end(), x.raw_cutoff());
      out.canonicalize();
      return out;
    }
    // x = c T^v (1 + w) with w known below kappa - v.
    const int m = x.denom_exp();
    const std::int64_t v = x.raw_terms().front().first;
    const FqElem c(x.field(), x.raw_terms().front().second);
    const FqElem cinv = c.inv();
    const std::int64_t kappa = x.raw_cutoff();
    const int M = m + (n - 1);
    // w^{1/p^{n-1}} lifted coordinatewise: same numerators at scale M.
    Lifted base = from_int(r, 1);
    base.m_ = M;
    for (std::size_t i = 1; i < x.raw_terms().size(); ++i) {
      FqElem coef = FqElem(x.field(), x.raw_terms()[i].second) * cinv;
      for (int k = 0; k + 1 < n; ++k) coef = coef.frob_inv();
      base.terms_.push_back({x.raw_terms()[i].first - v, Zq::lift(r, coef)});
    }
    std::int64_t rel_cut = kInfExp;
    if (kappa != kInfExp) {
      // Work with the truncated representative up to the level-0 cutoff; the
      // honest per-level cutoffs are imposed on the result below.
      rel_cut = checked_mul(kappa - v, ipow64(P, n - 1));
      std::fill(base.cut_.begin(), base.cut_.end(), rel_cut);
    }
    base.canonicalize();
    Lifted y = base;
    for (int k = 0; k + 1 < n; ++k) y = y.pow(P);
    // Honest cutoffs: level l is known below v + (kappa - v)/p^l.
    Lifted lead = monomial(Zq::teichmuller(r, c), checked_mul(v, ipow64(P, n - 1)), M);
    Lifted res = lead * y;
    res.raise_scale(M);  // the product may have reduced its scale
    if (kappa != kInfExp) {
      for (int l = 0; l < n; ++l) {
        std::int64_t vs = checked_mul(v, ipow64(P, n - 1));
        res.cut_[l] = vs + (kappa - v) * ipow64(P, n - 1 - l);
      }
    } else {
      std::fill(res.cut_.begin(), res.cut_.end(), kInfExp);
    }
    res.canonicalize();
    res.reduce_scale();
    return res;
  }

  /// Sum of p^i [x_i] over the given slices, with slices.size() levels.
  static Lifted from_slices(const std::vector<PerfSeries>& slices) {
    if (slices.empty()) throw PrecisionExhausted("no slices");
    const int n = static_cast<int>(slices.size());
    const FieldSpec* f = slices.front().field();
    Lifted acc(RingSpec::get(f, n));
    for (int i = 0; i < n; ++i) {
      if (slices[i].field() != f) throw FieldMismatch("slices over different fields");
      Lifted t = teichmuller(slices[i], RingSpec::get(f, n - i));
      acc += t.times_p(i, n);
    }
    return acc;
  }

  /// Teichmuller slices x_0..x_{n-1} with this = sum p^i [x_i].
  std::vector<PerfSeries> slices(int budget) const {
    std::vector<PerfSeries> out;
    Lifted rest = *this;
    for (int i = 0; i < levels(); ++i) {
      PerfSeries x = rest.residue(64);
      out.push_back(x);
      if (i + 1 == levels()) break;
      rest = (rest - teichmuller(x, rest.r_)).div_p();
    }
    std::vector<PerfSeries> checked;
    for (const auto& s : out)
      checked.push_back(PerfSeries::from_raw(s.field(), s.denom_exp(), s.raw_terms(), s.raw_cutoff(), budget));
    return checked;
  }

  /// Inverse of an element whose slice 0 has a known leading term; slice 0 of
  /// the starting approximation is computed up to t_cutoff.
  Lifted inv(const ExtRational& t_cutoff) const {
    PerfSeries y0 = residue(64).inv(t_cutoff);
    return inv_from(teichmuller(y0, r_), t_cutoff);
  }

  /// Inverse starting from an approximation y whose residue agrees with the
  /// inverse. Newton steps run on exact truncations below t_cutoff; the final
  /// error e = 1 - this*y is bounded per level and sum_k e^k is carried as
  /// unknown terms, so the returned cutoffs are honest.
  Lifted inv_from(Lifted y, const ExtRational& t_cutoff) const {
    check(y);
    const Lifted one = from_int(r_, 1);
    y = y.exact_below(t_cutoff);
    bool stable = false;
    for (int it = 0; it < 64 && !stable; ++it) {
      Lifted e = one - *this * y;
      Lifted next = (y + y * e.exact_below(ExtRational::infinity())).exact_below(t_cutoff);
      stable = next.m_ == y.m_ && next.terms_ == y.terms_;
      y = std::move(next);
    }
    if (!stable) throw PrecisionExhausted("Newton iteration for the inverse did not stabilize");
    Lifted e = one - *this * y;
    Lifted err(r_);
    err.m_ = e.m_;
    err.cut_ = e.level_valuations();
    if (err.cut_[0] != kInfExp && err.cut_[0] < 0) throw PrecisionExhausted("inverse error is not T-adically small");
    Lifted sum = err, power = err;
    for (int k = 1; k < levels(); ++k) {
      power = power * err;
      sum = sum + power;
    }
    return y + y * sum;
  }

  /// Terms below t with every level declared exact.
  Lifted exact_below(const ExtRational& t) const {
    Lifted s = *this;
    std::int64_t bound = kInfExp;
    if (!t.is_inf()) {
      s.raise_scale(std::max(s.m_, denominator_exponent(t.v, p())));
      bound = rational_to_scaled(t.v, s.m_, p());
    }
    std::vector<Term> kept;
    for (const auto& [e, c] : s.terms_) {
      if (e >= bound) break;
      kept.push_back({e, c});
    }
    s.terms_ = std::move(kept);
    std::fill(s.cut_.begin(), s.cut_.end(), kInfExp);
    s.canonicalize();
    return s;
  }

  /// Per level j, the least exponent where the element may be nonzero modulo p^{j+1}.
  std::vector<std::int64_t> level_valuations() const {
    std::vector<std::int64_t> out = cut_;
    for (const auto& [e, c] : terms_) {
      for (int j = c.vp(); j < levels(); ++j) out[j] = std::min(out[j], e);
    }
    for (int j = 1; j < levels(); ++j) out[j] = std::min(out[j], out[j - 1]);
    return out;
  }

  /// True when the difference has no known nonzero term.
  bool equal_at_precision(const Lifted& o) const {
    Lifted d = *this - o;
    return d.terms_.empty();
  }

 private:
  void check(const Lifted& o) const {
    if (o.r_ != r_) throw FieldMismatch("lifted series over different rings");
  }
  static Zq recoef(const Zq& c, const RingSpec* r) {
    std::vector<long long> co = c.coords();
    for (auto& v : co) v %= r->modulus_pN();
    return Zq::from_coords(r, co);
  }
  void raise_scale(int m) {
    while (m_ < m) {
      for (auto& t : terms_) t.first = checked_mul(t.first, p());
      for (auto& c : cut_)
        if (c != kInfExp) c = checked_mul(c, p());
      ++m_;
    }
  }
  static void align(Lifted& a, Lifted& b) {
    int m = std::max(a.m_, b.m_);
    a.raise_scale(m);
    b.raise_scale(m);
  }
  void reduce_scale() {
    const long P = p();
    while (m_ > 0) {
      bool ok = true;
      for (auto c : cut_)
        if (c != kInfExp && c % P != 0) ok = false;
      for (const auto& t : terms_)
        if (t.first % P != 0) ok = false;
      if (!ok) break;
      for (auto& c : cut_)
        if (c != kInfExp) c /= P;
      for (auto& t : terms_) t.first /= P;
      --m_;
    }
  }
  static std::vector<Term> combine(std::vector<Term> v) {
    std::sort(v.begin(), v.end(), [](const Term& x, const Term& y) { return x.first < y.first; });
    std::vector<Term> out;
    out.reserve(v.size());
    for (auto& t : v) {
      if (!out.empty() && out.back().first == t.first) {
        out.back().second += t.second;
      } else {
        out.push_back(std::move(t));
      }
    }
    return out;
  }
  void canonicalize() {
    const int n = levels();
    for (int j = n - 1; j >= 1; --j) cut_[j - 1] = std::max(cut_[j - 1], cut_[j]);
    std::vector<Term> kept;
    kept.reserve(terms_.size());
    for (auto& [e, c] : terms_) {
      int l = 0;
      while (l < n && e < cut_[l]) ++l;
      if (l == 0) continue;
      Zq r = c.truncate(l);
      if (!r.is_zero()) kept.push_back({e, r});
    }
    terms_ = std::move(kept);
    reduce_scale();
  }

  const RingSpec* r_ = nullptr;
  int m_ = 0;
  std::vector<Term> terms_;
  std::vector<std::int64_t> cut_;
};

}  // namespace logdecay::detail
