#pragma once

// Degree-p Artin-Schreier extensions L = K(y), y^p - y = f, K = k((T)), with
// f a Laurent polynomial of pole order n prime to p. Elements of L are kept in
// the basis 1, y, ..., y^{p-1} over K. Because v_L(y) = -n and n is prime to p,
// the summands a_i y^i have distinct valuations, so
//   v_L(sum a_i y^i) = min_i (p v_T(a_i) - n i).
// The elements z_i = y^i T^{ceil(n i / p)} have v_L(z_i) in [0, p) pairwise
// distinct, hence form an O_K-basis of O_L.

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "matrix.hpp"
#include "perf_series.hpp"
#include "ramification.hpp"

namespace logdecay {

struct ASExtension {
  PerfSeries f;  // exact, integer exponents
  int M = 0;     // T-adic working precision for inverses

  long p() const { return f.p(); }
  const FieldSpec* field() const { return f.field(); }

  /// Pole order n of f.
  long pole_order() const {
    if (!f.valuation_known() || f.valuation().v >= 0) throw InputError("f must have a pole");
    return static_cast<long>(-num(f.valuation().v));
  }

  void validate() const {
    if (!f.field()) throw InputError("f has no field");
    if (!f.is_exact()) throw InputError("f must be an exact Laurent polynomial");
    for (const auto& [e, c] : f.terms())
      if (den(e) != 1) throw InputError("f must have integer exponents");
    const long n = pole_order();
    if (std::gcd(n, p()) != 1) throw InputError("pole order " + std::to_string(n) + " is divisible by p");
    if (M < 8 * n * p()) throw InputError("precision M must be at least 8 n p");
  }
};

/// An element of L in the basis y^i, with an exact or truncated coefficient each.
class ASElem {
 public:
  ASElem(const ASExtension* ext, std::vector<PerfSeries> a) : ext_(ext), a_(std::move(a)) {
    if (static_cast<long>(a_.size()) != ext_->p()) throw InputError("element needs p coordinates");
  }
  static ASElem scalar(const ASExtension* ext, const PerfSeries& c) {
    std::vector<PerfSeries> a(ext->p(), PerfSeries::zero(ext->field()));
    a[0] = c;
    return {ext, a};
  }
  static ASElem y(const ASExtension* ext) {
    std::vector<PerfSeries> a(ext->p(), PerfSeries::zero(ext->field()));
    a[1] = PerfSeries::one(ext->field());
    return {ext, a};
  }

  const std::vector<PerfSeries>& coords() const { return a_; }
  const PerfSeries& coord(long i) const { return a_[i]; }

  ASElem operator+(const ASElem& o) const {
    ASElem r = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
    return r;
  }
  ASElem operator-(const ASElem& o) const {
    ASElem r = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] -= o.a_[i];
    return r;
  }
  /// Product reduced with y^p = y + f.
  ASElem operator*(const ASElem& o) const {
    const long p = ext_->p();
    std::vector<PerfSeries> c(2 * p - 1, PerfSeries::zero(ext_->field()));
    for (long i = 0; i < p; ++i) {
      if (a_[i].empty() && a_[i].is_exact()) continue;
      for (long j = 0; j < p; ++j) c[i + j] += a_[i] * o.a_[j];
    }
    for (long d = 2 * p - 2; d >= p; --d) {
      c[d - p + 1] += c[d];
      c[d - p] += c[d] * ext_->f;
    }
    c.resize(p);
    return {ext_, c};
  }
  ASElem pow(long k) const {
    if (k < 0) return inverse().pow(-k);
    ASElem r = scalar(ext_, PerfSeries::one(ext_->field())), b = *this;
    while (k) {
      if (k & 1) r = r * b;
      k >>= 1;
      if (k) b = b * b;
    }
    return r;
  }

  /// The generator of the Galois group: y -> y + 1.
  ASElem galois() const {
    const long p = ext_->p();
    std::vector<PerfSeries> c(p, PerfSeries::zero(ext_->field()));
    for (long i = 0; i < p; ++i) {
      long binom = 1;  // C(i, j) mod p
      for (long j = i; j >= 0; --j) {
        c[j] += a_[i].scale(FqElem::from_int(ext_->field(), binom));
        binom = binom * j % p * inverse_mod(i - j + 1, p) % p;
      }
    }
    return {ext_, c};
  }

  /// Product of all Galois conjugates; lies in K.
  PerfSeries norm() const {
    ASElem prod = *this, conj = *this;
    for (long k = 1; k < ext_->p(); ++k) {
      conj = conj.galois();
      prod = prod * conj;
    }
    return prod.a_[0];
  }

  /// Sum of all Galois conjugates; lies in K.
  PerfSeries trace() const {
    ASElem sum = *this, conj = *this;
    for (long k = 1; k < ext_->p(); ++k) {
      conj = conj.galois();
      sum = sum + conj;
    }
    return sum.a_[0];
  }

  /// x^{-1} = (product of the other conjugates) / N(x); N(x) inverted below T^M.
  ASElem inverse() const {
    ASElem others = scalar(ext_, PerfSeries::one(ext_->field())), conj = *this;
    for (long k = 1; k < ext_->p(); ++k) {
      conj = conj.galois();
      others = others * conj;
    }
    return others * scalar(ext_, norm().inv(ExtRational(ext_->M)));
  }

  /// v_L with v_L(T) = p. Raises PrecisionExhausted when truncation hides the minimum.
  ExtRational valuation() const {
    const long p = ext_->p(), n = ext_->pole_order();
    ExtRational known = ExtRational::infinity(), hidden = ExtRational::infinity();
    for (long i = 0; i < p; ++i) {
      if (a_[i].valuation_known()) known = min(known, ExtRational(a_[i].valuation().v * p - n * i));
      if (!a_[i].is_exact()) hidden = min(hidden, ExtRational(a_[i].cutoff().v * p - n * i));
    }
    if (!(known < hidden) && !hidden.is_inf()) throw PrecisionExhausted("valuation hidden below the cutoff");
    return known;
  }

  /// Coordinates in the O_K-basis z_i = y^i T^{ceil(n i / p)}.
  std::vector<PerfSeries> integral_coords() const {
    const long p = ext_->p(), n = ext_->pole_order();
    std::vector<PerfSeries> b;
    for (long i = 0; i < p; ++i) b.push_back(a_[i].shift(-Rational(ceil(Rational(n * i, p)))));
    return b;
  }

 private:
  static long inverse_mod(long a, long p) {
    long r = 1, b = a % p, e = p - 2;
    while (e) {
      if (e & 1) r = r * b % p;
      b = b * b % p;
      e >>= 1;
    }
    return r;
  }

  const ASExtension* ext_;
  std::vector<PerfSeries> a_;
};

/// Uniformizer T_L = y^a T^b with -n a + p b = 1 and 1 <= a < p.
inline ASElem as_uniformizer(const ASExtension& ext) {
  const long p = ext.p(), n = ext.pole_order();
  long a = 1;
  while ((n * a + 1) % p != 0) ++a;
  const long b = (n * a + 1) / p;
  return ASElem::y(&ext).pow(a) * ASElem::scalar(&ext, PerfSeries::monomial(FqElem(ext.field(), 1), b));
}

/// Exponents d_1 <= ... <= d_k with coker(R) = sum k[[T]]/T^{d_i}, from the
/// determinantal divisors D_s = min v_T(s x s minor). Entries must be exact.
inline std::vector<BigInt> elementary_divisors(const Matrix<PerfSeries>& R) {
  check_square(R);
  const std::size_t k = rows(R);
  auto subsets = [&](std::size_t s) {
    std::vector<std::vector<std::size_t>> out;
    for (std::uint64_t mask = 0; mask < (1ULL << k); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcountll(mask)) != s) continue;
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < k; ++i)
        if (mask >> i & 1) idx.push_back(i);
      out.push_back(idx);
    }
    return out;
  };
  std::vector<BigInt> D{0};
  for (std::size_t s = 1; s <= k; ++s) {
    ExtRational best = ExtRational::infinity();
    for (const auto& ri : subsets(s))
      for (const auto& ci : subsets(s)) {
        Matrix<PerfSeries> m;
        for (auto i : ri) {
          m.emplace_back();
          for (auto j : ci) m.back().push_back(R[i][j]);
        }
        PerfSeries d = det(m);
        if (!d.is_exact()) throw PrecisionExhausted("minor is not exact");
        if (d.valuation_known()) best = min(best, d.valuation());
      }
    if (best.is_inf()) throw InputError("matrix is singular: cokernel is not torsion");
    if (best.v < 0 || den(best.v) != 1) throw InputError("matrix is not integral");
    D.push_back(num(best.v));
  }
  std::vector<BigInt> d;
  for (std::size_t s = 1; s <= k; ++s) d.push_back(D[s] - D[s - 1]);
  return d;
}

struct ValuationSample {
  long j;               // x = T_L^j
  ExtRational v_x;      // v_T(x)
  ExtRational v_diff;   // v_T(x - g x)
  Rational bound;       // v_T(x) + (lambda - 1)/p
  bool holds;
};

struct ASReport {
  long p = 0;
  long n = 0;
  Rational v_L_g_minus_id;  // v_L(g(T_L) - T_L)
  long break_lower = 0;     // v_L(g(T_L) - T_L) - 1
  long break_upper = 0;
  std::vector<Rational> e_valuations;  // v_L(g(T_L^i) - T_L^i), i = 1..p-1
  std::vector<BigInt> elementary_divisors;
  BigInt torsion_exponent;  // least e with T^e H^1 = 0
  BigInt torsion_bound;     // ceil((n + 1)/p)
  bool torsion_within_bound = false;
  std::vector<ValuationSample> samples;
  bool samples_hold = true;
  RamFiltration filtration;
};

/// Break, H^1(G, O_L) = ker(trace) / im(1 - g), and sampled displacement bounds.
inline ASReport as_analyze(const ASExtension& ext, int sample_radius = 5) {
  ext.validate();
  ASReport rep;
  rep.p = ext.p();
  rep.n = ext.pole_order();
  const long p = rep.p;
  const ASElem TL = as_uniformizer(ext);
  if (TL.valuation() != ExtRational(1)) throw VerdictFailure("uniformizer has valuation " + TL.valuation().str());

  const ExtRational vg = (TL.galois() - TL).valuation();
  rep.v_L_g_minus_id = vg.v;
  rep.break_lower = static_cast<long>(num(vg.v)) - 1;
  rep.filtration = RamFiltration::from_steps(Numbering::lower, p, {{Rational(rep.break_lower), p}});
  rep.break_upper = static_cast<long>(num(convert_numbering(rep.filtration).top_break()));

  // im(1 - g) is spanned by e_i = g(T_L^i) - T_L^i; ker(trace) has the basis
  // z_i - (t_i / t_j) z_j (i != j) for t_i = trace(z_i) of least valuation at j,
  // so a vector of ker(trace) has coordinates (v_i)_{i != j} in that basis.
  std::vector<std::vector<PerfSeries>> image;
  ASElem power = TL;
  for (long i = 1; i < p; ++i) {
    ASElem e = power.galois() - power;
    rep.e_valuations.push_back(e.valuation().v);
    image.push_back(e.integral_coords());
    power = power * TL;
  }
  long j = -1;
  ExtRational best = ExtRational::infinity();
  for (long i = 0; i < p; ++i) {
    std::vector<PerfSeries> a(p, PerfSeries::zero(ext.field()));
    a[i] = PerfSeries::monomial(FqElem(ext.field(), 1), Rational(ceil(Rational(rep.n * i, p))));
    PerfSeries t = ASElem(&ext, a).trace();
    if (t.valuation_known() && (j < 0 || t.valuation() < best)) {
      best = t.valuation();
      j = i;
    }
  }
  if (j < 0) throw VerdictFailure("trace vanishes on O_L");
  Matrix<PerfSeries> R;
  for (long i = 0; i < p; ++i) {
    if (i == j) continue;
    R.emplace_back();
    for (long c = 0; c < p - 1; ++c) R.back().push_back(image[c][i]);
  }
  rep.elementary_divisors = elementary_divisors(R);
  rep.torsion_exponent = *std::max_element(rep.elementary_divisors.begin(), rep.elementary_divisors.end());
  rep.torsion_bound = ceil(Rational(rep.n + 1, p));
  rep.torsion_within_bound = rep.torsion_exponent <= rep.torsion_bound;

  const Rational slack = Rational(rep.break_lower - 1, p);
  const ASElem TLinv = TL.inverse();
  for (long k = -sample_radius; k <= sample_radius; ++k) {
    ASElem x = k >= 0 ? TL.pow(k) : TLinv.pow(-k);
    ValuationSample s;
    s.j = k;
    s.v_x = ExtRational(x.valuation().v / p);
    ExtRational vd = (x - x.galois()).valuation();
    s.v_diff = vd.is_inf() ? vd : ExtRational(vd.v / p);
    s.bound = s.v_x.v + slack;
    s.holds = s.v_diff >= ExtRational(s.bound);
    rep.samples_hold = rep.samples_hold && s.holds;
    rep.samples.push_back(s);
  }
  return rep;
}

}  // namespace logdecay
