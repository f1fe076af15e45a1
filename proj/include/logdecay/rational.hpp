#pragma once

// Exact rationals, rationals extended by +infinity, quantities q*p^e with
// rational e, and rational brackets for base-p logarithms.

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/rational_adaptor.hpp>

#include <cstdint>
#include <string>
#include <utility>

#include "errors.hpp"

namespace logdecay {

using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                            boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<
    boost::multiprecision::rational_adaptor<boost::multiprecision::cpp_int_backend<>>,
    boost::multiprecision::et_off>;

inline Rational rat(long long num, long long den = 1) { return Rational(num) / Rational(den); }

inline BigInt num(const Rational& x) { return boost::multiprecision::numerator(x); }
inline BigInt den(const Rational& x) { return boost::multiprecision::denominator(x); }

inline BigInt floor(const Rational& x) {
  BigInt n = num(x), d = den(x);
  BigInt q = n / d;
  if (n < 0 && q * d != n) q -= 1;
  return q;
}

inline BigInt ceil(const Rational& x) { return -floor(-x); }

inline BigInt ipow(BigInt base, unsigned long long e) {
  BigInt r = 1;
  while (e) {
    if (e & 1U) r *= base;
    e >>= 1U;
    if (e) base *= base;
  }
  return r;
}

inline std::int64_t ipow64(std::int64_t base, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

/// p-adic valuation of a nonzero integer.
inline int vp(BigInt n, long p) {
  if (n == 0) throw InputError("vp of zero");
  if (n < 0) n = -n;
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

/// Exponent k with d = p^k, or -1 if d is not a power of p.
inline int p_power_exponent(BigInt d, long p) {
  if (d <= 0) return -1;
  int k = 0;
  while (d % p == 0) {
    d /= p;
    ++k;
  }
  return d == 1 ? k : -1;
}

inline std::string to_string(const Rational& x) {
  if (den(x) == 1) return num(x).str();
  return num(x).str() + "/" + den(x).str();
}

inline Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(s));
    BigInt n(s.substr(0, slash)), d(s.substr(slash + 1));
    if (d == 0) throw InputError("zero denominator in '" + s + "'");
    return Rational(n) / Rational(d);
  } catch (const std::runtime_error&) {
    throw InputError("malformed rational '" + s + "'");
  }
}

/// A rational number or +infinity. Used for T-adic cutoffs and valuations.
struct ExtRational {
  bool inf = true;
  Rational v = 0;

  ExtRational() = default;
  ExtRational(const Rational& x) : inf(false), v(x) {}  // NOLINT(implicit)
  ExtRational(long long x) : inf(false), v(x) {}        // NOLINT(implicit)
  static ExtRational infinity() { return {}; }

  bool is_inf() const { return inf; }

  friend bool operator==(const ExtRational& a, const ExtRational& b) {
    return a.inf == b.inf && (a.inf || a.v == b.v);
  }
  friend bool operator<(const ExtRational& a, const ExtRational& b) {
    if (a.inf) return false;
    if (b.inf) return true;
    return a.v < b.v;
  }
  friend bool operator<=(const ExtRational& a, const ExtRational& b) { return !(b < a); }
  friend bool operator>(const ExtRational& a, const ExtRational& b) { return b < a; }
  friend bool operator>=(const ExtRational& a, const ExtRational& b) { return !(a < b); }
  friend ExtRational operator+(const ExtRational& a, const ExtRational& b) {
    if (a.inf || b.inf) return infinity();
    return a.v + b.v;
  }
  friend ExtRational min(const ExtRational& a, const ExtRational& b) { return b < a ? b : a; }
  friend ExtRational max(const ExtRational& a, const ExtRational& b) { return a < b ? b : a; }

  std::string str() const { return inf ? std::string("inf") : to_string(v); }
};

/// Sign of x - p^e for x > 0, decided exactly.
inline int compare_with_power(const Rational& x, long p, const Rational& e) {
  if (x <= 0) return -1;
  BigInt a = num(e), b = den(e);
  BigInt n = num(x), d = den(x);
  unsigned long long bb = static_cast<unsigned long long>(b);
  BigInt lhs = ipow(n, bb), rhs = ipow(d, bb);
  if (a >= 0) {
    rhs *= ipow(BigInt(p), static_cast<unsigned long long>(a));
  } else {
    lhs *= ipow(BigInt(p), static_cast<unsigned long long>(-a));
  }
  return lhs < rhs ? -1 : (lhs == rhs ? 0 : 1);
}

/// The real number q * p^e with q, e rational. Comparisons are exact.
struct PowRat {
  Rational q = 0;
  Rational e = 0;
  long p = 2;

  PowRat() = default;
  PowRat(Rational q_, Rational e_, long p_) : q(std::move(q_)), e(std::move(e_)), p(p_) {
    if (q == 0) e = 0;
  }
  static PowRat of(const Rational& x, long p) { return PowRat(x, 0, p); }

  int sign() const { return q > 0 ? 1 : (q < 0 ? -1 : 0); }
  bool is_rational() const { return q == 0 || den(e) == 1; }
  Rational to_rational() const {
    if (!is_rational()) throw InputError("value is not rational");
    if (q == 0) return 0;
    BigInt pe = ipow(BigInt(p), static_cast<unsigned long long>(abs(num(e))));
    return e >= 0 ? q * Rational(pe) : q / Rational(pe);
  }

  std::string str() const {
    if (q == 0) return "0";
    if (den(e) == 1) return to_string(to_rational());
    return to_string(q) + "*" + std::to_string(p) + "^(" + to_string(e) + ")";
  }
};

/// Exact three-way comparison of two values q1*p^e1 and q2*p^e2.
inline int compare(const PowRat& a, const PowRat& b) {
  if (a.p != b.p && a.q != 0 && b.q != 0) throw InputError("PowRat prime mismatch");
  int sa = a.sign(), sb = b.sign();
  if (sa != sb) return sa < sb ? -1 : 1;
  if (sa == 0) return 0;
  // Both nonzero with equal sign: compare |a|/|b| with 1.
  Rational ratio = abs(a.q) / abs(b.q);
  int c = compare_with_power(ratio, a.p, b.e - a.e);
  return sa > 0 ? c : -c;
}

inline bool operator<(const PowRat& a, const PowRat& b) { return compare(a, b) < 0; }
inline bool operator<=(const PowRat& a, const PowRat& b) { return compare(a, b) <= 0; }
inline bool operator==(const PowRat& a, const PowRat& b) { return compare(a, b) == 0; }

inline int compare(const PowRat& a, const Rational& b) { return compare(a, PowRat::of(b, a.p)); }

/// Least integer n with n >= q*p^e.
inline BigInt ceil(const PowRat& x) {
  if (x.is_rational()) return ceil(x.to_rational());
  BigInt up = ceil(x.e);
  BigInt bound = ceil(Rational(abs(x.q))) *
                 ipow(BigInt(x.p), up > 0 ? static_cast<unsigned long long>(up) : 0ULL);
  // Invariant: lo < x <= hi.
  BigInt lo = -bound - 1, hi = bound + 1;
  while (hi - lo > 1) {
    BigInt mid = (lo + hi) / 2;
    if (compare(x, Rational(mid)) <= 0) hi = mid; else lo = mid;
  }
  return hi;
}

/// Rational bracket [lo, hi] for a real quantity; exact when lo == hi.
struct Bracket {
  Rational lo = 0;
  Rational hi = 0;
  bool exact() const { return lo == hi; }
  std::string str() const {
    return exact() ? to_string(lo) : "[" + to_string(lo) + ", " + to_string(hi) + "]";
  }
};

/// Bracket for log_p(x), x > 0, with endpoints in (1/resolution)Z.
inline Bracket log_p_bracket(const Rational& x, long p, long resolution = 256) {
  if (x <= 0) throw InputError("log of nonpositive number");
  // Coarse integer bracket first, then refine by bisection on k/resolution.
  BigInt lo = -1, hi = 1;
  while (compare_with_power(x, p, Rational(lo)) < 0) lo *= 2;
  while (compare_with_power(x, p, Rational(hi)) >= 0) hi *= 2;
  lo *= resolution;
  hi *= resolution;
  // Invariant: p^(lo/res) <= x < p^(hi/res).
  while (hi - lo > 1) {
    BigInt mid = (lo + hi) / 2;
    if (compare_with_power(x, p, Rational(mid) / resolution) >= 0) lo = mid; else hi = mid;
  }
  Rational l = Rational(lo) / resolution;
  if (compare_with_power(x, p, l) == 0) return {l, l};
  return {l, Rational(hi) / resolution};
}

/// Bracket for the least c with pred(c) true, where pred is monotone in c and
/// pred(upper) holds. Used when the exact threshold is irrational.
template <class Pred>
Bracket least_true(Pred pred, Rational lower, Rational upper, const Rational& width) {
  if (pred(lower)) return {lower, lower};
  while (upper - lower > width) {
    Rational mid = (lower + upper) / 2;
    if (pred(mid)) upper = mid; else lower = mid;
  }
  return {lower, upper};
}

}  // namespace logdecay
