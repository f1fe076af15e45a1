#pragma once

// Z_p-towers of curves described by their upper ramification breaks at each
// branch point: per-level breaks and differents, genera from the
// Riemann-Hurwitz-Hasse formula, and growth-exponent certificates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "ramification.hpp"

namespace logdecay {

struct TowerSpec {
  long p = 2;
  int n_max = 0;
  std::vector<std::vector<long>> branch_points;  // upper breaks u_1 < u_2 < ... per point
  long g0 = 0;
  std::vector<BigInt> degrees;  // d_n for n = 0..n_max; empty means d_n = p^n
  int rep_dim = 1;

  BigInt degree(int n) const {
    if (!degrees.empty()) return degrees.at(static_cast<std::size_t>(n));
    return ipow(BigInt(p), static_cast<unsigned long long>(n));
  }

  void validate() const {
    if (p < 2) throw InputError("p must be a prime");
    if (n_max < 0) throw InputError("n_max must be nonnegative");
    if (g0 < 0) throw InputError("base genus must be nonnegative");
    if (rep_dim < 1) throw InputError("representation dimension must be positive");
    if (!degrees.empty() && static_cast<int>(degrees.size()) != n_max + 1)
      throw InputError("degrees must list d_0..d_n_max");
    for (const auto& u : branch_points) {
      if (static_cast<int>(u.size()) < n_max) throw InputError("branch point has fewer breaks than levels");
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] < 1) throw InputError("upper breaks must be at least 1");
        if (i > 0 && u[i] < p * u[i - 1])
          throw InputError("inadmissible breaks: u_" + std::to_string(i + 1) + " = " + std::to_string(u[i]) +
                           " < p * u_" + std::to_string(i) + " = " + std::to_string(p * u[i - 1]));
      }
    }
  }
};

/// Upper filtration of Z/p^n with breaks u_1 < ... < u_n.
inline RamFiltration cyclic_filtration(long p, const std::vector<long>& u, int n) {
  std::vector<std::pair<Rational, long>> steps;
  const long full = ipow64(p, n);
  long order = full;
  for (int i = 0; i < n; ++i) {
    steps.emplace_back(Rational(u[static_cast<std::size_t>(i)]), order);
    order /= p;
  }
  return RamFiltration::from_steps(Numbering::upper, full, steps);
}

struct PointLevel {
  std::vector<Rational> lower_breaks;
  BigInt delta = 0;
  Rational mu = 0;
  Rational lambda = 0;
};

struct TowerLevel {
  int n = 0;
  BigInt d = 1;
  std::vector<PointLevel> points;
};

/// Breaks and differents at every level, each branch point totally ramified.
inline std::vector<TowerLevel> tower_ramification(const TowerSpec& spec) {
  spec.validate();
  std::vector<TowerLevel> out;
  for (int n = 0; n <= spec.n_max; ++n) {
    TowerLevel lv;
    lv.n = n;
    lv.d = spec.degree(n);
    for (const auto& u : spec.branch_points) {
      PointLevel pt;
      if (n > 0) {
        RamFiltration low = convert_numbering(cyclic_filtration(spec.p, u, n));
        pt.lower_breaks = low.breaks;
        pt.delta = different(low);
        pt.mu = u[static_cast<std::size_t>(n - 1)];
        pt.lambda = low.top_break();
      }
      lv.points.push_back(pt);
    }
    out.push_back(lv);
  }
  return out;
}

struct GenusLevel {
  int n = 0;
  BigInt d = 1;
  BigInt delta_sum = 0;
  BigInt g = 0;            // 2g - 2 = d (2 g_0 - 2) + sum delta
  BigInt g_printed = 0;    // g - 2 = d (g_0 - 2) + sum delta, as printed
  Rational ratio_printed;  // g/d = g_0 - 2 + sum delta / e + 2/d, as printed
};

/// Genus of each level. Every branch point is totally ramified, so it has
/// one point above it and contributes its different once.
inline std::vector<GenusLevel> genus_sequence(const TowerSpec& spec) {
  std::vector<GenusLevel> out;
  for (const auto& lv : tower_ramification(spec)) {
    GenusLevel g;
    g.n = lv.n;
    g.d = lv.d;
    Rational per_degree = 0;
    for (const auto& pt : lv.points) {
      g.delta_sum += pt.delta;
      per_degree += Rational(pt.delta) / Rational(lv.d);
    }
    BigInt twice = lv.d * (2 * BigInt(spec.g0) - 2) + g.delta_sum + 2;
    if (twice < 0) throw InputError("negative genus at level " + std::to_string(lv.n));
    if (twice % 2 != 0) throw InputError("odd 2g at level " + std::to_string(lv.n) + ": inconsistent spec");
    g.g = twice / 2;
    g.g_printed = lv.d * (BigInt(spec.g0) - 2) + g.delta_sum + 2;
    g.ratio_printed = Rational(spec.g0 - 2) + per_degree + Rational(2) / Rational(lv.d);
    out.push_back(g);
  }
  return out;
}

/// Growth certificate for one nonnegative sequence value_n, n = 1..n_max, against p^{e n}.
struct SequenceGrowth {
  std::string name;
  Rational exponent;               // e in value_n <= witness * p^{e n}
  PowRat witness;                  // max_n value_n p^{-e n}, exact
  double r_hat_max = 0;            // max_n log_p(value_n) / n
  double r_hat_slope = 0;          // least-squares slope of log_p(value_n) over the upper half of levels
  long exponent_class = 0;         // ceil(r_hat_slope - class_tolerance)
};

struct GrowthVerdict {
  Rational r;
  int horizon = 0;
  SequenceGrowth mu;     // max over branch points of mu_n, against p^{rn}
  SequenceGrowth delta;  // max over branch points of delta_n / d_n, against p^{rn}
  SequenceGrowth genus;  // g_n, against p^{(r+1)n}
  SequenceGrowth genus_per_degree_r;   // g_n / d_n against p^{rn} (the sharper bound)
  SequenceGrowth genus_per_degree_r1;  // g_n / d_n against p^{(r+1)n} (the weaker bound)
  // delta_n/d_n <= mu_n + 1 at every level, so mu_n <= c p^{rn} gives delta_n/d_n <= (c + 1) p^{rn}.
  bool forward_implication = false;
  // delta_n/d_n <= c p^{rn} gives mu_n <= p^{d^2} c p^{rn}.
  bool backward_implication = false;
  bool classes_agree = false;  // class(mu) == class(delta/d) == class(g) - 1
};

/// Tolerance subtracted from the fitted slope before rounding up to a class.
inline constexpr double kClassTolerance = 0.15;

namespace detail {

inline double log_p(const Rational& x, long p) {
  const BigInt n = num(x), d = den(x);
  auto lg = [](const BigInt& v) {
    // log of a big integer via its leading digits.
    std::string s = v.str();
    const std::size_t keep = std::min<std::size_t>(s.size(), 17);
    return std::log(std::stod(s.substr(0, keep))) + static_cast<double>(s.size() - keep) * std::log(10.0);
  };
  return (lg(n) - lg(d)) / std::log(static_cast<double>(p));
}

inline SequenceGrowth sequence_growth(std::string name, const std::vector<Rational>& v, long p,
                                      const Rational& e) {
  SequenceGrowth s;
  s.name = std::move(name);
  s.exponent = e;
  const int N = static_cast<int>(v.size());
  s.r_hat_max = -1e300;
  for (int n = 1; n <= N; ++n) {
    const Rational& x = v[static_cast<std::size_t>(n - 1)];
    if (x < 0) throw InputError("growth sequence must be nonnegative");
    PowRat w(x, -e * n, p);
    if (n == 1 || s.witness < w) s.witness = w;
    if (x > 0) s.r_hat_max = std::max(s.r_hat_max, log_p(x, p) / n);
  }
  const int lo = std::max(1, (N + 1) / 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0, k = 0;
  for (int n = lo; n <= N; ++n) {
    if (v[static_cast<std::size_t>(n - 1)] <= 0) throw InputError("growth sequence vanishes in the fitted range");
    const double y = log_p(v[static_cast<std::size_t>(n - 1)], p);
    sx += n;
    sy += y;
    sxx += static_cast<double>(n) * n;
    sxy += n * y;
    k += 1;
  }
  s.r_hat_slope = k > 1 ? (k * sxy - sx * sy) / (k * sxx - sx * sx) : s.r_hat_max;
  s.exponent_class = static_cast<long>(std::ceil(s.r_hat_slope - kClassTolerance));
  return s;
}

}  // namespace detail

/// Exact witnesses for each sequence at the horizon, plus the implications
/// between the mu- and delta-bounds: delta/d <= mu + 1 and mu <= p^{d^2} delta/d.
inline GrowthVerdict classify_rlog(const TowerSpec& spec, const Rational& r) {
  if (spec.n_max < 3) throw InputError("classification needs n_max >= 3");
  if (spec.branch_points.empty()) throw InputError("classification needs a branch point");
  const auto levels = tower_ramification(spec);
  const auto genera = genus_sequence(spec);
  std::vector<Rational> mu, del, g, gd;
  for (int n = 1; n <= spec.n_max; ++n) {
    const auto& lv = levels[static_cast<std::size_t>(n)];
    Rational m = 0, dd = 0;
    for (const auto& pt : lv.points) {
      m = std::max(m, pt.mu);
      dd = std::max(dd, Rational(pt.delta) / Rational(lv.d));
    }
    mu.push_back(m);
    del.push_back(dd);
    const auto& gl = genera[static_cast<std::size_t>(n)];
    g.push_back(Rational(gl.g));
    gd.push_back(Rational(gl.g) / Rational(gl.d));
  }
  GrowthVerdict v;
  v.r = r;
  v.horizon = spec.n_max;
  v.mu = detail::sequence_growth("mu", mu, spec.p, r);
  v.delta = detail::sequence_growth("delta/d", del, spec.p, r);
  v.genus = detail::sequence_growth("g", g, spec.p, r + 1);
  v.genus_per_degree_r = detail::sequence_growth("g/d", gd, spec.p, r);
  v.genus_per_degree_r1 = detail::sequence_growth("g/d", gd, spec.p, r + 1);

  v.forward_implication = true;
  v.backward_implication = true;
  const Rational pd2 = Rational(ipow(BigInt(spec.p), static_cast<unsigned long long>(spec.rep_dim) *
                                                         static_cast<unsigned long long>(spec.rep_dim)));
  for (int n = 1; n <= spec.n_max; ++n) {
    const auto i = static_cast<std::size_t>(n - 1);
    if (del[i] > mu[i] + 1) v.forward_implication = false;
    if (compare(PowRat(mu[i], -r * n, spec.p), PowRat(pd2 * v.delta.witness.q, v.delta.witness.e, spec.p)) > 0)
      v.backward_implication = false;
  }
  v.classes_agree = v.mu.exponent_class == v.delta.exponent_class &&
                    v.genus.exponent_class == v.delta.exponent_class + 1;
  return v;
}

struct RepProfile {
  std::optional<PowRat> least_c;  // least c with mu_{n+1} <= p^{nr} c for all computed n
  Rational c0_lower;              // the recursion needs c_0 > max(p^r p^{d^2} c / (p^r - 1), mu_1)
  bool c0_exact = false;          // false when p^r is irrational; c0_lower is then rounded up
  std::vector<double> propagated;  // b_1 = mu_1, b_{n+1} = p^{(n+1)r} c p^{d^2} + b_n
};

/// The Rep^r condition G^{p^{nr} c} in G(n) for a cyclic tower: G^s lies in
/// G(n+1) for s > mu_{n+1}, so it holds iff mu_{n+1} <= p^{nr} c.
inline RepProfile rep_profile_check(const std::vector<Rational>& mu, long p, const Rational& r, int d,
                                    std::optional<Rational> c = std::nullopt) {
  for (std::size_t i = 1; i < mu.size(); ++i)
    if (mu[i] < mu[i - 1]) throw InputError("mu sequence must be increasing");
  RepProfile out;
  for (std::size_t n = 0; n < mu.size(); ++n) {
    PowRat w(mu[n], -r * static_cast<long>(n), p);
    if (!out.least_c || *out.least_c < w) out.least_c = w;
  }
  if (mu.empty()) return out;
  const double cc = c ? c->convert_to<double>() : (out.least_c->q.convert_to<double>() *
                                                   std::pow(static_cast<double>(p), out.least_c->e.convert_to<double>()));
  const double pd2 = std::pow(static_cast<double>(p), d * d);
  const double pr = std::pow(static_cast<double>(p), r.convert_to<double>());
  if (den(r) == 1 && c) {
    const Rational pr_exact = Rational(ipow(BigInt(p), static_cast<unsigned long long>(num(r))));
    out.c0_lower = std::max(pr_exact * Rational(ipow(BigInt(p), static_cast<unsigned long long>(d * d))) * *c /
                                (pr_exact - 1),
                            mu[0]);
    out.c0_exact = true;
  } else {
    out.c0_lower = Rational(static_cast<long long>(std::ceil(std::max(pr * pd2 * cc / (pr - 1),
                                                                      mu[0].convert_to<double>()))));
  }
  double b = mu[0].convert_to<double>();
  out.propagated.push_back(b);
  for (std::size_t n = 1; n < mu.size(); ++n) {
    b += std::pow(pr, static_cast<double>(n + 1)) * cc * pd2;
    out.propagated.push_back(b);
  }
  return out;
}

/// Pseudorandom admissible tower with one branch point. Level n draws u_n from
/// [p u_{n-1}, ceil(c p^{rn})] (u_1 from [1, ceil(c p^r)]). Breaks of a cyclic
/// p-power extension are prime to p except for the forced jump u_n = p u_{n-1},
/// so the draw is uniform over the values prime to p in the upper half of the
/// interval, falling back to the largest value prime to p, then to p u_{n-1}.
inline TowerSpec generate_tower(long p, const Rational& r, const Rational& c, int n_max, std::uint64_t seed,
                                long g0 = 0) {
  if (r < 0) throw InputError("r must be nonnegative");
  if (c < 1) throw InputError("c must be at least 1");
  std::mt19937_64 rng(seed);
  TowerSpec spec;
  spec.p = p;
  spec.n_max = n_max;
  spec.g0 = g0;
  std::vector<long> u;
  for (int n = 1; n <= n_max; ++n) {
    const long top = static_cast<long>(ceil(PowRat(c, r * n, p)));
    const long lo = n == 1 ? 1 : p * u.back();
    const long mid = (lo + top + 1) / 2;
    const long a = std::max(lo, mid);
    // [x, y] contains a value prime to p iff it has two integers or x is prime to p.
    auto has_unit = [&](long x, long y) { return x <= y && (y > x || x % p != 0); };
    if (has_unit(a, top)) {
      std::uniform_int_distribution<long> pick(a, top);
      long v = pick(rng);
      if (v % p == 0) v = v + 1 <= top ? v + 1 : v - 1;
      u.push_back(v);
    } else if (has_unit(lo, top)) {
      u.push_back(top % p != 0 ? top : top - 1);
    } else {
      if (n == 1) throw InputError("empty feasible set at level 1");
      u.push_back(lo);
    }
  }
  spec.branch_points.push_back(u);
  spec.validate();
  return spec;
}

}  // namespace logdecay
