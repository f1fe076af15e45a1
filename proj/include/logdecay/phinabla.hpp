#pragma once

// (phi, nabla)-modules in coordinates. A basis e has phi(e) = C e and
// nabla(e) = G e dT; sigma is the Frobenius of the base with sigma(T) = P.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "embed.hpp"
#include "errors.hpp"
#include "growth.hpp"
#include "matrix.hpp"
#include "witt.hpp"

namespace logdecay {

using SeriesMatrix = Matrix<GrowthSeries>;
using WittMatrix = Matrix<WittElem>;

struct PhiNablaData {
  SeriesMatrix C;
  SeriesMatrix G;
  GrowthSeries sigma;  // sigma(T)
  int N = 3;
  int rank() const { return static_cast<int>(C.size()); }
};

inline SeriesMatrix series_identity(const RingSpec* r, int d) {
  SeriesMatrix m(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m[i].push_back(i == j ? GrowthSeries::one(r) : GrowthSeries::zero(r));
  return m;
}

/// Inverse through the adjugate; det is inverted with T-adic length t_cutoff.
inline SeriesMatrix series_mat_inv(const SeriesMatrix& a, std::int64_t t_cutoff = kDefaultInverseCutoff) {
  check_square(a);
  GrowthSeries dinv = series_inv(det(a), t_cutoff);
  return mat_scale(adjugate(a, GrowthSeries::one(a[0][0].ring())), dinv);
}

namespace detail {

// p^extra * f as an integral element with N levels.
inline Lifted integral_lift(const GrowthSeries& f, int extra, int N) {
  const GrowthSeries g = f.is_zero() ? f : f.normalized();
  const int s = g.p_shift() + extra;
  if (s < 0) throw InputError("entry is not integral: " + f.str());
  const RingSpec* r = RingSpec::get(f.field(), N);
  if (s >= N) return Lifted(r);
  if (g.N() < N - s) throw PrecisionExhausted("entry known to lower p-adic precision");
  return g.body().with_levels(N - s).times_p(s, N);
}

// i_sigma(f) in the lifted ring with N levels, for the image v of T.
inline Lifted embed_entry(const GrowthSeries& f, const Lifted& v, int N, std::int64_t inv_cutoff) {
  const GrowthSeries g = f.is_zero() ? f : f.normalized();
  const int s = g.p_shift();
  if (s < 0) throw InputError("entry is not integral: " + f.str());
  const RingSpec* r = RingSpec::get(f.field(), N);
  if (s >= N) return Lifted(r);
  const int m = N - s;
  if (g.N() < m) throw PrecisionExhausted("entry known to lower p-adic precision");
  GrowthSeries gm(0, g.body().with_levels(m), g.tail_cutoff());
  return evaluate_at(gm, v, m, ExtRational(Rational(inv_cutoff))).times_p(s, N);
}

// Coordinatewise lift of x; every level inherits the cutoff of x.
inline Lifted lift_with_cutoff(const PerfSeries& x, const RingSpec* r) {
  std::vector<Lifted::Term> t;
  for (const auto& [e, c] : x.raw_terms()) t.push_back({e, Zq::lift(r, FqElem(x.field(), c))});
  return Lifted::from_parts(r, x.denom_exp(), std::move(t), std::vector<std::int64_t>(r->N(), x.raw_cutoff()));
}

inline PerfSeries select_terms(const PerfSeries& x, bool (*keep)(const Rational&)) {
  std::vector<std::pair<Rational, FqElem>> t;
  for (const auto& [e, c] : x.terms())
    if (keep(e)) t.push_back({e, c});
  return PerfSeries::from_terms(x.field(), t, x.cutoff(), x.budget());
}

inline bool is_positive(const Rational& e) { return e > 0; }
inline bool is_nonpositive(const Rational& e) { return e <= 0; }

// Every known term of x is divisible by p^k.
inline bool divisible_by_p(const Lifted& x, int k) {
  for (const auto& t : x.terms())
    if (t.second.vp() < k) return false;
  return true;
}

inline Lifted div_p_pow(Lifted x, int k) {
  for (int i = 0; i < k; ++i) x = x.div_p();
  return x;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Compatibility of phi and nabla.

struct CompatReport {
  SeriesMatrix residual;  // dC/dT + G C - C sigma(G) sigma'(T)
  bool compatible = false;
};

inline CompatReport check_phi_nabla_compat(const PhiNablaData& M,
                                           std::int64_t t_cutoff = kDefaultInverseCutoff) {
  check_square(M.C);
  check_square(M.G);
  if (rows(M.C) != rows(M.G)) throw InputError("C and G differ in rank");
  SeriesMatrix dC = mat_map(M.C, [](const GrowthSeries& x) { return series_derivative(x); });
  SeriesMatrix sG = mat_map(M.G, [&](const GrowthSeries& x) { return series_compose_frobenius(x, M.sigma, t_cutoff); });
  const GrowthSeries ds = series_derivative(M.sigma);
  CompatReport rep;
  rep.residual = mat_sub(mat_add(dC, mat_mul(M.G, M.C)), mat_scale(mat_mul(M.C, sG), ds));
  rep.compatible = true;
  for (const auto& row : rep.residual)
    for (const auto& x : row) {
      if (x.absolute_precision() < 1) throw PrecisionExhausted("precision window empty");
      if (!x.is_zero()) rep.compatible = false;
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Equations over the perfect residue field.

/// Some x with x^p - x = d, known below min(cutoff of d, t_cutoff).
/// Negative exponents are peeled as (g^{1/p} T^{e/p})^p, which terminates only
/// when the peeled terms cancel within the exponent-denominator budget.
inline PerfSeries artin_schreier_solve(const PerfSeries& d, const ExtRational& t_cutoff) {
  const FieldSpec* f = d.field();
  const long p = f->p();
  const ExtRational cut = min(d.cutoff(), t_cutoff);
  if (!(ExtRational(0) < cut)) throw PrecisionExhausted("right side unknown at nonpositive exponents");
  PerfSeries rest = d.truncate(cut);
  PerfSeries x = PerfSeries::zero(f, ExtRational::infinity(), d.budget());
  for (;;) {
    const auto ts = rest.terms();
    if (ts.empty() || ts.front().first >= 0) break;
    const auto& [e, g] = ts.front();
    PerfSeries y = PerfSeries::monomial(g.frob_inv(), e / Rational(p), d.budget());
    x = x + y;
    rest = rest - y.frob_pow(1) + y;
  }
  // Constant term: a root of y^p - y = g in k.
  const FqElem g0 = rest.coefficient(0);
  if (!g0.is_zero()) {
    std::optional<FqElem> y0;
    const std::uint32_t q = static_cast<std::uint32_t>(f->size());
    for (std::uint32_t code = 0; code < q && !y0; ++code) {
      FqElem y(f, code);
      if (y.pow(p) - y == g0) y0 = y;
    }
    if (!y0) throw BudgetExceeded("constant term " + g0.str() + " needs an extension of the residue field");
    x = x + PerfSeries::monomial(*y0, 0, d.budget());
  }
  // Positive part: x = -(u + u^p + u^{p^2} + ...).
  PerfSeries u = detail::select_terms(rest, detail::is_positive);
  PerfSeries acc = PerfSeries::zero(f, ExtRational::infinity(), d.budget());
  while (!u.truncate(cut).empty()) {
    acc = acc - u.truncate(cut);
    u = u.frob_pow(1);
  }
  // Exact right sides without a positive part have exact solutions.
  return (x + acc).truncate(detail::select_terms(rest, detail::is_positive).empty() ? d.cutoff() : cut);
}

/// Some a with a^{p-1} = c, known to the relative precision of c (capped by t_cutoff).
/// The unit part uses 1/(p-1) = -(1 + p + p^2 + ...) in Z_p.
inline PerfSeries root_p_minus_1(const PerfSeries& c, const ExtRational& t_cutoff) {
  const FieldSpec* f = c.field();
  const long p = f->p();
  if (!c.valuation_known()) {
    if (c.is_exact()) throw NotInvertible("zero has no unit root");
    throw PrecisionExhausted("leading term unknown");
  }
  const Rational e = c.valuation().v;
  const Rational e1 = e / Rational(p - 1);
  if (p_power_exponent(den(e1), p) < 0)
    throw BudgetExceeded("exponent " + to_string(e) + "/(p-1) has a denominator prime to p");
  const FqElem g = c.leading_coefficient();
  std::uint32_t root = 0;
  if (!f->root(g.code(), p - 1, &root))
    throw InputError("leading coefficient " + g.str() + " has no (p-1)-st root in the residue field");
  if (c.size() == 1 && c.is_exact()) return PerfSeries::monomial(FqElem(f, root), e1, c.budget());
  PerfSeries lead = PerfSeries::monomial(g, e, c.budget());
  const ExtRational abs_cut = min(c.cutoff(), t_cutoff + ExtRational(e));
  const ExtRational rel = abs_cut + ExtRational(-e);
  if (rel.is_inf()) {
    if (c.size() != 1) throw PrecisionExhausted("root of a non-monomial needs a finite cutoff");
    return PerfSeries::monomial(FqElem(f, root), e1, c.budget());
  }
  PerfSeries w = (c * lead.inv(ExtRational::infinity())).shift(0).truncate(rel) - PerfSeries::one(f, c.budget());
  PerfSeries u = PerfSeries::one(f, c.budget());
  while (!w.truncate(rel).empty()) {
    u = (u * (PerfSeries::one(f, c.budget()) + w).inv(rel)).truncate(rel);
    w = w.frob_pow(1);
  }
  return u.truncate(rel).shift(e1).scale(FqElem(f, root));
}

// ---------------------------------------------------------------------------
// Period matrices.

struct PeriodMatrix {
  WittMatrix A;
  Matrix<detail::Lifted> lifted;  // the same entries in the lifted ring
  int N = 0;
};

/// Least extension degree a with a (p-1)-st root of c in F_{p^a}; c in F_p.
inline int root_extension_degree(const FqElem& c) {
  if (c.a() != 1) throw InputError("extension search needs a prime residue field");
  if (c.is_zero()) throw InputError("zero has no unit root");
  const long long v = c.coords()[0];
  for (int a = 1; a <= 8; ++a) {
    const FieldSpec* F = FieldSpec::of_degree(c.p(), a);
    std::uint32_t out = 0;
    if (F->root(F->from_int(v), c.p() - 1, &out)) return a;
  }
  throw InputError("no root found in extensions of degree <= 8");
}

/// The same series over the larger field `to`; f must live over a prime field.
inline GrowthSeries extend_scalars(const GrowthSeries& f, const FieldSpec* to) {
  if (f.field()->degree() != 1 || to->p() != f.p()) throw FieldMismatch("scalar extension needs F_p inside F_q");
  const RingSpec* r = RingSpec::get(to, f.N());
  std::vector<GrowthSeries::Term> t;
  for (const auto& [e, c] : f.terms()) t.push_back({e, Zq::from_int(r, c.coords()[0])});
  return GrowthSeries(f.p_shift(), detail::Lifted::from_parts(r, 0, std::move(t), f.cuts()), f.tail_cutoff());
}

/// Frob(A) - C A in the lifted ring.
inline Matrix<detail::Lifted> period_residual(const Matrix<detail::Lifted>& A, const Matrix<detail::Lifted>& C) {
  return mat_sub(mat_map(A, [](const detail::Lifted& x) { return x.frob(1); }), mat_mul(C, A));
}

/// Unit-root check: C integral with det(C) a unit of O_E at precision.
inline void check_unit_root(const SeriesMatrix& C) {
  check_square(C);
  for (const auto& row : C)
    for (const auto& x : row)
      if (!x.is_zero() && x.normalized().p_shift() < 0) throw NotUnitRoot("C is not integral");
  Normalization nz;
  try {
    nz = normalize_unit(det(C));
  } catch (const NotInvertible&) {
    throw NotUnitRoot("det C vanishes");
  }
  if (nz.a != 0) throw NotUnitRoot("det C is divisible by p");
}

/// A with Frob(A) = i_sigma(C) A mod p^N. Slice 0 by a (p-1)-st root (rank 1)
/// or A = I (C = I mod p); slice k solves z^p - z = -E_k / a_0^p.
inline PeriodMatrix trivialize_phi(const SeriesMatrix& C, const EmbedResult& sigma, int N,
                                   int budget = kDefaultDenomBudget,
                                   std::int64_t t_cutoff = kDefaultInverseCutoff) {
  check_unit_root(C);
  const int d = static_cast<int>(rows(C));
  if (N < 1 || N > kMaxWittPrecision) throw InputError("precision N out of range");
  if (N > sigma.v.levels()) throw PrecisionExhausted("Frobenius embedding known to lower precision");
  const FieldSpec* f = C[0][0].field();
  if (sigma.v.ring()->field() != f) throw FieldMismatch("C and sigma over different fields");
  const RingSpec* r = RingSpec::get(f, N);
  const detail::Lifted v = sigma.v.with_levels(N);
  Matrix<detail::Lifted> Ct = mat_map(C, [&](const GrowthSeries& x) { return detail::embed_entry(x, v, N, t_cutoff); });
  const ExtRational tc(Rational{t_cutoff});

  PerfSeries a0 = PerfSeries::one(f, budget);
  Matrix<detail::Lifted> A(d);
  if (d == 1) {
    a0 = root_p_minus_1(Ct[0][0].residue(budget), tc);
    A[0].push_back(detail::Lifted::teichmuller(a0, r));
  } else {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        PerfSeries e = Ct[i][j].residue(budget) - (i == j ? PerfSeries::one(f, budget) : PerfSeries(f, budget));
        if (!e.empty()) throw InputError("rank > 1 needs C = I mod p");
        A[i].push_back(detail::Lifted::from_int(r, i == j ? 1 : 0));
      }
  }
  std::optional<PerfSeries> a0p_inv;
  if (d == 1) a0p_inv = a0.frob_pow(1).inv(a0.size() == 1 && a0.is_exact() ? ExtRational::infinity() : tc);
  for (int k = 1; k < N; ++k) {
    Matrix<detail::Lifted> R = period_residual(A, Ct);
    const RingSpec* rk = RingSpec::get(f, N - k);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        if (!detail::divisible_by_p(R[i][j], k)) throw VerdictFailure("period residual not divisible by p^k");
        PerfSeries E = detail::div_p_pow(R[i][j], k).residue(budget);
        PerfSeries Z = d == 1 ? a0 * artin_schreier_solve(-(E * *a0p_inv), tc) : artin_schreier_solve(-E, tc);
        A[i][j] += detail::lift_with_cutoff(Z, rk).times_p(k, N);
      }
    }
  }
  for (const auto& row : period_residual(A, Ct))
    for (const auto& x : row)
      if (!x.terms().empty()) throw VerdictFailure("period residual Frob(A) - C A is nonzero");
  PeriodMatrix P;
  P.N = N;
  P.lifted = A;
  P.A = mat_map(A, [&](const detail::Lifted& x) { return WittElem::from_lifted(0, x, budget); });
  return P;
}

/// i_sigma(C) as Witt elements with N digits.
inline WittMatrix embed_matrix(const SeriesMatrix& C, const EmbedResult& sigma, int N,
                               int budget = kDefaultDenomBudget, std::int64_t t_cutoff = kDefaultInverseCutoff) {
  const detail::Lifted v = sigma.v.with_levels(N);
  return mat_map(C, [&](const GrowthSeries& x) {
    return WittElem::from_lifted(0, detail::embed_entry(x, v, N, t_cutoff), budget);
  });
}

// ---------------------------------------------------------------------------
// Valuation bounds.

/// min over entries of w_n, with `exact` when some entry attains it exactly.
struct MatrixValuation {
  ExtRational w;
  bool exact = true;
};

inline MatrixValuation matrix_partial_valuation(const WittMatrix& A, int n) {
  MatrixValuation mv;
  mv.w = ExtRational::infinity();
  mv.exact = true;
  bool attained = false;
  for (const auto& row : A) {
    for (const auto& x : row) {
      const ExtRational w = witt_partial_valuation(x, n);
      const bool ex = witt_partial_valuation_exact(x, n);
      if (w < mv.w) {
        mv.w = w;
        attained = ex;
      } else if (w == mv.w) {
        attained = attained || ex;
      }
    }
  }
  mv.exact = attained;
  return mv;
}

inline int matrix_precision(const WittMatrix& A) {
  int n = kMaxWittPrecision + 64;
  for (const auto& row : A)
    for (const auto& x : row) n = std::min(n, x.absolute_precision());
  return n;
}

inline bool witt_is_zero(const WittElem& x) {
  for (const auto& s : x.slices())
    if (!s.empty()) return false;
  return true;
}

inline WittMatrix witt_mat_mul(const WittMatrix& a, const WittMatrix& b) {
  check_rectangular(a);
  check_rectangular(b);
  if (cols(a) != rows(b)) throw InputError("matrix shapes do not compose");
  WittMatrix out(rows(a));
  for (std::size_t i = 0; i < rows(a); ++i)
    for (std::size_t j = 0; j < cols(b); ++j) {
      WittElem acc = witt_mul(a[i][0], b[0][j]);
      for (std::size_t k = 1; k < cols(a); ++k) acc = witt_add(acc, witt_mul(a[i][k], b[k][j]));
      out[i].push_back(acc);
    }
  return out;
}

struct PeriodGrowthRow {
  int n = 0;
  ExtRational wA, wC;
  Verdict holds = Verdict::member;  // w_n(A) >= w_n(C)/(p-1)
};

struct PeriodGrowthReport {
  std::vector<PeriodGrowthRow> rows;
  Verdict verdict = Verdict::member;
};

/// Checks w_n(A) >= w_n(C)/(p-1) after confirming Frob(A) = C A at precision.
inline PeriodGrowthReport verify_period_growth(const WittMatrix& A, const WittMatrix& C) {
  check_square(A);
  check_square(C);
  if (rows(A) != rows(C)) throw InputError("A and C differ in rank");
  const WittMatrix FA = mat_map(A, [](const WittElem& x) { return witt_frobenius(x, 1); });
  const WittMatrix CA = witt_mat_mul(C, A);
  for (std::size_t i = 0; i < rows(A); ++i)
    for (std::size_t j = 0; j < rows(A); ++j)
      if (!witt_is_zero(witt_sub(FA[i][j], CA[i][j]))) throw InputError("not a period matrix for C: Frob(A) != C A");
  const long p = A[0][0].p();
  const int N = std::min(matrix_precision(A), matrix_precision(C));
  PeriodGrowthReport rep;
  for (int n = 0; n < N; ++n) {
    PeriodGrowthRow row;
    row.n = n;
    MatrixValuation a = matrix_partial_valuation(A, n), c = matrix_partial_valuation(C, n);
    row.wA = a.w;
    row.wC = c.w;
    if (c.w.is_inf()) {
      row.holds = a.w.is_inf() ? Verdict::member : (a.exact ? Verdict::non_member : Verdict::undetermined);
    } else if (a.w.is_inf() || a.w.v * (p - 1) >= c.w.v) {
      // A lower bound for w_n(A) suffices; w_n(C) must be attained.
      row.holds = c.exact ? Verdict::member : Verdict::undetermined;
    } else {
      row.holds = a.exact && c.exact ? Verdict::non_member : Verdict::undetermined;
    }
    rep.verdict = detail::combine(rep.verdict, row.holds);
    rep.rows.push_back(row);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Descent of morphisms.

struct MorphismRow {
  int n = 0;
  ExtRational wS, wBinv, wA;
  Verdict holds = Verdict::member;  // w_n(S) >= -2 p^{rn} d / (p-1)
};

struct MorphismDescentReport {
  PowRat d;
  std::vector<MorphismRow> rows;
  Verdict bound = Verdict::member;
  bool naive_member = true;  // every entry of S classified into E^r
  std::vector<GrowthClass> classes;
};

/// For B^{-1} S A = S^sigma: the least d >= 0 with w_n(B^{-1}), w_n(A) >= -p^{rn} d,
/// the bound on w_n(S), and the growth class of S.
inline MorphismDescentReport morphism_descent_check(const SeriesMatrix& S, const SeriesMatrix& A,
                                                    const SeriesMatrix& B, const EmbedResult& sigma,
                                                    const Rational& r, int budget = kDefaultDenomBudget,
                                                    std::int64_t t_cutoff = kDefaultInverseCutoff) {
  check_square(A);
  check_square(B);
  check_rectangular(S);
  if (rows(S) != rows(B) || cols(S) != rows(A)) throw InputError("S must map the basis of M to that of N");
  const SeriesMatrix Binv = series_mat_inv(B, t_cutoff);
  const SeriesMatrix lhs = mat_mul(mat_mul(Binv, S), A);
  const SeriesMatrix Ss = mat_map(S, [&](const GrowthSeries& x) {
    return series_compose_frobenius(x, sigma.image, t_cutoff);
  });
  const SeriesMatrix diff = mat_sub(lhs, Ss);
  for (const auto& row : diff)
    for (const auto& x : row)
      if (!x.is_zero()) throw InputError("intertwining identity B^-1 S A = S^sigma fails: " + x.str());

  const long p = sigma.image.p();
  auto embed = [&](const SeriesMatrix& m) {
    return mat_map(m, [&](const GrowthSeries& x) {
      const GrowthSeries g = x.is_zero() ? x : x.normalized();
      const int n = std::min(g.N(), sigma.v.levels());
      return WittElem::from_lifted(g.p_shift(), evaluate_at(g, sigma.v, n, ExtRational(Rational(t_cutoff))), budget);
    });
  };
  const WittMatrix wS = embed(S), wB = embed(Binv), wA = embed(A);
  const int N = std::min({matrix_precision(wS), matrix_precision(wB), matrix_precision(wA)});

  MorphismDescentReport rep;
  rep.d = PowRat(0, 0, p);
  for (int n = 0; n < N; ++n) {
    for (const WittMatrix* X : {&wB, &wA}) {
      const ExtRational w = matrix_partial_valuation(*X, n).w;
      if (w.is_inf()) continue;
      PowRat cand(-w.v, -r * n, p);
      if (rep.d < cand) rep.d = cand;
    }
  }
  for (int n = 0; n < N; ++n) {
    MorphismRow row;
    row.n = n;
    MatrixValuation s = matrix_partial_valuation(wS, n);
    row.wS = s.w;
    row.wBinv = matrix_partial_valuation(wB, n).w;
    row.wA = matrix_partial_valuation(wA, n).w;
    if (!s.w.is_inf()) {
      const PowRat bound(Rational(2) * rep.d.q / Rational(p - 1), rep.d.e + r * n, p);
      // w_S >= -bound  <=>  bound >= -w_S
      if (compare(bound, -s.w.v) < 0) row.holds = s.exact ? Verdict::non_member : Verdict::undetermined;
    }
    rep.bound = detail::combine(rep.bound, row.holds);
    rep.rows.push_back(row);
  }
  for (const auto& row : S)
    for (const auto& x : row) {
      GrowthClass g = classify_growth(x, r);
      rep.naive_member = rep.naive_member && g.kind != GrowthClass::Kind::unclassified;
      rep.classes.push_back(g);
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Descent to Laurent polynomials.

struct PolynomialDescent {
  SeriesMatrix B;   // product of the stage matrices, times p^{-a}
  SeriesMatrix BL;  // B L, reduced mod p^N
  int p_power = 0;  // a with p^{-a} L integral and nonzero mod p
  int N = 0;
  std::vector<SeriesMatrix> stages;    // k_0, k_1, ...
  std::vector<bool> stage_polynomial;  // (k_j ... k_0 L) mod p^{j+1} has no positive-degree terms
  std::int64_t verified_below = 0;     // all claims hold for exponents below this
  bool BL_polynomial = false;
  bool B_invertible = false;
};

namespace detail {

// No known term of x has positive degree modulo p^levels.
inline bool nonpositive_mod(const Lifted& x, int levels) {
  for (const auto& [e, c] : x.terms()) {
    if (e <= 0) continue;
    if (!c.truncate(levels).is_zero()) return false;
  }
  return true;
}

inline std::int64_t min_cut(const Matrix<Lifted>& m) {
  std::int64_t c = kInfExp;
  for (const auto& row : m)
    for (const auto& x : row)
      for (auto k : x.cuts()) c = std::min(c, k);
  return c;
}

inline Matrix<Lifted> lifted_identity(const RingSpec* r, std::size_t d) {
  Matrix<Lifted> m(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m[i].push_back(Lifted::from_int(r, i == j ? 1 : 0));
  return m;
}

}  // namespace detail

/// B with B L a Laurent polynomial modulo p^N, built stage by stage: k_0 lifts
/// (L mod p)^{-1}, and k_j = 1 + p^j s_j removes the positive-degree part of
/// the p^j-slice of k_{j-1} ... k_0 L.
inline PolynomialDescent descend_to_polynomial(const SeriesMatrix& L, int N,
                                               std::int64_t t_cutoff = kDefaultInverseCutoff) {
  check_square(L);
  const std::size_t d = rows(L);
  const FieldSpec* f = L[0][0].field();
  // p^{-a} L integral with some entry a unit: a = least p-adic valuation.
  std::optional<int> a;
  for (const auto& row : L)
    for (const auto& x : row) {
      if (x.field() != f) throw FieldMismatch("entries over different fields");
      if (x.is_zero()) continue;
      const int s = x.normalized().p_shift();
      a = a ? std::min(*a, s) : s;
    }
  if (!a) throw NotInvertible("L singular at precision");
  for (const auto& row : L)
    for (const auto& x : row) N = std::min(N, x.absolute_precision() - *a);
  if (N < 1) throw PrecisionExhausted("L known to too low p-adic precision");
  const RingSpec* r = RingSpec::get(f, N);
  Matrix<detail::Lifted> Lm = mat_map(L, [&](const GrowthSeries& x) { return detail::integral_lift(x, -*a, N); });

  // Stage 0: k_0 lifts the inverse of L mod p.
  Matrix<PerfSeries> res = mat_map(Lm, [](const detail::Lifted& x) { return x.residue(0); });
  const PerfSeries dres = det(res);
  if (dres.empty() && dres.is_exact()) throw NotInvertible("L singular at precision");
  const bool mono_det = dres.size() == 1 && dres.is_exact();
  const PerfSeries dinv = dres.inv(mono_det ? ExtRational::infinity() : ExtRational(Rational(t_cutoff)));
  Matrix<PerfSeries> rinv = mat_scale(adjugate(res, PerfSeries::one(f)), dinv);
  Matrix<detail::Lifted> K = mat_map(rinv, [&](const PerfSeries& x) { return detail::lift_with_cutoff(x, r); });

  PolynomialDescent out;
  out.p_power = *a;
  out.N = N;
  auto as_series = [](const Matrix<detail::Lifted>& m, int shift) {
    return mat_map(m, [&](const detail::Lifted& x) { return GrowthSeries(shift, x); });
  };
  out.stages.push_back(as_series(K, 0));
  Matrix<detail::Lifted> M = mat_mul(K, Lm);
  const Matrix<detail::Lifted> I = detail::lifted_identity(r, d);
  auto stage_ok = [&](const Matrix<detail::Lifted>& m, int levels) {
    for (const auto& row : m)
      for (const auto& x : row)
        if (!detail::nonpositive_mod(x, levels)) return false;
    return true;
  };
  out.stage_polynomial.push_back(stage_ok(M, 1));
  for (int j = 1; j < N; ++j) {
    Matrix<detail::Lifted> X = mat_sub(M, I);
    const RingSpec* rj = RingSpec::get(f, N - j);
    Matrix<detail::Lifted> kj = I;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t l = 0; l < d; ++l) {
        // Below p^j the positive-degree part already vanishes; its p^j digit is the tail to remove.
        std::vector<detail::Lifted::Term> pos;
        for (const auto& t : X[i][l].terms())
          if (t.first > 0) pos.push_back(t);
        detail::Lifted top = detail::Lifted::from_parts(r, X[i][l].scale(), pos, X[i][l].cuts());
        if (!detail::divisible_by_p(top, j)) throw VerdictFailure("positive-degree part not divisible by p^j");
        PerfSeries slice = detail::div_p_pow(top, j).residue(0);
        PerfSeries s = -slice;
        kj[i][l] += detail::lift_with_cutoff(s, rj).times_p(j, N);
      }
    out.stages.push_back(as_series(kj, 0));
    K = mat_mul(kj, K);
    M = mat_mul(K, Lm);
    out.stage_polynomial.push_back(stage_ok(M, j + 1));
  }
  out.B = as_series(K, -*a);
  out.BL = as_series(M, 0);
  out.verified_below = detail::min_cut(M);
  out.BL_polynomial = out.verified_below > 0 && stage_ok(M, N);
  const PerfSeries dk = det(mat_map(K, [](const detail::Lifted& x) { return x.residue(0); }));
  out.B_invertible = dk.valuation_known();
  return out;
}

}  // namespace logdecay
