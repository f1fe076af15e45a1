#pragma once

// Text and JSON input/output for series, Witt elements, filtrations and towers.
//
// Series expressions: integers, p, T, + - *, juxtaposition ("pT"), parentheses
// and ^ with an integer or p as exponent ("(1+T)^p-1", "1+2T^-1").

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "artin_schreier.hpp"
#include "errors.hpp"
#include "growth.hpp"
#include "matrix.hpp"
#include "perf_series.hpp"
#include "ramification.hpp"
#include "towers.hpp"
#include "witt.hpp"

namespace logdecay {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Series expressions.

namespace detail {

class ExprParser {
 public:
  ExprParser(const std::string& s, const RingSpec* r) : s_(s), r_(r) {}

  GrowthSeries parse() {
    GrowthSeries v = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw InputError("series expression '" + s_ + "' at " + std::to_string(pos_) + ": " + why);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  int peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : -1;
  }
  bool starts_factor(int c) const { return c == '(' || c == 'T' || c == 'p' || (c >= '0' && c <= '9'); }

  GrowthSeries expr() {
    GrowthSeries acc = GrowthSeries::zero(r_);
    bool first = true;
    for (;;) {
      int c = peek();
      bool neg = false;
      if (c == '+' || c == '-') {
        neg = c == '-';
        ++pos_;
      } else if (!first) {
        return acc;
      }
      GrowthSeries t = term();
      acc = neg ? acc - t : acc + t;
      first = false;
    }
  }

  GrowthSeries term() {
    GrowthSeries acc = power();
    for (;;) {
      int c = peek();
      if (c == '*') {
        ++pos_;
        acc = acc * power();
      } else if (starts_factor(c)) {
        acc = acc * power();
      } else {
        return acc;
      }
    }
  }

  long long exponent() {
    int c = peek();
    bool neg = false;
    if (c == '-') {
      neg = true;
      ++pos_;
      c = peek();
    }
    long long e = 0;
    if (c == 'p') {
      ++pos_;
      e = r_->p();
    } else if (c == '(') {
      ++pos_;
      e = exponent();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
    } else if (c >= '0' && c <= '9') {
      e = integer();
    } else {
      fail("expected an exponent");
    }
    return neg ? -e : e;
  }

  long long integer() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ - start > 18) fail("integer too long");
    return std::stoll(s_.substr(start, pos_ - start));
  }

  GrowthSeries power() {
    int c = peek();
    if (c == 'T') {
      ++pos_;
      long long e = 1;
      if (peek() == '^') {
        ++pos_;
        e = exponent();
      }
      return GrowthSeries::monomial(r_, 1, e);
    }
    GrowthSeries base = atom();
    if (peek() != '^') return base;
    ++pos_;
    long long e = exponent();
    if (e >= 0) return series_pow(base, e);
    return series_pow(series_inv(base), -e);
  }

  GrowthSeries atom() {
    int c = peek();
    if (c == '(') {
      ++pos_;
      GrowthSeries v = expr();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return v;
    }
    if (c == 'p') {
      ++pos_;
      return GrowthSeries::monomial(r_, r_->p(), 0);
    }
    if (c >= '0' && c <= '9') return GrowthSeries::monomial(r_, integer(), 0);
    fail("expected a term");
  }

  std::string s_;
  std::size_t pos_ = 0;
  const RingSpec* r_;
};

}  // namespace detail

inline GrowthSeries parse_series(const std::string& s, const FieldSpec* k, int N) {
  return detail::ExprParser(s, RingSpec::get(k, N)).parse();
}

/// The reduction mod p of an integral series, as a residue-level series.
inline PerfSeries reduce_mod_p(const GrowthSeries& f) {
  if (f.p_shift() < 0) throw InputError("series is not integral");
  PerfSeries out = PerfSeries::zero(f.field());
  if (f.p_shift() > 0) return out;
  for (const auto& [e, c] : f.terms())
    if (c.vp() == 0) out = out + PerfSeries::monomial(c.residue(), Rational(e));
  return out.truncate(f.cuts()[0] == detail::kInfExp ? ExtRational::infinity() : ExtRational(Rational(f.cuts()[0])));
}

// ---------------------------------------------------------------------------
// Scalars.

/// A rational from an integer, a string "a/b", or a pair [a, b].
inline Rational rational_from_json(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_array() && j.size() == 2 && j[0].is_number_integer() && j[1].is_number_integer()) {
    if (j[1].get<long long>() == 0) throw InputError("zero denominator");
    return rat(j[0].get<long long>(), j[1].get<long long>());
  }
  throw InputError("expected a rational, got " + j.dump());
}

inline Json rational_to_json(const Rational& x) {
  if (den(x) == 1 && abs(num(x)) < BigInt(1LL << 53)) return Json(num(x).convert_to<long long>());
  return Json(to_string(x));
}

namespace detail {

inline const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T get_as(const Json& j, const char* key) {
  try {
    return require(j, key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError(std::string("field '") + key + "' has the wrong type");
  }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  return j.is_object() && j.contains(key) ? get_as<T>(j, key) : fallback;
}

inline const FieldSpec* field_from_json(const Json& j) {
  const long p = get_as<long>(j, "p");
  if (j.contains("modulus")) return FieldSpec::get(p, get_as<std::vector<long>>(j, "modulus"));
  const int a = get_or<int>(j, "a", 1);
  return a == 1 ? FieldSpec::prime(p) : FieldSpec::of_degree(p, a);
}

inline void field_to_json(Json& j, const FieldSpec* f) {
  j["p"] = f->p();
  j["a"] = f->degree();
  if (f->degree() > 1) j["modulus"] = f->modulus();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Residue-level series: {"p":2,"a":1,"terms":[[num,den,[coords]]],"cutoff":[num,den]}.

inline PerfSeries perf_from_json(const Json& j, const FieldSpec* f = nullptr) {
  if (!f) f = detail::field_from_json(j);
  std::vector<std::pair<Rational, FqElem>> terms;
  for (const auto& t : detail::get_as<Json>(j, "terms")) {
    if (!t.is_array() || t.size() != 3 || !t[2].is_array()) throw InputError("term must be [num, den, [coords]]");
    Rational e = rational_from_json(Json::array({t[0], t[1]}));
    terms.emplace_back(e, FqElem::from_coords(f, t[2].get<std::vector<long>>()));
  }
  ExtRational cutoff = ExtRational::infinity();
  if (j.contains("cutoff") && !j.at("cutoff").is_null()) cutoff = rational_from_json(j.at("cutoff"));
  return PerfSeries::from_terms(f, terms, cutoff);
}

inline Json perf_to_json(const PerfSeries& s) {
  Json j;
  detail::field_to_json(j, s.field());
  Json terms = Json::array();
  for (const auto& [e, c] : s.terms())
    terms.push_back(Json::array({num(e).convert_to<long long>(), den(e).convert_to<long long>(), c.coords()}));
  j["terms"] = terms;
  if (s.is_exact())
    j["cutoff"] = nullptr;
  else
    j["cutoff"] = Json::array({num(s.cutoff().v).convert_to<long long>(), den(s.cutoff().v).convert_to<long long>()});
  return j;
}

// WittElem: {"p":2,"p_shift":0,"slices":[<residue series>...]}; slices inherit p and a.

inline WittElem witt_from_json(const Json& j) {
  const auto& sl = detail::get_as<Json>(j, "slices");
  if (!sl.is_array() || sl.empty()) throw InputError("slices must be a nonempty array");
  const FieldSpec* f = j.contains("p") ? detail::field_from_json(j) : detail::field_from_json(sl[0]);
  std::vector<PerfSeries> s;
  for (const auto& x : sl) s.push_back(perf_from_json(x, f));
  return WittElem(detail::get_or<int>(j, "p_shift", 0), s);
}

inline Json witt_to_json(const WittElem& x) {
  Json j;
  detail::field_to_json(j, x.slices().front().field());
  j["p_shift"] = x.p_shift();
  Json sl = Json::array();
  for (const auto& s : x.slices()) {
    Json t = perf_to_json(s);
    t.erase("p");
    t.erase("a");
    t.erase("modulus");
    sl.push_back(t);
  }
  j["slices"] = sl;
  return j;
}

// ---------------------------------------------------------------------------
// Laurent series over W_N(k): {"p":2,"N":4,"tail_cutoff":-64,"terms":[[exp, coeff]...]}
// or {"p":2,"N":4,"expr":"1+2T^-1"}. coeff is an integer or a coordinate list.
// "known_below" (optional) marks every level unknown from that exponent on.

inline GrowthSeries growth_from_json(const Json& j, int max_N = 0) {
  const FieldSpec* k = detail::field_from_json(j);
  const int N = detail::get_as<int>(j, "N");
  if (N < 1) throw InputError("N must be positive");
  if (max_N > 0 && N > max_N) throw PrecisionExhausted("N = " + std::to_string(N) + " exceeds the cap " + std::to_string(max_N));
  if (j.contains("expr")) return parse_series(detail::get_as<std::string>(j, "expr"), k, N);
  const RingSpec* r = RingSpec::get(k, N);
  std::vector<std::pair<std::int64_t, Zq>> terms;
  for (const auto& t : detail::get_as<Json>(j, "terms")) {
    if (!t.is_array() || t.size() != 2 || !t[0].is_number_integer()) throw InputError("term must be [exp, coeff]");
    Zq c = t[1].is_array() ? Zq::from_coords(r, t[1].get<std::vector<long long>>())
                           : Zq::from_int(r, t[1].get<long long>());
    terms.emplace_back(t[0].get<std::int64_t>(), c);
  }
  const std::int64_t tail = detail::get_or<std::int64_t>(j, "tail_cutoff", kNoTail);
  const std::int64_t known = detail::get_or<std::int64_t>(j, "known_below", detail::kInfExp);
  std::int64_t lowest = detail::kInfExp;
  for (const auto& t : terms) lowest = std::min(lowest, t.first);
  if (tail != kNoTail && lowest != detail::kInfExp && lowest < tail) throw InputError("term below tail_cutoff");
  return GrowthSeries::from_terms(k, N, terms, tail, known);
}

/// Coefficients as integers in [0, p^N) (or coordinate lists), with p_shift folded in when it is nonnegative.
inline Json growth_to_json(const GrowthSeries& f) {
  Json j;
  detail::field_to_json(j, f.field());
  j["N"] = f.N();
  if (f.p_shift() != 0) j["p_shift"] = f.p_shift();
  if (f.tail_cutoff() != kNoTail) j["tail_cutoff"] = f.tail_cutoff();
  Json terms = Json::array();
  for (const auto& [e, c] : f.terms()) {
    if (f.field()->degree() == 1)
      terms.push_back(Json::array({e, c.coords()[0]}));
    else
      terms.push_back(Json::array({e, c.coords()}));
  }
  j["terms"] = terms;
  return j;
}

/// A matrix entry: an expression string or a series object.
inline GrowthSeries series_entry_from_json(const Json& j, const FieldSpec* k, int N) {
  if (j.is_string()) return parse_series(j.get<std::string>(), k, N);
  if (j.is_number_integer()) return GrowthSeries::monomial(RingSpec::get(k, N), j.get<long long>(), 0);
  Json o = j;
  if (!o.contains("p")) o["p"] = k->p();
  if (!o.contains("N")) o["N"] = N;
  return growth_from_json(o);
}

inline Matrix<GrowthSeries> series_matrix_from_json(const Json& j, const FieldSpec* k, int N) {
  if (!j.is_array() || j.empty()) throw InputError("matrix must be a nonempty array of rows");
  Matrix<GrowthSeries> m;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != j.size()) throw InputError("matrix must be square");
    m.emplace_back();
    for (const auto& x : row) m.back().push_back(series_entry_from_json(x, k, N));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Filtrations: {"numbering":"upper","inertia_order":9,"breaks":[[1,9],[4,3]]}.
// Each break is paired with the group order at that break.

inline RamFiltration filtration_from_json(const Json& j) {
  const std::string nb = detail::get_as<std::string>(j, "numbering");
  Numbering n;
  if (nb == "upper")
    n = Numbering::upper;
  else if (nb == "lower")
    n = Numbering::lower;
  else
    throw InputError("numbering must be 'upper' or 'lower'");
  std::vector<std::pair<Rational, long>> steps;
  for (const auto& b : detail::get_as<Json>(j, "breaks")) {
    if (!b.is_array() || b.size() != 2 || !b[1].is_number_integer()) throw InputError("break must be [break, order]");
    steps.emplace_back(rational_from_json(b[0]), b[1].get<long>());
  }
  return RamFiltration::from_steps(n, detail::get_as<long>(j, "inertia_order"), steps);
}

inline Json filtration_to_json(const RamFiltration& f) {
  Json j;
  j["numbering"] = to_string(f.numbering);
  j["inertia_order"] = f.inertia_order();
  Json b = Json::array();
  for (const auto& [x, m] : f.steps()) b.push_back(Json::array({rational_to_json(x), m}));
  j["breaks"] = b;
  return j;
}

// ---------------------------------------------------------------------------
// Artin-Schreier extensions: {"p":3,"f":"T^-2+T^-1","M":64}.

inline ASExtension as_from_json(const Json& j) {
  const FieldSpec* k = detail::field_from_json(j);
  ASExtension e;
  const Json& f = detail::require(j, "f");
  e.f = f.is_string() ? reduce_mod_p(parse_series(f.get<std::string>(), k, 1)) : perf_from_json(f, k);
  e.M = detail::get_or<int>(j, "M", 0);
  if (e.M == 0 && e.f.valuation_known() && e.f.valuation().v < 0)
    e.M = static_cast<int>(8 * e.pole_order() * k->p());
  e.validate();
  return e;
}

// ---------------------------------------------------------------------------
// Towers: {"p":2,"g0":0,"d":1,"branch_points":[{"upper_breaks":[1,2,4,8]}]}.
// Optional "n_max" (default: the shortest break list) and "degrees" (d_0..d_n_max).

inline TowerSpec tower_from_json(const Json& j) {
  TowerSpec s;
  s.p = detail::get_as<long>(j, "p");
  s.g0 = detail::get_or<long>(j, "g0", 0);
  s.rep_dim = detail::get_or<int>(j, "d", 1);
  std::optional<int> shortest;
  for (const auto& b : detail::get_as<Json>(j, "branch_points")) {
    s.branch_points.push_back(detail::get_as<std::vector<long>>(b, "upper_breaks"));
    const int len = static_cast<int>(s.branch_points.back().size());
    shortest = shortest ? std::min(*shortest, len) : len;
  }
  s.n_max = detail::get_or<int>(j, "n_max", shortest.value_or(0));
  if (j.contains("degrees"))
    for (const auto& d : j.at("degrees")) s.degrees.push_back(num(rational_from_json(d)));
  s.validate();
  return s;
}

inline Json tower_to_json(const TowerSpec& s) {
  Json j;
  j["p"] = s.p;
  j["g0"] = s.g0;
  j["d"] = s.rep_dim;
  j["n_max"] = s.n_max;
  Json b = Json::array();
  for (const auto& u : s.branch_points) b.push_back({{"upper_breaks", u}});
  j["branch_points"] = b;
  if (!s.degrees.empty()) {
    Json d = Json::array();
    for (const auto& x : s.degrees) d.push_back(rational_to_json(Rational(x)));
    j["degrees"] = d;
  }
  return j;
}

inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace logdecay
