#pragma once

// Command-line front end. Exit codes: 0 success, 1 input error, 2 a checked
// inequality failed (a library bug signal).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "logdecay/artin_schreier.hpp"
#include "logdecay/embed.hpp"
#include "logdecay/json_io.hpp"
#include "logdecay/phinabla.hpp"
#include "logdecay/ramification.hpp"
#include "logdecay/towers.hpp"
#include "suite.hpp"

namespace logdecay::cli {

inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kVerdictFailure = 2;

/// Precision cap for Witt-backed commands; LOGDECAY_MAX_N lowers or raises it.
inline int max_precision() {
  const char* v = std::getenv("LOGDECAY_MAX_N");
  if (!v || !*v) return 5;
  try {
    int n = std::stoi(v);
    if (n < 1) throw InputError("LOGDECAY_MAX_N must be positive");
    return n;
  } catch (const std::logic_error&) {
    throw InputError("LOGDECAY_MAX_N is not an integer");
  }
}

inline void check_precision(int N) {
  if (N < 1) throw InputError("precision N must be positive");
  if (N > max_precision())
    throw InputError("precision overflow: N = " + std::to_string(N) + " exceeds the cap " +
                     std::to_string(max_precision()));
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str());
}

inline std::string csv(const ExtRational& x) { return x.str(); }
inline std::string csv(const Rational& x) { return to_string(x); }
inline std::string csv(const BigInt& x) { return x.str(); }
inline std::string csv(bool b) { return b ? "true" : "false"; }

/// Quote a field when it contains a comma or a quote.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

// ---------------------------------------------------------------------------
// Commands. Each writes its report to out and returns an exit code.

inline int growth_classify(const std::string& path, const std::string& r_text, const std::string& format,
                           std::ostream& out) {
  GrowthSeries f = growth_from_json(read_json_file(path));
  check_precision(f.N());
  const Rational r = parse_rational(r_text);
  GrowthClass g = classify_growth(f, r);
  const std::string witness = g.witness_c ? g.witness_c->str() : "";
  const std::string r_hat = g.r_hat ? g.r_hat->str() : "";
  if (format == "json") {
    Json j;
    j["kind"] = to_string(g.kind);
    j["r"] = to_string(r);
    j["witness_c"] = witness;
    j["r_hat"] = r_hat;
    j["linear_c"] = to_string(g.linear_c);
    j["linear_c0"] = to_string(g.linear_c0);
    Json v = Json::array();
    for (const auto& x : g.v) v.push_back(x.str());
    j["v"] = v;
    out << j.dump(2) << "\n";
    return kOk;
  }
  out << "n,v_n,ratio,kind,witness_c,r_hat\n";
  for (std::size_t n = 0; n < g.v.size(); ++n) {
    std::string ratio = g.v[n].is_inf() || g.v[n].v >= 0 ? "" : PowRat(-g.v[n].v, -r * Rational(n), f.p()).str();
    out << n << "," << csv(g.v[n]) << "," << ratio << "," << to_string(g.kind) << "," << witness << ","
        << csv_field(r_hat) << "\n";
  }
  return kOk;
}

inline int witt_classify(const std::string& path, const std::string& r_text, const std::optional<std::string>& c_text,
                         std::ostream& out) {
  WittElem x = witt_from_json(read_json_file(path));
  check_precision(x.absolute_precision());
  const Rational r = parse_rational(r_text);
  std::vector<std::pair<std::string, GrowthQuery>> queries;
  if (c_text) queries.emplace_back("Arc", GrowthQuery::Arc(r, parse_rational(*c_text)));
  queries.emplace_back("Br", GrowthQuery::Br(r));
  queries.emplace_back("Bdagger", GrowthQuery::Bdagger());
  out << "query,r,c,verdict,least_c\n";
  for (const auto& [name, q] : queries) {
    if (name == "Arc" && x.p_shift() < 0) throw InputError("Arc query needs p_shift >= 0");
    MembershipResult m = growth_membership(x, q);
    std::string least = m.least_c_exact ? m.least_c_exact->str() : (m.least_c ? m.least_c->str() : "none");
    out << name << "," << (name == "Bdagger" ? "" : to_string(q.r)) << "," << (name == "Arc" ? to_string(q.c) : "")
        << "," << to_string(m.verdict) << "," << csv_field(least) << "\n";
  }
  out << "n,v_T(x_n),w_n\n";
  for (int n = 0; n < x.absolute_precision(); ++n)
    out << n << "," << csv(witt_digit_valuation(x, n)) << "," << csv(witt_partial_valuation(x, n)) << "\n";
  return kOk;
}

inline int witt_embed(const std::string& sigma, long p, int N, const std::string& format, std::ostream& out) {
  check_precision(N);
  const FieldSpec* k = FieldSpec::prime(p);
  EmbedResult e = solve_frobenius_embed(parse_series(sigma, k, N), N);
  if (format == "json") {
    Json j = witt_to_json(e.slices);
    j["residual_zero"] = e.residual_zero;
    j["iterations"] = e.iterations;
    out << j.dump(2) << "\n";
  } else {
    out << "i,slice\n";
    for (int i = 0; i < e.slices.N(); ++i) out << i + e.slices.p_shift() << "," << csv_field(e.slices.slice(i).str()) << "\n";
    out << "residual_zero," << csv(e.residual_zero) << "\n";
  }
  if (!e.residual_zero) throw VerdictFailure("Frob(v) - P(v) = " + e.residual);
  return kOk;
}

struct ModuleInput {
  const FieldSpec* k = nullptr;
  int N = 3;
  GrowthSeries sigma;
  SeriesMatrix C, G;
};

/// {"p":2,"sigma":"T^p","C":[[...]],"G":[[...]],"N":3}; entries are expressions or series objects.
inline ModuleInput read_module(const std::string& path, const char* matrix_key = "C") {
  Json j = read_json_file(path);
  ModuleInput m;
  m.k = detail::field_from_json(j);
  m.N = detail::get_or<int>(j, "N", 3);
  check_precision(m.N);
  const Json& s = j.contains("sigma") ? j.at("sigma") : Json("T^p");
  m.sigma = series_entry_from_json(s, m.k, m.N);
  m.C = series_matrix_from_json(detail::require(j, matrix_key), m.k, m.N);
  if (j.contains("G")) {
    m.G = series_matrix_from_json(j.at("G"), m.k, m.N);
  } else {
    const RingSpec* r = RingSpec::get(m.k, m.N);
    m.G = SeriesMatrix(m.C.size(), std::vector<GrowthSeries>(m.C.size(), GrowthSeries::zero(r)));
  }
  return m;
}

inline void print_matrix(std::ostream& out, const std::string& name, const SeriesMatrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      out << name << "," << i << "," << j << "," << csv_field(m[i][j].str()) << "\n";
}

inline int phinabla_check(const std::string& path, std::ostream& out) {
  ModuleInput m = read_module(path);
  CompatReport rep = check_phi_nabla_compat(PhiNablaData{m.C, m.G, m.sigma, m.N});
  out << "matrix,i,j,entry\n";
  print_matrix(out, "residual", rep.residual);
  out << "compatible," << csv(rep.compatible) << "\n";
  return kOk;
}

inline int phinabla_trivialize(const std::string& path, std::ostream& out) {
  ModuleInput m = read_module(path);
  EmbedResult s = solve_frobenius_embed(m.sigma, m.N);
  PeriodMatrix A = trivialize_phi(m.C, s, m.N);
  PeriodGrowthReport rep = verify_period_growth(A.A, embed_matrix(m.C, s, m.N));
  out << "i,j,A_ij\n";
  for (std::size_t i = 0; i < A.A.size(); ++i)
    for (std::size_t j = 0; j < A.A.size(); ++j) out << i << "," << j << "," << csv_field(A.A[i][j].str()) << "\n";
  out << "n,w_n(A),w_n(C),holds\n";
  for (const auto& row : rep.rows) out << row.n << "," << csv(row.wA) << "," << csv(row.wC) << "," << to_string(row.holds) << "\n";
  if (rep.verdict == Verdict::non_member) throw VerdictFailure("w_n(A) >= w_n(C)/(p-1) violated");
  return kOk;
}

inline int phinabla_descend(const std::string& path, std::ostream& out) {
  Json j = read_json_file(path);
  ModuleInput m = read_module(path, j.contains("L") ? "L" : "C");
  PolynomialDescent D = descend_to_polynomial(m.C, m.N);
  out << "matrix,i,j,entry\n";
  print_matrix(out, "B", D.B);
  print_matrix(out, "BL", D.BL);
  out << "BL_polynomial," << csv(D.BL_polynomial) << "\nB_invertible," << csv(D.B_invertible) << "\nverified_below,"
      << D.verified_below << "\n";
  if (!D.BL_polynomial || !D.B_invertible) throw VerdictFailure("descent did not produce an invertible B with BL polynomial");
  return kOk;
}

inline int ram_herbrand(const std::string& path, std::ostream& out) {
  RamFiltration f = filtration_from_json(read_json_file(path));
  Herbrand h = herbrand(f);
  Json j;
  j["psi"] = h.psi.str();
  j["phi"] = h.phi.str();
  j["converted"] = filtration_to_json(convert_numbering(f));
  out << j.dump(2) << "\n";
  if (!(compose(h.phi, h.psi) == PiecewiseLinear())) throw VerdictFailure("phi o psi is not the identity");
  return kOk;
}

inline int ram_different(const std::string& path, std::ostream& out) {
  RamFiltration f = filtration_from_json(read_json_file(path));
  out << "delta\n" << different(f).str() << "\n";
  return kOk;
}

inline int ram_check(const std::string& path, const std::optional<std::string>& quotient, std::ostream& out) {
  RamFiltration f = filtration_from_json(read_json_file(path));
  std::optional<RamFiltration> q;
  if (quotient) q = filtration_from_json(read_json_file(*quotient));
  BoundReport rep = bound_checks(f, q);
  out << "name,lhs,rhs,residual,asserted,holds\n";
  for (const auto& r : rep.rows)
    out << r.name << "," << csv(r.lhs) << "," << csv(r.rhs) << "," << csv(r.residual()) << "," << csv(r.asserted) << ","
        << csv(r.holds) << "\n";
  if (!rep.all_hold()) throw VerdictFailure("a break/different inequality failed");
  return kOk;
}

inline int ram_as_analyze(const std::string& path, std::ostream& out) {
  ASExtension ext = as_from_json(read_json_file(path));
  ASReport rep = as_analyze(ext);
  out << "field,value\n";
  out << "p," << rep.p << "\nn," << rep.n << "\nv_L(g(T_L)-T_L)," << csv(rep.v_L_g_minus_id) << "\nbreak_lower,"
      << rep.break_lower << "\nbreak_upper," << rep.break_upper << "\ntorsion_exponent," << csv(rep.torsion_exponent)
      << "\ntorsion_bound," << csv(rep.torsion_bound) << "\ntorsion_within_bound," << csv(rep.torsion_within_bound)
      << "\n";
  for (std::size_t i = 0; i < rep.e_valuations.size(); ++i)
    out << "v_L(e_" << i + 1 << ")," << csv(rep.e_valuations[i]) << "\n";
  out << "j,v(x),v(x-gx),bound,holds\n";
  for (const auto& s : rep.samples)
    out << s.j << "," << csv(s.v_x) << "," << csv(s.v_diff) << "," << csv(s.bound) << "," << csv(s.holds) << "\n";
  if (!rep.samples_hold || !rep.torsion_within_bound) throw VerdictFailure("Artin-Schreier bound failed");
  return kOk;
}

/// Per level: d_n, mu_n and lambda_n (max over branch points), delta_n (sum),
/// genus columns, and the per-level witness ratios against p^{rn} and p^{(r+1)n}.
inline int tower_table(const std::string& path, const std::string& r_text, std::ostream& out) {
  TowerSpec s = tower_from_json(read_json_file(path));
  const Rational r = parse_rational(r_text);
  auto levels = tower_ramification(s);
  auto genus = genus_sequence(s);
  out << "n,d_n,mu_n,lambda_n,delta_n,delta_n/d_n,g_n,g_n/d_n,witness_mu,witness_delta,witness_g,g_n_printed\n";
  for (int n = 0; n <= s.n_max; ++n) {
    Rational mu = 0, lambda = 0;
    for (const auto& pt : levels[n].points) {
      mu = std::max(mu, pt.mu);
      lambda = std::max(lambda, pt.lambda);
    }
    const BigInt& d = genus[n].d;
    const Rational dd = Rational(genus[n].delta_sum) / Rational(d);
    const Rational rn = r * n;
    out << n << "," << d << "," << csv(mu) << "," << csv(lambda) << "," << genus[n].delta_sum << "," << csv(dd) << ","
        << genus[n].g << "," << csv(Rational(genus[n].g) / Rational(d)) << "," << PowRat(mu, -rn, s.p).str() << ","
        << PowRat(dd, -rn, s.p).str() << "," << PowRat(Rational(genus[n].g), -(rn + n), s.p).str() << ","
        << genus[n].g_printed << "\n";
  }
  if (s.n_max >= 3) {
    GrowthVerdict v = classify_rlog(s, r);
    if (!v.forward_implication || !v.backward_implication)
      throw VerdictFailure("mu-growth and delta/d-growth bounds do not imply each other");
  }
  return kOk;
}

inline int tower_generate(long p, const std::string& r_text, const std::string& c_text, int n_max, std::uint64_t seed,
                          long g0, std::ostream& out) {
  TowerSpec s = generate_tower(p, parse_rational(r_text), parse_rational(c_text), n_max, seed, g0);
  out << tower_to_json(s).dump() << "\n";
  return kOk;
}

inline int suite_run(bool quick, std::uint64_t seed, int threads, std::ostream& out) {
  suite::Report rep = suite::run({seed, quick, threads});
  out << rep.text();
  return rep.ok() ? kOk : kVerdictFailure;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact log-decay, ramification and tower computations"};
  app.require_subcommand(1);
  std::string input, r_text = "1", format = "csv", sigma, c_text = "1", quotient;
  std::optional<std::string> c_opt;
  long p = 2, g0 = 0;
  int N = 3, n_max = 10, threads = 4;
  std::uint64_t seed = 1;
  bool quick = false;
  std::function<int()> action;

  auto* growth = app.add_subcommand("growth", "Laurent series in E")->require_subcommand(1);
  auto* gc = growth->add_subcommand("classify", "per-slice v_n table and growth class");
  gc->add_option("input", input, "series JSON")->required();
  gc->add_option("--r", r_text, "growth exponent r");
  gc->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  gc->callback([&] { action = [&] { return growth_classify(input, r_text, format, out); }; });

  auto* witt = app.add_subcommand("witt", "Witt-vector period rings")->require_subcommand(1);
  auto* wc = witt->add_subcommand("classify", "membership table");
  wc->add_option("--input,input", input, "WittElem JSON")->required();
  wc->add_option("--r", r_text);
  wc->add_option("--c", c_opt, "constant for the Arc query");
  wc->callback([&] { action = [&] { return witt_classify(input, r_text, c_opt, out); }; });
  auto* we = witt->add_subcommand("embed", "solve Frob(v) = sigma(v) from v_0 = [T]");
  we->add_option("--sigma", sigma, "sigma(T), e.g. \"(1+T)^p-1\"")->required();
  we->add_option("--p", p);
  we->add_option("--N", N);
  we->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  we->callback([&] { action = [&] { return witt_embed(sigma, p, N, format, out); }; });

  auto* pn = app.add_subcommand("phinabla", "(phi, nabla)-modules")->require_subcommand(1);
  for (const char* name : {"check", "trivialize", "descend"}) {
    auto* sub = pn->add_subcommand(name);
    sub->add_option("input", input, "module JSON")->required();
    std::string which = name;
    sub->callback([&, which] {
      action = [&, which] {
        if (which == "check") return phinabla_check(input, out);
        if (which == "trivialize") return phinabla_trivialize(input, out);
        return phinabla_descend(input, out);
      };
    });
  }

  auto* ram = app.add_subcommand("ram", "ramification filtrations")->require_subcommand(1);
  for (const char* name : {"herbrand", "different", "check", "as-analyze"}) {
    auto* sub = ram->add_subcommand(name);
    sub->add_option("input", input, "filtration or extension JSON")->required();
    std::string which = name;
    if (which == "check") sub->add_option("--quotient", quotient, "upper filtration of a quotient");
    sub->callback([&, which] {
      action = [&, which] {
        if (which == "herbrand") return ram_herbrand(input, out);
        if (which == "different") return ram_different(input, out);
        if (which == "check")
          return ram_check(input, quotient.empty() ? std::nullopt : std::optional<std::string>(quotient), out);
        return ram_as_analyze(input, out);
      };
    });
  }

  auto* tower = app.add_subcommand("tower", "Z_p-towers")->require_subcommand(1);
  auto* tt = tower->add_subcommand("table", "per-level CSV");
  tt->add_option("input", input, "tower JSON")->required();
  tt->add_option("--r", r_text);
  tt->callback([&] { action = [&] { return tower_table(input, r_text, out); }; });
  auto* tg = tower->add_subcommand("generate", "pseudorandom admissible tower");
  tg->add_option("--p", p);
  tg->add_option("--r", r_text);
  tg->add_option("--c", c_text);
  tg->add_option("--n-max", n_max);
  tg->add_option("--seed", seed);
  tg->add_option("--g0", g0);
  tg->callback([&] { action = [&] { return tower_generate(p, r_text, c_text, n_max, seed, g0, out); }; });

  auto* su = app.add_subcommand("suite", "property suites")->require_subcommand(1);
  auto* sr = su->add_subcommand("run", "run every invariant group");
  sr->add_flag("--quick", quick, "reduced trial counts");
  sr->add_option("--seed", seed);
  sr->add_option("--threads", threads);
  sr->callback([&] { action = [&] { return suite_run(quick, seed, threads, out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }
  try {
    return action ? action() : kInputError;
  } catch (const VerdictFailure& e) {
    err << e.what() << "\n";
    return kVerdictFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace logdecay::cli
