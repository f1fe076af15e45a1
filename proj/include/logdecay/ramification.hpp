#pragma once

// Higher ramification filtrations as step functions, the Herbrand functions,
// the different, and the inequalities relating breaks and differents.
//
// Lower numbering follows the classical indexing: g lies in G_x exactly when
// v_L(g(T_L) - T_L) >= x + 1. With this indexing an Artin-Schreier extension
// y^p - y = T^{-n} has its single break at n in both numberings.

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace logdecay {

enum class Numbering { lower, upper };

inline std::string to_string(Numbering n) { return n == Numbering::lower ? "lower" : "upper"; }

/// Decreasing chain of inertia subgroups indexed by x >= 0.
/// The group is orders[0] on [0, s_1] and orders[i] on (s_i, s_{i+1}];
/// at a break it is the larger group, so the last break is the largest x
/// with a nontrivial group. orders.back() == 1.
struct RamFiltration {
  Numbering numbering = Numbering::upper;
  std::vector<Rational> breaks;
  std::vector<long> orders{1};

  /// Filtration from (break, order of the group at the break) pairs.
  static RamFiltration from_steps(Numbering n, long inertia_order,
                                  const std::vector<std::pair<Rational, long>>& steps) {
    RamFiltration f;
    f.numbering = n;
    f.orders.clear();
    if (!steps.empty() && steps.front().second != inertia_order)
      throw InputError("first step order must equal the inertia order");
    for (const auto& [s, m] : steps) {
      f.breaks.push_back(s);
      f.orders.push_back(m);
    }
    f.orders.push_back(steps.empty() ? inertia_order : 1);
    f.validate();
    return f;
  }

  std::vector<std::pair<Rational, long>> steps() const {
    std::vector<std::pair<Rational, long>> out;
    for (std::size_t i = 0; i < breaks.size(); ++i) out.emplace_back(breaks[i], orders[i]);
    return out;
  }

  void validate() const {
    if (orders.size() != breaks.size() + 1) throw InputError("filtration needs one more order than breaks");
    if (orders.back() != 1) throw InputError("filtration must end in the trivial group");
    for (std::size_t i = 0; i < breaks.size(); ++i) {
      if (breaks[i] < 0) throw InputError("negative break");
      if (i > 0 && breaks[i] <= breaks[i - 1]) throw InputError("breaks must increase strictly");
      if (orders[i + 1] >= orders[i]) throw InputError("orders must drop at each break");
      if (orders[i + 1] < 1 || orders[0] % orders[i + 1] != 0)
        throw InputError("group orders must divide the inertia order");
    }
  }

  long inertia_order() const { return orders.front(); }
  bool ramified() const { return !breaks.empty(); }

  /// Largest x with a nontrivial group (lambda or mu); 0 when unramified.
  Rational top_break() const { return breaks.empty() ? Rational(0) : breaks.back(); }

  /// |G_x| for x >= 0.
  long order_at(const Rational& x) const {
    auto it = std::lower_bound(breaks.begin(), breaks.end(), x);
    return orders[static_cast<std::size_t>(it - breaks.begin())];
  }

  friend bool operator==(const RamFiltration& a, const RamFiltration& b) {
    return a.numbering == b.numbering && a.breaks == b.breaks && a.orders == b.orders;
  }
};

/// Continuous increasing piecewise-linear map [0, inf) -> [0, inf) with f(0) = 0.
/// slopes[i] holds on [knots[i-1], knots[i]) with knots[-1] = 0; the last slope
/// continues to infinity.
class PiecewiseLinear {
 public:
  PiecewiseLinear() : slopes_{1} {}
  PiecewiseLinear(std::vector<Rational> knots, std::vector<Rational> slopes)
      : knots_(std::move(knots)), slopes_(std::move(slopes)) {
    if (slopes_.size() != knots_.size() + 1) throw InputError("need one more slope than knots");
    for (std::size_t i = 0; i < knots_.size(); ++i)
      if (knots_[i] <= (i ? knots_[i - 1] : Rational(0))) throw InputError("knots must increase from 0");
    for (const auto& s : slopes_)
      if (s <= 0) throw InputError("slopes must be positive");
    normalize();
  }

  const std::vector<Rational>& knots() const { return knots_; }
  const std::vector<Rational>& slopes() const { return slopes_; }

  Rational operator()(const Rational& x) const {
    if (x < 0) throw InputError("piecewise-linear map is defined on x >= 0");
    Rational y = 0, left = 0;
    for (std::size_t i = 0; i < knots_.size(); ++i) {
      if (x <= knots_[i]) return y + (x - left) * slopes_[i];
      y += (knots_[i] - left) * slopes_[i];
      left = knots_[i];
    }
    return y + (x - left) * slopes_.back();
  }

  /// Slope of the segment containing [x, x + eps).
  Rational slope_at(const Rational& x) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    return slopes_[static_cast<std::size_t>(it - knots_.begin())];
  }

  PiecewiseLinear inverse() const {
    std::vector<Rational> k, s;
    for (const auto& x : knots_) k.push_back((*this)(x));
    for (const auto& m : slopes_) s.push_back(1 / m);
    return {k, s};
  }

  /// f o g.
  friend PiecewiseLinear compose(const PiecewiseLinear& f, const PiecewiseLinear& g) {
    std::vector<Rational> pts = g.knots_;
    PiecewiseLinear gi = g.inverse();
    for (const auto& k : f.knots_) pts.push_back(gi(k));
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<Rational> s{g.slope_at(0) * f.slope_at(0)};
    for (const auto& x : pts) s.push_back(g.slope_at(x) * f.slope_at(g(x)));
    return {pts, s};
  }

  friend bool operator==(const PiecewiseLinear& a, const PiecewiseLinear& b) {
    return a.knots_ == b.knots_ && a.slopes_ == b.slopes_;
  }

  std::string str() const {
    std::string out = "slope " + to_string(slopes_[0]);
    for (std::size_t i = 0; i < knots_.size(); ++i)
      out += " | " + to_string(knots_[i]) + " slope " + to_string(slopes_[i + 1]);
    return out;
  }

 private:
  // Drop knots where the slope does not change, so equal maps compare equal.
  void normalize() {
    std::vector<Rational> k, s{slopes_[0]};
    for (std::size_t i = 0; i < knots_.size(); ++i) {
      if (slopes_[i + 1] == s.back()) continue;
      k.push_back(knots_[i]);
      s.push_back(slopes_[i + 1]);
    }
    knots_ = std::move(k);
    slopes_ = std::move(s);
  }

  std::vector<Rational> knots_;
  std::vector<Rational> slopes_;
};

struct Herbrand {
  PiecewiseLinear psi;  // upper -> lower
  PiecewiseLinear phi;  // lower -> upper
};

/// psi(y) = int_0^y [G^0 : G^s] ds for an upper filtration,
/// phi(x) = int_0^x dt / [G_0 : G_t] for a lower one; the other is the inverse.
inline Herbrand herbrand(const RamFiltration& filt) {
  filt.validate();
  const Rational m0 = filt.inertia_order();
  std::vector<Rational> knots, slopes;
  for (std::size_t i = 0; i <= filt.breaks.size(); ++i) {
    // A break at 0 leaves the segment [0, 0] empty.
    if (i < filt.breaks.size() && filt.breaks[i] == 0) continue;
    if (i > 0 && filt.breaks[i - 1] > 0) knots.push_back(filt.breaks[i - 1]);
    Rational index = m0 / Rational(filt.orders[i]);
    slopes.push_back(filt.numbering == Numbering::upper ? index : 1 / index);
  }
  PiecewiseLinear f(knots, slopes);
  if (filt.numbering == Numbering::upper) return {f, f.inverse()};
  return {f.inverse(), f};
}

/// The same chain of groups in the other numbering.
inline RamFiltration convert_numbering(const RamFiltration& filt) {
  Herbrand h = herbrand(filt);
  RamFiltration out = filt;
  const bool to_lower = filt.numbering == Numbering::upper;
  out.numbering = to_lower ? Numbering::lower : Numbering::upper;
  for (auto& s : out.breaks) s = to_lower ? h.psi(s) : h.phi(s);
  return out;
}

inline RamFiltration as_numbering(const RamFiltration& filt, Numbering n) {
  return filt.numbering == n ? filt : convert_numbering(filt);
}

/// sum_{i >= 0} (|G_i| - 1). Lower breaks must be integers.
inline BigInt different(const RamFiltration& filt) {
  RamFiltration low = as_numbering(filt, Numbering::lower);
  for (const auto& s : low.breaks)
    if (den(s) != 1) throw InputError("different needs integer lower breaks, got " + to_string(s));
  // |G_i| is constant on the integers of each segment, so sum run by run.
  BigInt delta = 0, prev = -1;
  for (std::size_t k = 0; k < low.breaks.size(); ++k) {
    const BigInt s = num(low.breaks[k]);
    delta += (s - prev) * (low.orders[k] - 1);
    prev = s;
  }
  return delta;
}

namespace detail {

// Subgroups of a cyclic group form a chain, so G^s H is the larger of the two.
inline void check_chain(const RamFiltration& f, long h) {
  if (h < 1 || f.inertia_order() % h != 0) throw InputError("subgroup order must divide the inertia order");
  for (long m : f.orders)
    if (m % h != 0 && h % m != 0) throw InputError("subgroup is not comparable with the filtration");
}

inline RamFiltration filtration_from_orders(Numbering n, const RamFiltration& f, long (*map)(long, long),
                                            long h) {
  RamFiltration out;
  out.numbering = n;
  out.orders = {map(f.orders[0], h)};
  for (std::size_t i = 0; i < f.breaks.size(); ++i) {
    long m = map(f.orders[i + 1], h);
    if (m == out.orders.back()) continue;
    out.breaks.push_back(f.breaks[i]);
    out.orders.push_back(m);
  }
  out.validate();
  return out;
}

}  // namespace detail

/// Upper filtration of G/H for the subgroup H of order h: G^s H / H.
/// Assumes the groups form a chain with H, as in a cyclic group.
inline RamFiltration quotient_filtration(const RamFiltration& upper, long h) {
  RamFiltration u = as_numbering(upper, Numbering::upper);
  detail::check_chain(u, h);
  return detail::filtration_from_orders(
      Numbering::upper, u, [](long m, long hh) { return std::max(m, hh) / hh; }, h);
}

/// Lower filtration of the subgroup H of order h: H_x = G_x cap H.
inline RamFiltration subgroup_filtration(const RamFiltration& lower, long h) {
  RamFiltration l = as_numbering(lower, Numbering::lower);
  detail::check_chain(l, h);
  return detail::filtration_from_orders(
      Numbering::lower, l, [](long m, long hh) { return std::min(m, hh); }, h);
}

struct BoundRow {
  std::string name;
  Rational lhs;
  Rational rhs;
  bool strict = false;    // lhs < rhs rather than lhs <= rhs
  bool asserted = true;   // false: identity reported as a residual only
  bool holds = false;
  Rational residual() const { return rhs - lhs; }
};

struct BoundReport {
  Rational lambda;  // last lower break
  Rational mu;      // last upper break
  long order = 1;
  std::optional<BigInt> delta;
  std::vector<BoundRow> rows;

  bool all_hold() const {
    return std::all_of(rows.begin(), rows.end(), [](const BoundRow& r) { return !r.asserted || r.holds; });
  }
};

namespace detail {

inline BoundRow bound_row(std::string name, Rational lhs, Rational rhs, bool asserted = true) {
  BoundRow r{std::move(name), std::move(lhs), std::move(rhs)};
  r.asserted = asserted;
  r.holds = asserted ? r.lhs <= r.rhs : r.lhs == r.rhs;
  return r;
}

}  // namespace detail

/// Evaluates both sides of each inequality between breaks, orders and the
/// different. With `quotient` (upper filtration of a Galois subextension K/F)
/// the bound on the upper break through K/F is added.
inline BoundReport bound_checks(const RamFiltration& filt, const std::optional<RamFiltration>& quotient = {}) {
  const RamFiltration up = as_numbering(filt, Numbering::upper);
  const RamFiltration low = as_numbering(filt, Numbering::lower);
  BoundReport rep;
  rep.lambda = low.top_break();
  rep.mu = up.top_break();
  rep.order = up.inertia_order();
  const Rational G = rep.order;
  const Rational index_at_mu = G / Rational(up.order_at(rep.mu));

  // lambda = int_0^mu [G : G^s] ds <= sum of (s_i - s_{i-1}) [G : G^{s_i}] on any grid ending at mu.
  rep.rows.push_back(detail::bound_row("lower_bound_through_upper", rep.lambda, rep.mu * index_at_mu));
  Rational grid_sum = 0, prev = 0;
  for (const auto& s : up.breaks) {
    grid_sum += (s - prev) * (G / Rational(up.order_at(s)));
    prev = s;
  }
  rep.rows.push_back(detail::bound_row("lower_bound_through_upper_break_grid", rep.lambda, grid_sum));

  bool integral = std::all_of(low.breaks.begin(), low.breaks.end(), [](const Rational& s) { return den(s) == 1; });

  // max over g != 1 of v_T(T_L - g T_L) is (lambda + 1)/|G|; it must lie below every s > mu.
  // The valuation reading needs integral lower breaks; otherwise the row is reported only.
  if (up.ramified()) {
    BoundRow row = detail::bound_row("upper_to_lower", (rep.lambda + 1) / G, rep.mu);
    row.asserted = integral;
    rep.rows.push_back(row);
  }

  if (integral) {
    rep.delta = different(low);
    const Rational d = Rational(*rep.delta) / G;
    const Rational top = up.ramified() ? Rational(up.order_at(rep.mu)) : Rational(1);
    rep.rows.push_back(detail::bound_row("upper_break_and_different", rep.mu / top, d));
    rep.rows.push_back(detail::bound_row("different_and_breaks", d, rep.mu - rep.lambda / G, false));
  }

  if (quotient) {
    const RamFiltration q = as_numbering(*quotient, Numbering::upper);
    if (rep.order % q.inertia_order() != 0) throw InputError("incompatible pair: quotient order does not divide");
    if (!(quotient_filtration(up, rep.order / q.inertia_order()) == q))
      throw InputError("incompatible pair: quotient filtration differs from G^s H / H");
    const Rational rhs = rep.lambda / Rational(q.inertia_order()) + q.top_break();
    rep.rows.push_back(detail::bound_row("bounding_upper_break", rep.mu, rhs));
  }
  return rep;
}

}  // namespace logdecay
