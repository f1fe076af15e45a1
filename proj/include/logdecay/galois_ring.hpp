#pragma once

// Truncated Witt vectors of a finite field, W_N(F_q) = (Z/p^N)[x]/(F) with F a
// monic lift of the residue field modulus.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "errors.hpp"
#include "field.hpp"

namespace logdecay {

inline constexpr int kMaxDegree = 8;

class RingSpec {
 public:
  static const RingSpec* get(const FieldSpec* f, int N) {
    static std::mutex mu;
    static std::map<std::pair<const FieldSpec*, int>, std::unique_ptr<RingSpec>> registry;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(f, N);
    auto it = registry.find(key);
    if (it != registry.end()) return it->second.get();
    auto spec = std::unique_ptr<RingSpec>(new RingSpec(f, N));
    const RingSpec* out = spec.get();
    registry.emplace(key, std::move(spec));
    spec_init(const_cast<RingSpec*>(out));
    return out;
  }

  const FieldSpec* field() const { return f_; }
  long p() const { return f_->p(); }
  int degree() const { return f_->degree(); }
  int N() const { return N_; }
  std::int64_t modulus_pN() const { return pN_; }
  /// Image of the generator x under the Witt Frobenius.
  const std::array<std::int64_t, kMaxDegree>& frob_gen() const { return frob_gen_; }
  const std::array<std::int64_t, kMaxDegree>& frob_inv_gen() const { return frob_inv_gen_; }
  const std::vector<std::int64_t>& lifted_modulus() const { return F_; }

 private:
  RingSpec(const FieldSpec* f, int N) : f_(f), N_(N) {
    if (N < 1) throw InputError("precision N must be >= 1");
    if (f->degree() > kMaxDegree) throw InputError("residue field degree too large");
    pN_ = 1;
    for (int i = 0; i < N; ++i) {
      pN_ *= f->p();
      if (pN_ > (std::int64_t{1} << 31)) throw InputError("p^N too large");
    }
    for (long c : f->modulus()) F_.push_back(c);
  }
  static void spec_init(RingSpec* r);

  const FieldSpec* f_;
  int N_;
  std::int64_t pN_ = 1;
  std::vector<std::int64_t> F_;
  std::array<std::int64_t, kMaxDegree> frob_gen_{};
  std::array<std::int64_t, kMaxDegree> frob_inv_gen_{};
};

/// An element of W_N(F_q). Coordinates are in [0, p^N).
class Zq {
 public:
  Zq() = default;
  explicit Zq(const RingSpec* r) : r_(r) {}
  static Zq from_int(const RingSpec* r, long long v) {
    Zq z(r);
    z.c_[0] = mod(v, r->modulus_pN());
    return z;
  }
  static Zq from_coords(const RingSpec* r, const std::vector<long long>& c) {
    if (static_cast<int>(c.size()) > r->degree()) throw InputError("too many coordinates");
    Zq z(r);
    for (std::size_t i = 0; i < c.size(); ++i) z.c_[i] = mod(c[i], r->modulus_pN());
    return z;
  }
  /// Coordinatewise lift of a residue field element to [0, p).
  static Zq lift(const RingSpec* r, const FqElem& x) {
    if (x.field() != r->field()) throw FieldMismatch("lift into ring over another field");
    auto c = x.coords();
    Zq z(r);
    for (std::size_t i = 0; i < c.size(); ++i) z.c_[i] = c[i];
    return z;
  }
  /// Multiplicative representative of x, i.e. lift(x)^{q^{N-1}}.
  static Zq teichmuller(const RingSpec* r, const FqElem& x) {
    if (x.is_zero()) return Zq(r);
    static std::mutex mu;
    static std::map<std::pair<const RingSpec*, std::uint32_t>, Zq> cache;
    {
      std::lock_guard<std::mutex> lock(mu);
      auto it = cache.find({r, x.code()});
      if (it != cache.end()) return it->second;
    }
    Zq z = lift(r, x);
    long long q = r->field()->size();
    for (int i = 0; i + 1 < r->N(); ++i) z = z.pow(q);
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(std::make_pair(r, x.code()), z);
    return z;
  }

  const RingSpec* ring() const { return r_; }
  std::int64_t coord(int i) const { return c_[i]; }
  std::vector<long long> coords() const {
    return std::vector<long long>(c_.begin(), c_.begin() + r_->degree());
  }

  bool is_zero() const {
    for (int i = 0; i < r_->degree(); ++i)
      if (c_[i] != 0) return false;
    return true;
  }
  /// p-adic valuation, N for zero.
  int vp() const {
    int best = r_->N();
    for (int i = 0; i < r_->degree(); ++i) {
      if (c_[i] == 0) continue;
      int v = 0;
      std::int64_t x = c_[i];
      while (x % r_->p() == 0) {
        x /= r_->p();
        ++v;
      }
      if (v < best) best = v;
    }
    return best;
  }
  FqElem residue() const {
    std::vector<long> c(r_->degree());
    for (int i = 0; i < r_->degree(); ++i) c[i] = static_cast<long>(c_[i] % r_->p());
    return FqElem::from_coords(r_->field(), c);
  }

  Zq operator+(const Zq& o) const {
    Zq z(r_);
    check(o);
    const auto m = r_->modulus_pN();
    for (int i = 0; i < r_->degree(); ++i) {
      z.c_[i] = c_[i] + o.c_[i];
      if (z.c_[i] >= m) z.c_[i] -= m;
    }
    return z;
  }
  Zq operator-() const {
    Zq z(r_);
    const auto m = r_->modulus_pN();
    for (int i = 0; i < r_->degree(); ++i) z.c_[i] = c_[i] == 0 ? 0 : m - c_[i];
    return z;
  }
  Zq operator-(const Zq& o) const { return *this + (-o); }
  Zq operator*(const Zq& o) const {
    check(o);
    const int a = r_->degree();
    const auto m = r_->modulus_pN();
    Zq z(r_);
    if (a == 1) {
      z.c_[0] = static_cast<std::int64_t>((static_cast<__int128>(c_[0]) * o.c_[0]) % m);
      return z;
    }
    std::array<__int128, 2 * kMaxDegree> acc{};
    for (int i = 0; i < a; ++i) {
      if (c_[i] == 0) continue;
      for (int j = 0; j < a; ++j) acc[i + j] += static_cast<__int128>(c_[i]) * o.c_[j];
    }
    for (auto& v : acc) v %= m;
    const auto& F = r_->lifted_modulus();
    for (int i = 2 * a - 2; i >= a; --i) {
      __int128 t = acc[i] % m;
      if (t == 0) continue;
      for (int j = 0; j < a; ++j) acc[i - a + j] = (acc[i - a + j] - t * F[j]) % m;
      acc[i] = 0;
    }
    for (int i = 0; i < a; ++i) z.c_[i] = static_cast<std::int64_t>(((acc[i] % m) + m) % m);
    return z;
  }
  Zq& operator+=(const Zq& o) { return *this = *this + o; }
  Zq& operator-=(const Zq& o) { return *this = *this - o; }
  Zq& operator*=(const Zq& o) { return *this = *this * o; }
  Zq scale(long long k) const {
    Zq z(r_);
    const auto m = r_->modulus_pN();
    for (int i = 0; i < r_->degree(); ++i)
      z.c_[i] = static_cast<std::int64_t>(((static_cast<__int128>(c_[i]) * mod(k, m)) % m));
    return z;
  }
  Zq pow(long long e) const {
    if (e < 0) return inv().pow(-e);
    Zq result = from_int(r_, 1), base = *this;
    while (e) {
      if (e & 1) result *= base;
      e >>= 1;
      if (e) base *= base;
    }
    return result;
  }
  /// Inverse of a unit (nonzero residue) by Newton iteration.
  Zq inv() const {
    FqElem res = residue();
    if (res.is_zero()) throw NotInvertible("non-unit in W_N(F_q)");
    Zq y = lift(r_, res.inv());
    Zq two = from_int(r_, 2);
    for (int k = 1; k < r_->N(); k *= 2) y = y * (two - *this * y);
    return y;
  }
  /// Exact division by p^k; requires p^k | x, loses k digits of precision.
  Zq div_p(int k) const {
    Zq z(r_);
    std::int64_t pk = 1;
    for (int i = 0; i < k; ++i) pk *= r_->p();
    for (int i = 0; i < r_->degree(); ++i) {
      if (c_[i] % pk != 0) throw InputError("division by p^k of a non-multiple");
      z.c_[i] = c_[i] / pk;
    }
    return z;
  }
  /// Reduction modulo p^k, keeping the representative in [0, p^k).
  Zq truncate(int k) const {
    if (k >= r_->N()) return *this;
    Zq z(r_);
    std::int64_t pk = 1;
    for (int i = 0; i < k; ++i) pk *= r_->p();
    for (int i = 0; i < r_->degree(); ++i) z.c_[i] = c_[i] % pk;
    return z;
  }
  /// Witt vector Frobenius (identity over F_p).
  Zq frob() const { return apply_gen(r_->frob_gen()); }
  Zq frob_inv() const { return apply_gen(r_->frob_inv_gen()); }
  Zq frob_pow(int e) const {
    Zq z = *this;
    if (r_->degree() == 1) return z;
    for (int i = 0; i < e; ++i) z = z.frob();
    for (int i = 0; i < -e; ++i) z = z.frob_inv();
    return z;
  }

  friend bool operator==(const Zq& x, const Zq& y) {
    if (x.r_ != y.r_) return false;
    for (int i = 0; i < x.r_->degree(); ++i)
      if (x.c_[i] != y.c_[i]) return false;
    return true;
  }
  friend bool operator!=(const Zq& x, const Zq& y) { return !(x == y); }

  std::string str() const {
    if (r_->degree() == 1) return std::to_string(c_[0]);
    std::string s = "(";
    for (int i = 0; i < r_->degree(); ++i) s += (i ? "," : "") + std::to_string(c_[i]);
    return s + ")";
  }

  /// Signed representative of a = 1 elements in (-p^N/2, p^N/2].
  long long centered() const {
    const auto m = r_->modulus_pN();
    return c_[0] > m / 2 ? c_[0] - m : c_[0];
  }

  static std::int64_t mod(long long v, std::int64_t m) {
    long long r = v % m;
    return r < 0 ? r + m : r;
  }

 private:
  void check(const Zq& o) const {
    if (o.r_ != r_) throw FieldMismatch("W_N(F_q) elements over different rings");
  }
  Zq apply_gen(const std::array<std::int64_t, kMaxDegree>& img) const {
    if (r_->degree() == 1) return *this;
    Zq g(r_);
    g.c_ = img;
    Zq acc(r_), power = from_int(r_, 1);
    for (int i = 0; i < r_->degree(); ++i) {
      acc += power.scale(c_[i]);
      power *= g;
    }
    return acc;
  }

  const RingSpec* r_ = nullptr;
  std::array<std::int64_t, kMaxDegree> c_{};
};

inline void RingSpec::spec_init(RingSpec* r) {
  if (r->degree() == 1) {
    r->frob_gen_[0] = 0;
    r->frob_inv_gen_[0] = 0;
    return;
  }
  // Teichmuller digits of the generator, each digit raised to the p-th power.
  auto frob_of = [r](const Zq& x, bool inverse) {
    Zq rest = x, acc(r);
    std::int64_t pi = 1;
    for (int i = 0; i < r->N(); ++i) {
      FqElem d = rest.residue();
      Zq t = Zq::teichmuller(r, d);
      acc += Zq::teichmuller(r, inverse ? d.frob_inv() : d.frob()).scale(pi);
      rest = rest - t;
      if (i + 1 < r->N()) rest = rest.div_p(1);
      pi *= r->p();
    }
    return acc;
  };
  Zq g = Zq::from_coords(r, {0, 1});
  Zq img = frob_of(g, false), inv_img = frob_of(g, true);
  for (int i = 0; i < r->degree(); ++i) {
    r->frob_gen_[i] = img.coord(i);
    r->frob_inv_gen_[i] = inv_img.coord(i);
  }
}

}  // namespace logdecay
