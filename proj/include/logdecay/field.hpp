#pragma once

// Finite fields F_q = F_p[x]/(f) with q small enough for log/exp tables.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace logdecay {

/// Largest field size for which tables are built.
inline constexpr std::uint32_t kMaxFieldSize = 1U << 16;

/// The residue field F_{p^a}. Instances are interned: equal specs share one address.
class FieldSpec {
 public:
  /// Field defined by a monic irreducible modulus, coefficients low to high.
  static const FieldSpec* get(long p, const std::vector<long>& modulus) {
    static std::mutex mu;
    static std::map<std::pair<long, std::vector<long>>, std::unique_ptr<FieldSpec>> registry;
    std::vector<long> m = modulus;
    for (auto& c : m) c = ((c % p) + p) % p;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(p, m);
    auto it = registry.find(key);
    if (it != registry.end()) return it->second.get();
    auto spec = std::unique_ptr<FieldSpec>(new FieldSpec(p, m));
    const FieldSpec* out = spec.get();
    registry.emplace(key, std::move(spec));
    return out;
  }

  /// The prime field F_p.
  static const FieldSpec* prime(long p) { return get(p, {0, 1}); }

  /// F_{p^a} with the first irreducible monic modulus in lexicographic order.
  static const FieldSpec* of_degree(long p, int a) {
    if (a == 1) return prime(p);
    check_prime(p);
    std::vector<long> m(a + 1, 0);
    m[a] = 1;
    std::uint64_t count = 1;
    for (int i = 0; i < a; ++i) count *= static_cast<std::uint64_t>(p);
    for (std::uint64_t code = 1; code < count; ++code) {
      std::uint64_t c = code;
      for (int i = 0; i < a; ++i) {
        m[i] = static_cast<long>(c % p);
        c /= p;
      }
      if (m[0] != 0 && is_irreducible(p, m)) return get(p, m);
    }
    throw InputError("no irreducible polynomial found");
  }

  long p() const { return p_; }
  int degree() const { return a_; }
  std::uint32_t size() const { return q_; }
  const std::vector<long>& modulus() const { return modulus_; }

  std::uint32_t add(std::uint32_t x, std::uint32_t y) const {
    if (a_ == 1) return (x + y) % static_cast<std::uint32_t>(p_);
    std::uint32_t out = 0, scale = 1;
    const auto P = static_cast<std::uint32_t>(p_);
    for (int i = 0; i < a_; ++i) {
      out += ((x % P + y % P) % P) * scale;
      x /= P;
      y /= P;
      scale *= P;
    }
    return out;
  }
  std::uint32_t neg(std::uint32_t x) const {
    const auto P = static_cast<std::uint32_t>(p_);
    if (a_ == 1) return (P - x) % P;
    std::uint32_t out = 0, scale = 1;
    for (int i = 0; i < a_; ++i) {
      out += ((P - x % P) % P) * scale;
      x /= P;
      scale *= P;
    }
    return out;
  }
  std::uint32_t sub(std::uint32_t x, std::uint32_t y) const { return add(x, neg(y)); }
  std::uint32_t mul(std::uint32_t x, std::uint32_t y) const {
    if (x == 0 || y == 0) return 0;
    if (a_ == 1) return static_cast<std::uint32_t>((std::uint64_t(x) * y) % p_);
    std::uint32_t s = log_[x] + log_[y];
    if (s >= q_ - 1) s -= q_ - 1;
    return exp_[s];
  }
  std::uint32_t inv(std::uint32_t x) const {
    if (x == 0) throw NotInvertible("zero in F_q");
    std::uint32_t l = log_[x];
    return exp_[l == 0 ? 0 : (q_ - 1) - l];
  }
  std::uint32_t pow(std::uint32_t x, long long e) const {
    if (x == 0) {
      if (e < 0) throw NotInvertible("zero in F_q");
      return e == 0 ? 1 : 0;
    }
    long long m = static_cast<long long>(q_) - 1;
    long long l = (static_cast<long long>(log_[x]) * (((e % m) + m) % m)) % m;
    return exp_[static_cast<std::uint32_t>(l)];
  }
  /// Absolute Frobenius x -> x^p.
  std::uint32_t frob(std::uint32_t x) const { return pow(x, p_); }
  /// Inverse Frobenius x -> x^{p^{a-1}}.
  std::uint32_t frob_inv(std::uint32_t x) const {
    long long e = 1;
    for (int i = 0; i + 1 < a_; ++i) e *= p_;
    return pow(x, e);
  }
  /// Writes some y with y^k = x to *out; false when no such y exists in F_q.
  bool root(std::uint32_t x, long long k, std::uint32_t* out) const {
    if (k <= 0) throw InputError("root index must be positive");
    if (x == 0) {
      *out = 0;
      return true;
    }
    long long m = static_cast<long long>(q_) - 1;
    long long l = log_[x];
    for (long long t = 0; t < m; ++t) {
      if ((t * (k % m)) % m == l) {
        *out = exp_[static_cast<std::uint32_t>(t)];
        return true;
      }
    }
    return false;
  }
  std::uint32_t from_int(long long v) const {
    return static_cast<std::uint32_t>(((v % p_) + p_) % p_);
  }
  /// Coordinates in the power basis 1, x, ..., x^{a-1}.
  std::vector<long> coords(std::uint32_t x) const {
    std::vector<long> c(a_);
    for (int i = 0; i < a_; ++i) {
      c[i] = static_cast<long>(x % p_);
      x /= static_cast<std::uint32_t>(p_);
    }
    return c;
  }
  std::uint32_t from_coords(const std::vector<long>& c) const {
    if (static_cast<int>(c.size()) > a_) throw InputError("too many coordinates for F_q element");
    std::uint32_t out = 0, scale = 1;
    for (std::size_t i = 0; i < c.size(); ++i) {
      out += static_cast<std::uint32_t>(((c[i] % p_) + p_) % p_) * scale;
      scale *= static_cast<std::uint32_t>(p_);
    }
    return out;
  }

  static bool is_irreducible(long p, const std::vector<long>& m) {
    int a = static_cast<int>(m.size()) - 1;
    if (a < 1 || m[a] % p == 0) return false;
    if (a == 1) return true;
    // Trial division by every monic polynomial of degree 1..a/2.
    for (int d = 1; d <= a / 2; ++d) {
      std::uint64_t count = 1;
      for (int i = 0; i < d; ++i) count *= static_cast<std::uint64_t>(p);
      std::vector<long> g(d + 1, 0);
      g[d] = 1;
      for (std::uint64_t code = 0; code < count; ++code) {
        std::uint64_t c = code;
        for (int i = 0; i < d; ++i) {
          g[i] = static_cast<long>(c % p);
          c /= p;
        }
        if (poly_divides(p, g, m)) return false;
      }
    }
    return true;
  }

  static void check_prime(long p) {
    if (p < 2) throw InputError("p must be a prime");
    for (long d = 2; d * d <= p; ++d)
      if (p % d == 0) throw InputError("p must be a prime");
  }

 private:
  FieldSpec(long p, std::vector<long> m) : p_(p), modulus_(std::move(m)) {
    check_prime(p);
    a_ = static_cast<int>(modulus_.size()) - 1;
    if (a_ < 1 || modulus_[a_] != 1) throw InputError("modulus must be monic of degree >= 1");
    std::uint64_t q = 1;
    for (int i = 0; i < a_; ++i) q *= static_cast<std::uint64_t>(p);
    if (q > kMaxFieldSize) throw InputError("residue field too large");
    q_ = static_cast<std::uint32_t>(q);
    if (!is_irreducible(p, modulus_)) throw InputError("modulus is not irreducible");
    build_tables();
  }

  static bool poly_divides(long p, const std::vector<long>& g, std::vector<long> f) {
    int dg = static_cast<int>(g.size()) - 1;
    for (int i = static_cast<int>(f.size()) - 1; i >= dg; --i) {
      long c = ((f[i] % p) + p) % p;
      if (c == 0) continue;
      for (int j = 0; j <= dg; ++j) f[i - dg + j] = ((f[i - dg + j] - c * g[j]) % p + p) % p;
    }
    for (int i = 0; i < dg; ++i)
      if (f[i] % p != 0) return false;
    return true;
  }

  // Product in F_p[x]/(modulus) on coordinate codes; used only to build tables.
  std::uint32_t slow_mul(std::uint32_t x, std::uint32_t y) const {
    std::vector<long> a = coords(x), b = coords(y), c(2 * a_, 0);
    for (int i = 0; i < a_; ++i)
      for (int j = 0; j < a_; ++j) c[i + j] = (c[i + j] + a[i] * b[j]) % p_;
    for (int i = 2 * a_ - 1; i >= a_; --i) {
      long t = c[i];
      if (t == 0) continue;
      for (int j = 0; j <= a_; ++j) c[i - a_ + j] = ((c[i - a_ + j] - t * modulus_[j]) % p_ + p_) % p_;
    }
    c.resize(a_);
    return from_coords(c);
  }

  void build_tables() {
    exp_.assign(q_, 0);
    log_.assign(q_, 0);
    for (std::uint32_t cand = (q_ == 2 ? 1 : 2); cand < q_; ++cand) {
      std::uint32_t x = 1;
      std::uint32_t order = 0;
      bool ok = true;
      for (std::uint32_t i = 0; i + 1 < q_; ++i) {
        exp_[i] = x;
        x = slow_mul(x, cand);
        ++order;
        if (x == 1) break;
        if (x == 0) {
          ok = false;
          break;
        }
      }
      if (ok && order == q_ - 1) {
        for (std::uint32_t i = 0; i + 1 < q_; ++i) log_[exp_[i]] = i;
        return;
      }
    }
    throw InputError("no primitive element found; modulus not irreducible");
  }

  long p_;
  int a_ = 1;
  std::uint32_t q_ = 2;
  std::vector<long> modulus_;
  std::vector<std::uint32_t> exp_;
  std::vector<std::uint32_t> log_;
};

/// An element of a finite field. Cheap to copy.
class FqElem {
 public:
  FqElem() = default;
  FqElem(const FieldSpec* f, std::uint32_t code) : f_(f), code_(code) {}
  static FqElem from_int(const FieldSpec* f, long long v) { return {f, f->from_int(v)}; }
  static FqElem from_coords(const FieldSpec* f, const std::vector<long>& c) {
    return {f, f->from_coords(c)};
  }

  const FieldSpec* field() const { return f_; }
  std::uint32_t code() const { return code_; }
  long p() const { return f_->p(); }
  int a() const { return f_->degree(); }
  const std::vector<long>& modulus() const { return f_->modulus(); }
  std::vector<long> coords() const { return f_->coords(code_); }
  bool is_zero() const { return code_ == 0; }
  bool is_one() const { return code_ == 1; }

  FqElem operator+(const FqElem& o) const { return {f_, f_->add(code_, o.checked(f_))}; }
  FqElem operator-(const FqElem& o) const { return {f_, f_->sub(code_, o.checked(f_))}; }
  FqElem operator-() const { return {f_, f_->neg(code_)}; }
  FqElem operator*(const FqElem& o) const { return {f_, f_->mul(code_, o.checked(f_))}; }
  FqElem& operator+=(const FqElem& o) { return *this = *this + o; }
  FqElem& operator-=(const FqElem& o) { return *this = *this - o; }
  FqElem& operator*=(const FqElem& o) { return *this = *this * o; }
  FqElem inv() const { return {f_, f_->inv(code_)}; }
  FqElem pow(long long e) const { return {f_, f_->pow(code_, e)}; }
  FqElem frob() const { return {f_, f_->frob(code_)}; }
  FqElem frob_inv() const { return {f_, f_->frob_inv(code_)}; }
  friend bool operator==(const FqElem& x, const FqElem& y) {
    return x.f_ == y.f_ && x.code_ == y.code_;
  }
  friend bool operator!=(const FqElem& x, const FqElem& y) { return !(x == y); }

  std::string str() const {
    if (f_->degree() == 1) return std::to_string(code_);
    std::ostringstream os;
    auto c = coords();
    os << "(";
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
    os << ")";
    return os.str();
  }

 private:
  std::uint32_t checked(const FieldSpec* f) const {
    if (f != f_) throw FieldMismatch("F_q elements over different fields");
    return code_;
  }
  const FieldSpec* f_ = nullptr;
  std::uint32_t code_ = 0;
};

}  // namespace logdecay
