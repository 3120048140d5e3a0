#pragma once

// The base field F_q = F_p[y]/(f) with q = p^k. Elements are dense indices
// a = sum c_i p^i (c_i the coefficient of y^i). Multiplication goes through
// log/exp tables; the modulus is a primitive polynomial so y generates F_q*.

#include <cctype>
#include <cstdint>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pnpair/errors.hpp"
#include "pnpair/numtheory.hpp"

namespace pnpair {

inline constexpr std::uint64_t kMaxBaseFieldSize = std::uint64_t{1} << 22;

class BaseField {
 public:
  using Elem = std::uint32_t;

  /// F_{p^k}. The modulus is the first primitive polynomial hit by a seeded
  /// random search (k > 1); for k = 1 the generator is the least primitive
  /// root mod p.
  BaseField(std::uint32_t p, unsigned k, std::uint64_t seed = 1) : p_(p), k_(k) {
    if (p < 2 || !is_prime_u64(p)) throw InputError("characteristic " + std::to_string(p) + " is not prime");
    if (k < 1) throw InputError("extension degree k must be >= 1");
    std::uint64_t q = 1;
    for (unsigned i = 0; i < k; ++i) {
      q *= p;
      if (q > kMaxBaseFieldSize) throw ResourceError("base field p^k exceeds 2^22");
    }
    q_ = static_cast<std::uint32_t>(q);
    pow_p_.resize(k + 1, 1);
    for (unsigned i = 1; i <= k; ++i) pow_p_[i] = pow_p_[i - 1] * p;
    if (k == 1) {
      modulus_ = {0, 1};
      for (std::uint32_t g = 1; g < p; ++g) {
        if (build_tables_from(g)) break;
      }
    } else {
      std::mt19937_64 rng(seed);
      std::vector<std::uint32_t> f(k + 1);
      f[k] = 1;
      for (;;) {
        for (unsigned i = 0; i < k; ++i) f[i] = static_cast<std::uint32_t>(rng() % p);
        if (f[0] == 0) continue;
        modulus_ = f;
        if (build_tables_from(p)) break;  // index p encodes y
      }
    }
    if (q_ <= 1024 && p_ != 2 && k_ > 1) {
      add_table_.resize(static_cast<std::size_t>(q_) * q_);
      for (Elem a = 0; a < q_; ++a)
        for (Elem b = 0; b < q_; ++b) add_table_[static_cast<std::size_t>(a) * q_ + b] = add_digits(a, b);
    }
    trace_.resize(q_);
    for (Elem a = 0; a < q_; ++a) {
      Elem s = 0, x = a;
      for (unsigned i = 0; i < k_; ++i) {
        s = add(s, x);
        x = pow_u(x, p_);
      }
      if (s >= p_) throw IntegrityError("absolute trace left the prime field");
      trace_[a] = s;
    }
  }

  std::uint32_t characteristic() const { return p_; }
  unsigned degree() const { return k_; }
  unsigned prime_degree() const { return k_; }
  std::uint32_t size() const { return q_; }
  BigInt order() const { return BigInt(q_); }
  /// Coefficients f_0..f_k of the defining polynomial over F_p.
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }
  Elem generator() const { return exp_[1]; }

  bool same_as(const BaseField& o) const { return this == &o || (p_ == o.p_ && k_ == o.k_ && modulus_ == o.modulus_); }

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  bool is_zero(Elem a) const { return a == 0; }
  bool equal(Elem a, Elem b) const { return a == b; }

  Elem from_int(std::int64_t n) const {
    std::int64_t r = n % static_cast<std::int64_t>(p_);
    if (r < 0) r += p_;
    return static_cast<Elem>(r);
  }

  Elem add(Elem a, Elem b) const {
    if (k_ == 1) {
      const Elem s = a + b;
      return s >= p_ ? s - p_ : s;
    }
    if (p_ == 2) return a ^ b;
    if (!add_table_.empty()) return add_table_[static_cast<std::size_t>(a) * q_ + b];
    return add_digits(a, b);
  }

  Elem neg(Elem a) const {
    if (k_ == 1) return a == 0 ? 0 : p_ - a;
    if (p_ == 2) return a;
    Elem r = 0;
    for (unsigned i = 0; i < k_; ++i) {
      const Elem d = (a / pow_p_[i]) % p_;
      r += (d == 0 ? 0 : p_ - d) * pow_p_[i];
    }
    return r;
  }

  Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }

  Elem mul(Elem a, Elem b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }

  Elem inv(Elem a) const {
    if (a == 0) throw DivisionByZero();
    return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
  }

  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }

  Elem pow_u(Elem a, std::uint64_t e) const {
    if (e == 0) return 1;
    if (a == 0) return 0;
    return exp_[static_cast<std::uint32_t>((static_cast<unsigned __int128>(log_[a]) * e) % (q_ - 1))];
  }

  Elem pow(Elem a, const BigInt& e) const {
    if (e < 0) return pow(inv(a), BigInt(-e));
    if (e == 0) return 1;
    if (a == 0) return 0;
    const BigInt r = e % (q_ - 1);
    return pow_u(a, r.get_ui());
  }

  /// Discrete log base generator(); a must be nonzero.
  std::uint32_t log(Elem a) const {
    if (a == 0) throw InputError("log of zero");
    return log_[a];
  }
  Elem exp(std::uint64_t e) const { return exp_[e % (q_ - 1)]; }

  /// Tr_{F_q/F_p}(a) as an integer in [0, p).
  std::uint32_t abs_trace(Elem a) const { return trace_[a]; }

  std::uint32_t digit(Elem a, unsigned i) const { return (a / pow_p_[i]) % p_; }

  Elem random(std::mt19937_64& rng) const { return static_cast<Elem>(rng() % q_); }

  /// "c" for prime fields, "[c_{k-1},...,c_0]" otherwise.
  std::string format(Elem a) const {
    if (k_ == 1) return std::to_string(a);
    std::string s = "[";
    for (unsigned i = k_; i-- > 0;) {
      s += std::to_string(digit(a, i));
      if (i) s += ",";
    }
    return s + "]";
  }

  /// Accepts an integer (read mod p) or a bracketed coordinate list.
  Elem parse(const std::string& text) const {
    std::string t;
    for (char ch : text)
      if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
    if (t.empty()) throw InputError("empty base-field element");
    if (t.front() != '[') return from_int(parse_int(t));
    if (t.back() != ']') throw InputError("unterminated base-field element '" + text + "'");
    std::vector<std::int64_t> ds;
    std::stringstream ss(t.substr(1, t.size() - 2));
    std::string tok;
    while (std::getline(ss, tok, ',')) ds.push_back(parse_int(tok));
    if (ds.size() != k_) {
      throw InputError("base-field element '" + text + "' needs " + std::to_string(k_) + " coordinates");
    }
    Elem r = 0;
    for (unsigned i = 0; i < k_; ++i) r += from_int(ds[k_ - 1 - i]) * pow_p_[i];
    return r;
  }

  nlohmann::json to_json() const {
    return {{"p", p_}, {"k", k_}, {"modulus", modulus_}};
  }

 private:
  static std::int64_t parse_int(const std::string& s) {
    std::size_t pos = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(s, &pos);
    } catch (const std::exception&) {
      throw InputError("bad integer '" + s + "'");
    }
    if (pos != s.size()) throw InputError("bad integer '" + s + "'");
    return v;
  }

  Elem add_digits(Elem a, Elem b) const {
    Elem r = 0;
    for (unsigned i = 0; i < k_; ++i) {
      Elem d = (a / pow_p_[i]) % p_ + (b / pow_p_[i]) % p_;
      if (d >= p_) d -= p_;
      r += d * pow_p_[i];
    }
    return r;
  }

  /// Multiplies by y (k > 1) or by g (k = 1) modulo the modulus.
  Elem times_gen(Elem a, Elem g) const {
    if (k_ == 1) return static_cast<Elem>(static_cast<std::uint64_t>(a) * g % p_);
    // shift coordinates up, reduce the y^k term with the monic modulus
    std::vector<std::uint32_t> c(k_ + 1, 0);
    for (unsigned i = 0; i < k_; ++i) c[i + 1] = (a / pow_p_[i]) % p_;
    const std::uint32_t top = c[k_];
    Elem r = 0;
    for (unsigned i = 0; i < k_; ++i) {
      std::uint64_t v = c[i] + static_cast<std::uint64_t>(p_ - modulus_[i]) * top;
      r += static_cast<Elem>(v % p_) * pow_p_[i];
    }
    return r;
  }

  /// Fills exp/log from successive powers of g; false if g is not primitive.
  bool build_tables_from(Elem g) {
    const std::uint32_t n = q_ - 1;
    exp_.assign(2 * static_cast<std::size_t>(n), 0);
    log_.assign(q_, 0);
    std::vector<bool> seen(q_, false);
    Elem x = 1;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (seen[x] || x == 0) return false;
      seen[x] = true;
      exp_[i] = x;
      exp_[i + n] = x;
      log_[x] = i;
      x = times_gen(x, g);
    }
    return x == 1;
  }

  std::uint32_t p_;
  unsigned k_;
  std::uint32_t q_ = 0;
  std::vector<std::uint32_t> pow_p_;
  std::vector<std::uint32_t> modulus_;
  std::vector<Elem> exp_;
  std::vector<std::uint32_t> log_;
  std::vector<Elem> add_table_;
  std::vector<std::uint32_t> trace_;
};

using BaseFieldPtr = std::shared_ptr<const BaseField>;

inline BaseFieldPtr make_base_field(std::uint32_t p, unsigned k, std::uint64_t seed = 1) {
  return std::make_shared<const BaseField>(p, k, seed);
}

}  // namespace pnpair
