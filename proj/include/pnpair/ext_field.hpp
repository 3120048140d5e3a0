#pragma once

// The top field F_{q^m} = F_q[x]/(h) over a BaseField, with Frobenius,
// relative and absolute traces, the F_q[x]-module action, generators and
// discrete-log tables.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pnpair/base_field.hpp"
#include "pnpair/errors.hpp"
#include "pnpair/numtheory.hpp"
#include "pnpair/poly.hpp"

namespace pnpair {

/// Coordinates over F_q, c[i] the coefficient of x^i, length m.
struct FieldElement {
  std::vector<std::uint32_t> c;
  bool operator==(const FieldElement& o) const { return c == o.c; }
  bool operator!=(const FieldElement& o) const { return c != o.c; }
  bool operator<(const FieldElement& o) const { return c < o.c; }
};

using BasePoly = Poly<BaseField>;

class FieldContext {
 public:
  using Elem = FieldElement;

  struct Options {
    std::uint64_t seed = 1;
    bool find_generator = true;
    FactorEffort effort{};
    const FactorTables* tables = nullptr;
  };

  FieldContext(BaseFieldPtr base, unsigned m, const Options& opt) : base_(std::move(base)), m_(m), seed_(opt.seed) {
    if (m < 1) throw InputError("extension degree m must be >= 1");
    order_ = pow_ui(BigInt(base_->size()), m);
    find_modulus();
    build_frobenius();
    if (opt.find_generator) {
      qm1_ = factor_qm_minus_1(BigInt(base_->size()), m_, opt.tables, opt.effort);
      if (qm1_->complete()) find_generator();
    }
  }

  const BaseField& base() const { return *base_; }
  const BaseFieldPtr& base_ptr() const { return base_; }
  unsigned m() const { return m_; }
  std::uint32_t q() const { return base_->size(); }
  std::uint32_t characteristic() const { return base_->characteristic(); }
  unsigned prime_degree() const { return base_->degree() * m_; }
  const BigInt& order() const { return order_; }
  std::uint64_t seed() const { return seed_; }
  /// Monic coefficients h_0..h_m over F_q.
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }
  const std::optional<FieldElement>& generator() const { return generator_; }
  /// Factorization of q^m - 1 (present when a generator search was requested).
  const std::optional<IntFactorization>& order_factorization() const { return qm1_; }

  bool same_as(const FieldContext& o) const {
    return this == &o || (base_->same_as(*o.base_) && m_ == o.m_ && modulus_ == o.modulus_);
  }

  FieldElement zero() const { return {std::vector<std::uint32_t>(m_, 0)}; }
  FieldElement one() const {
    auto r = zero();
    r.c[0] = 1;
    return r;
  }
  /// The class of x, i.e. the root of the top modulus.
  FieldElement root() const {
    auto r = zero();
    if (m_ == 1) {
      r.c[0] = base_->neg(modulus_[0]);
    } else {
      r.c[1] = 1;
    }
    return r;
  }
  FieldElement embed(std::uint32_t a) const {
    auto r = zero();
    r.c[0] = a;
    return r;
  }
  FieldElement from_int(std::int64_t n) const { return embed(base_->from_int(n)); }

  bool is_zero(const FieldElement& a) const {
    for (auto v : a.c)
      if (v) return false;
    return true;
  }
  bool equal(const FieldElement& a, const FieldElement& b) const { return a.c == b.c; }
  bool in_base(const FieldElement& a) const {
    for (unsigned i = 1; i < m_; ++i)
      if (a.c[i]) return false;
    return true;
  }

  FieldElement add(const FieldElement& a, const FieldElement& b) const {
    FieldElement r{std::vector<std::uint32_t>(m_)};
    for (unsigned i = 0; i < m_; ++i) r.c[i] = base_->add(a.c[i], b.c[i]);
    return r;
  }
  FieldElement neg(const FieldElement& a) const {
    FieldElement r{std::vector<std::uint32_t>(m_)};
    for (unsigned i = 0; i < m_; ++i) r.c[i] = base_->neg(a.c[i]);
    return r;
  }
  FieldElement sub(const FieldElement& a, const FieldElement& b) const { return add(a, neg(b)); }
  FieldElement scale(const FieldElement& a, std::uint32_t s) const {
    FieldElement r{std::vector<std::uint32_t>(m_)};
    for (unsigned i = 0; i < m_; ++i) r.c[i] = base_->mul(a.c[i], s);
    return r;
  }

  FieldElement mul(const FieldElement& a, const FieldElement& b) const {
    const BaseField& F = *base_;
    if (F.degree() == 1) return mul_prime(a, b);
    std::vector<std::uint32_t> prod(2 * m_ - 1, 0);
    for (unsigned i = 0; i < m_; ++i) {
      if (!a.c[i]) continue;
      for (unsigned j = 0; j < m_; ++j) {
        if (b.c[j]) prod[i + j] = F.add(prod[i + j], F.mul(a.c[i], b.c[j]));
      }
    }
    for (unsigned i = 2 * m_ - 1; i-- > m_;) {
      const std::uint32_t t = prod[i];
      if (!t) continue;
      const std::uint32_t nt = F.neg(t);
      for (unsigned j = 0; j < m_; ++j) {
        if (modulus_[j]) prod[i - m_ + j] = F.add(prod[i - m_ + j], F.mul(nt, modulus_[j]));
      }
    }
    prod.resize(m_);
    return {std::move(prod)};
  }

  FieldElement pow(const FieldElement& a, const BigInt& e) const {
    if (e < 0) return pow(inv(a), BigInt(-e));
    FieldElement r = one();
    const std::size_t bits = e == 0 ? 0 : mpz_sizeinbase(e.get_mpz_t(), 2);
    for (std::size_t i = bits; i-- > 0;) {
      r = mul(r, r);
      if (mpz_tstbit(e.get_mpz_t(), i)) r = mul(r, a);
    }
    return r;
  }

  FieldElement inv(const FieldElement& a) const {
    if (is_zero(a)) throw DivisionByZero();
    return pow(a, order_ - 2);
  }
  FieldElement div(const FieldElement& a, const FieldElement& b) const { return mul(a, inv(b)); }

  /// x^(q^i); F_q-linear, applied through the precomputed matrix.
  FieldElement frobenius(const FieldElement& a, std::uint64_t i = 1) const {
    FieldElement r = a;
    for (std::uint64_t s = 0; s < i % m_; ++s) r = frob_once(r);
    return r;
  }

  /// Tr_{F_{q^m}/F_q}(a) = sum of the m conjugates.
  std::uint32_t trace_to_base(const FieldElement& a) const {
    FieldElement s = zero(), t = a;
    for (unsigned i = 0; i < m_; ++i) {
      s = add(s, t);
      t = frob_once(t);
    }
    if (!in_base(s)) throw IntegrityError("trace left the base field; modulus corrupted");
    return s.c[0];
  }

  /// Tr_{F_{q^m}/F_p}(a) in [0, p).
  std::uint32_t abs_trace(const FieldElement& a) const { return base_->abs_trace(trace_to_base(a)); }

  /// f o a = sum f_i a^(q^i) for f over F_q.
  FieldElement module_action(const BasePoly& f, const FieldElement& a) const {
    if (!f.field()->same_as(*base_)) throw InputError("module action by a polynomial over another field");
    FieldElement r = zero(), t = a;
    const auto& c = f.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i]) r = add(r, scale(t, c[i]));
      t = frob_once(t);
    }
    return r;
  }

  FieldElement random(std::mt19937_64& rng) const {
    FieldElement r{std::vector<std::uint32_t>(m_)};
    for (auto& v : r.c) v = base_->random(rng);
    return r;
  }

  /// Dense index sum c_i q^i; only meaningful when q^m < 2^64.
  std::uint64_t index(const FieldElement& a) const {
    std::uint64_t r = 0;
    for (unsigned i = m_; i-- > 0;) r = r * base_->size() + a.c[i];
    return r;
  }
  FieldElement from_index(std::uint64_t idx) const {
    FieldElement r{std::vector<std::uint32_t>(m_)};
    for (unsigned i = 0; i < m_; ++i) {
      r.c[i] = static_cast<std::uint32_t>(idx % base_->size());
      idx /= base_->size();
    }
    return r;
  }

  /// True iff a^((q^m-1)/l) != 1 for every prime l | q^m - 1.
  bool is_primitive_generic(const FieldElement& a) const {
    if (is_zero(a)) return false;
    if (!qm1_ || !qm1_->complete()) throw IncompleteFactorization("q^m - 1 for primitivity test");
    const BigInt n = order_ - 1;
    for (const auto& pp : qm1_->factors) {
      if (pow(a, n / pp.prime) == one()) return false;
    }
    return true;
  }

  /// Prime-field constants as integers, otherwise "[a_{m-1},...,a_0]" with
  /// coordinates in the base-field format.
  std::string format(const FieldElement& a) const {
    bool in_base = true;
    for (unsigned i = 1; i < m_; ++i) in_base = in_base && a.c[i] == 0;
    if (in_base && a.c[0] < base_->characteristic()) return std::to_string(a.c[0]);
    std::string s = "[";
    for (unsigned i = m_; i-- > 0;) {
      s += base_->format(a.c[i]);
      if (i) s += ",";
    }
    return s + "]";
  }

  /// Integer (prime-field constant) or the bracketed format.
  FieldElement parse(const std::string& text) const {
    std::string t;
    for (char ch : text)
      if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
    if (t.empty()) throw InputError("empty field element");
    if (t.front() != '[') return embed(base_->parse(t));
    if (t.back() != ']') throw InputError("unterminated field element '" + text + "'");
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
      const char ch = t[i];
      if (ch == '[') ++depth;
      if (ch == ']') --depth;
      if (ch == ',' && depth == 0) {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    parts.push_back(cur);
    if (parts.size() != m_) {
      throw InputError("field element '" + text + "' needs " + std::to_string(m_) + " coordinates");
    }
    FieldElement r{std::vector<std::uint32_t>(m_)};
    for (unsigned i = 0; i < m_; ++i) r.c[i] = base_->parse(parts[m_ - 1 - i]);
    return r;
  }

  nlohmann::json to_json() const {
    std::vector<std::string> top;
    for (unsigned i = m_ + 1; i-- > 0;) top.push_back(base_->format(modulus_[i]));
    nlohmann::json j = {{"p", base_->characteristic()},
                        {"k", base_->degree()},
                        {"m", m_},
                        {"base_modulus", std::vector<std::uint32_t>(base_->modulus().rbegin(), base_->modulus().rend())},
                        {"top_modulus", top},
                        {"seed", seed_}};
    if (generator_) j["generator"] = format(*generator_);
    return j;
  }

 private:
  FieldElement mul_prime(const FieldElement& a, const FieldElement& b) const {
    const std::uint64_t p = base_->characteristic();
    std::vector<std::uint64_t> prod(2 * m_ - 1, 0);
    for (unsigned i = 0; i < m_; ++i) {
      if (!a.c[i]) continue;
      for (unsigned j = 0; j < m_; ++j) prod[i + j] += static_cast<std::uint64_t>(a.c[i]) * b.c[j];
      if ((i & 15) == 15)
        for (auto& v : prod) v %= p;
    }
    for (auto& v : prod) v %= p;
    for (unsigned i = 2 * m_ - 1; i-- > m_;) {
      const std::uint64_t t = prod[i] % p;
      if (!t) continue;
      const std::uint64_t nt = p - t;
      for (unsigned j = 0; j < m_; ++j) prod[i - m_ + j] = (prod[i - m_ + j] + nt * modulus_[j]) % p;
    }
    FieldElement r{std::vector<std::uint32_t>(m_)};
    for (unsigned i = 0; i < m_; ++i) r.c[i] = static_cast<std::uint32_t>(prod[i] % p);
    return r;
  }

  FieldElement frob_once(const FieldElement& a) const {
    FieldElement r = zero();
    for (unsigned j = 0; j < m_; ++j) {
      if (!a.c[j]) continue;
      for (unsigned i = 0; i < m_; ++i) {
        if (frob_[j].c[i]) r.c[i] = base_->add(r.c[i], base_->mul(a.c[j], frob_[j].c[i]));
      }
    }
    return r;
  }

  void find_modulus() {
    auto bf = base_;
    std::mt19937_64 rng(seed_ * 0x2545F4914F6CDD1DULL + m_);
    for (;;) {
      std::vector<std::uint32_t> c(m_ + 1);
      for (unsigned i = 0; i < m_; ++i) c[i] = bf->random(rng);
      c[m_] = 1;
      if (m_ > 1 && c[0] == 0) continue;
      if (BasePoly(bf, c).is_irreducible()) {
        modulus_ = std::move(c);
        return;
      }
    }
  }

  void build_frobenius() {
    // frob_[j] = (x^j)^q = (x^q)^j
    const FieldElement xq = pow(root(), BigInt(base_->size()));
    frob_.clear();
    FieldElement t = one();
    for (unsigned j = 0; j < m_; ++j) {
      frob_.push_back(t);
      t = mul(t, xq);
    }
  }

  void find_generator() {
    std::mt19937_64 rng(seed_ ^ 0xD1B54A32D192ED03ULL);
    for (;;) {
      FieldElement g = random(rng);
      if (is_primitive_generic(g)) {
        generator_ = std::move(g);
        return;
      }
    }
  }

  BaseFieldPtr base_;
  unsigned m_;
  std::uint64_t seed_;
  BigInt order_;
  std::vector<std::uint32_t> modulus_;
  std::vector<FieldElement> frob_;
  std::optional<FieldElement> generator_;
  std::optional<IntFactorization> qm1_;
};

using FieldPtr = std::shared_ptr<const FieldContext>;
using ExtPoly = Poly<FieldContext>;

inline FieldPtr make_context(std::uint32_t p, unsigned k, unsigned m, std::uint64_t seed = 1,
                             const FieldContext::Options* opt = nullptr) {
  FieldContext::Options o = opt ? *opt : FieldContext::Options{};
  o.seed = seed;
  return std::make_shared<const FieldContext>(make_base_field(p, k, seed), m, o);
}

inline FieldPtr make_context(BaseFieldPtr base, unsigned m, std::uint64_t seed = 1, bool find_generator = true) {
  FieldContext::Options o;
  o.seed = seed;
  o.find_generator = find_generator;
  return std::make_shared<const FieldContext>(std::move(base), m, o);
}

inline constexpr std::uint64_t kDlogLimit = std::uint64_t{1} << 24;

/// Full discrete-log table for q^m <= limit, keyed by the dense index.
class DlogTable {
 public:
  explicit DlogTable(FieldPtr ctx, std::uint64_t limit = kDlogLimit) : ctx_(std::move(ctx)) {
    if (ctx_->order() > from_u64(limit)) {
      throw ResourceError("field of size " + to_string(ctx_->order()) + " exceeds the dlog limit " +
                          std::to_string(limit));
    }
    if (!ctx_->generator()) throw IncompleteFactorization("no certified generator for dlog table");
    size_ = to_u64(ctx_->order());
    log_.assign(size_, kNone);
    exp_.resize(size_ - 1);
    FieldElement x = ctx_->one();
    const FieldElement& g = *ctx_->generator();
    for (std::uint64_t i = 0; i + 1 < size_; ++i) {
      const std::uint64_t idx = ctx_->index(x);
      if (log_[idx] != kNone) throw IntegrityError("generator order below q^m - 1");
      log_[idx] = static_cast<std::uint32_t>(i);
      exp_[i] = static_cast<std::uint32_t>(idx);
      x = ctx_->mul(x, g);
    }
    if (x != ctx_->one()) throw IntegrityError("generator does not have order q^m - 1");
  }

  static constexpr std::uint32_t kNone = 0xFFFFFFFFu;

  const FieldContext& ctx() const { return *ctx_; }
  const FieldPtr& ctx_ptr() const { return ctx_; }
  std::uint64_t field_size() const { return size_; }
  std::size_t entries() const { return exp_.size(); }

  std::uint32_t log(const FieldElement& x) const {
    const std::uint32_t l = log_[ctx_->index(x)];
    if (l == kNone) throw InputError("log of zero");
    return l;
  }
  std::uint32_t log_index(std::uint64_t idx) const { return log_[idx]; }
  std::uint32_t exp_index(std::uint64_t e) const { return exp_[e % exp_.size()]; }
  FieldElement exp(std::uint64_t e) const { return ctx_->from_index(exp_index(e)); }

 private:
  FieldPtr ctx_;
  std::uint64_t size_ = 0;
  std::vector<std::uint32_t> log_;
  std::vector<std::uint32_t> exp_;
};

}  // namespace pnpair
