#pragma once

// Dense univariate polynomials over a finite field type F (BaseField for
// F_q, FieldContext for F_{q^m}). Polynomials carry a pointer to their field;
// mixing two different fields of the same type is rejected at runtime, mixing
// levels does not compile.

#include <algorithm>
#include <cctype>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pnpair/errors.hpp"
#include "pnpair/numtheory.hpp"

namespace pnpair {

template <class F>
class Poly {
 public:
  using Field = F;
  using Elem = typename F::Elem;
  using FieldPtr = std::shared_ptr<const F>;

  Poly() = default;
  explicit Poly(FieldPtr field) : field_(std::move(field)) {}
  Poly(FieldPtr field, std::vector<Elem> coeffs) : field_(std::move(field)), c_(std::move(coeffs)) { trim(); }

  static Poly constant(FieldPtr field, const Elem& a) { return Poly(std::move(field), std::vector<Elem>{a}); }
  static Poly monomial(FieldPtr field, const Elem& a, std::size_t deg) {
    std::vector<Elem> c(deg + 1, field->zero());
    c[deg] = a;
    return Poly(std::move(field), std::move(c));
  }
  static Poly x(FieldPtr field) { return monomial(field, field->one(), 1); }
  static Poly one(FieldPtr field) { return constant(field, field->one()); }
  /// x^n - 1
  static Poly x_pow_minus_one(FieldPtr field, std::size_t n) {
    std::vector<Elem> c(n + 1, field->zero());
    c[n] = field->one();
    c[0] = field->add(c[0], field->neg(field->one()));
    return Poly(std::move(field), std::move(c));
  }
  /// Integer coefficients, lowest degree first, read mod p.
  static Poly from_ints(FieldPtr field, const std::vector<std::int64_t>& ints) {
    std::vector<Elem> c;
    c.reserve(ints.size());
    for (auto v : ints) c.push_back(field->from_int(v));
    return Poly(std::move(field), std::move(c));
  }

  const FieldPtr& field() const { return field_; }
  const F& f() const { return *field_; }
  const std::vector<Elem>& coeffs() const { return c_; }

  bool is_zero() const { return c_.empty(); }
  long degree() const { return static_cast<long>(c_.size()) - 1; }
  Elem lead() const { return c_.empty() ? f().zero() : c_.back(); }
  bool is_monic() const { return !c_.empty() && f().equal(c_.back(), f().one()); }
  bool is_constant() const { return c_.size() <= 1; }
  Elem coeff(std::size_t i) const { return i < c_.size() ? c_[i] : f().zero(); }

  bool operator==(const Poly& o) const {
    check_same(o);
    if (c_.size() != o.c_.size()) return false;
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (!f().equal(c_[i], o.c_[i])) return false;
    return true;
  }
  bool operator!=(const Poly& o) const { return !(*this == o); }

  Poly operator+(const Poly& o) const {
    check_same(o);
    std::vector<Elem> r(std::max(c_.size(), o.c_.size()), f().zero());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = f().add(coeff(i), o.coeff(i));
    return Poly(field_, std::move(r));
  }

  Poly operator-() const {
    std::vector<Elem> r;
    r.reserve(c_.size());
    for (const auto& a : c_) r.push_back(f().neg(a));
    return Poly(field_, std::move(r));
  }

  Poly operator-(const Poly& o) const { return *this + (-o); }

  Poly operator*(const Poly& o) const {
    check_same(o);
    if (is_zero() || o.is_zero()) return Poly(field_);
    std::vector<Elem> r(c_.size() + o.c_.size() - 1, f().zero());
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (f().is_zero(c_[i])) continue;
      for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] = f().add(r[i + j], f().mul(c_[i], o.c_[j]));
    }
    return Poly(field_, std::move(r));
  }

  Poly scale(const Elem& a) const {
    std::vector<Elem> r;
    r.reserve(c_.size());
    for (const auto& v : c_) r.push_back(f().mul(v, a));
    return Poly(field_, std::move(r));
  }

  Poly monic() const {
    if (is_zero()) return *this;
    return scale(f().inv(lead()));
  }

  /// Euclidean division; throws DivisionByZero for a zero divisor.
  std::pair<Poly, Poly> divmod(const Poly& d) const {
    check_same(d);
    if (d.is_zero()) throw DivisionByZero();
    if (degree() < d.degree()) return {Poly(field_), *this};
    std::vector<Elem> rem = c_;
    std::vector<Elem> quo(c_.size() - d.c_.size() + 1, f().zero());
    const Elem inv_lead = f().inv(d.lead());
    const std::size_t dn = d.c_.size() - 1;
    for (std::size_t i = rem.size(); i-- > dn;) {
      if (f().is_zero(rem[i])) continue;
      const Elem t = f().mul(rem[i], inv_lead);
      quo[i - dn] = t;
      const Elem nt = f().neg(t);
      for (std::size_t j = 0; j <= dn; ++j) rem[i - dn + j] = f().add(rem[i - dn + j], f().mul(nt, d.c_[j]));
    }
    rem.resize(dn);
    return {Poly(field_, std::move(quo)), Poly(field_, std::move(rem))};
  }

  Poly operator/(const Poly& d) const { return divmod(d).first; }
  Poly operator%(const Poly& d) const { return divmod(d).second; }

  Poly derivative() const {
    if (c_.size() <= 1) return Poly(field_);
    std::vector<Elem> r(c_.size() - 1, f().zero());
    for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = f().mul(c_[i], f().from_int(static_cast<std::int64_t>(i % f().characteristic())));
    return Poly(field_, std::move(r));
  }

  Elem evaluate(const Elem& a) const {
    Elem r = f().zero();
    for (std::size_t i = c_.size(); i-- > 0;) r = f().add(f().mul(r, a), c_[i]);
    return r;
  }

  /// this^e mod m.
  Poly powmod(const BigInt& e, const Poly& m) const {
    if (e < 0) throw InputError("negative polynomial exponent");
    Poly base = *this % m;
    Poly r = one(field_) % m;
    const std::size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
    for (std::size_t i = bits; i-- > 0;) {
      r = (r * r) % m;
      if (mpz_tstbit(e.get_mpz_t(), i)) r = (r * base) % m;
    }
    return r;
  }

  /// Composition this(g(x)).
  Poly compose(const Poly& g) const {
    Poly r(field_);
    for (std::size_t i = c_.size(); i-- > 0;) r = r * g + constant(field_, c_[i]);
    return r;
  }

  std::string to_string() const {
    if (is_zero()) return "0";
    std::string s;
    for (std::size_t i = c_.size(); i-- > 0;) {
      if (f().is_zero(c_[i])) continue;
      if (!s.empty()) s += " + ";
      const bool unit = f().equal(c_[i], f().one());
      if (i == 0) {
        s += f().format(c_[i]);
      } else {
        if (!unit) s += f().format(c_[i]) + "*";
        s += i == 1 ? "x" : "x^" + std::to_string(i);
      }
    }
    return s;
  }

  /// Parses "c_d*x^d + ... + c_0"; coefficients are integers or whatever
  /// F::parse accepts inside brackets. '-' and implicit unit coefficients are
  /// allowed.
  static Poly parse(FieldPtr field, const std::string& text) {
    std::string t;
    for (char ch : text)
      if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
    if (t.empty()) throw InputError("empty polynomial");
    Poly acc(field);
    std::size_t i = 0;
    while (i < t.size()) {
      bool negative = false;
      while (i < t.size() && (t[i] == '+' || t[i] == '-')) {
        if (t[i] == '-') negative = !negative;
        ++i;
      }
      std::size_t j = i;
      int depth = 0;
      while (j < t.size()) {
        const char ch = t[j];
        if (ch == '[') ++depth;
        if (ch == ']') --depth;
        if (depth < 0) throw InputError("unbalanced brackets in '" + text + "'");
        if (depth == 0 && (ch == '+' || ch == '-') && j > i && t[j - 1] != '^') break;
        ++j;
      }
      if (depth != 0) throw InputError("unbalanced brackets in '" + text + "'");
      const std::string term = t.substr(i, j - i);
      if (term.empty()) throw InputError("empty term in '" + text + "'");
      acc = acc + parse_term(field, term, negative, text);
      i = j;
    }
    return acc;
  }

  /// Monic gcd (zero if both inputs are zero).
  friend Poly gcd(Poly a, Poly b) {
    a.check_same(b);
    while (!b.is_zero()) {
      Poly r = a % b;
      a = std::move(b);
      b = std::move(r);
    }
    return a.monic();
  }

  /// x^(|F|^i) mod f for i = 0..n, by repeated |F|-th powering.
  static std::vector<Poly> frobenius_powers(const Poly& f, std::size_t n) {
    const BigInt qf = f.f().order();
    std::vector<Poly> out;
    out.reserve(n + 1);
    out.push_back(x(f.field_) % f);
    for (std::size_t i = 1; i <= n; ++i) out.push_back(out.back().powmod(qf, f));
    return out;
  }

  /// Rabin's test.
  bool is_irreducible() const {
    if (is_zero()) return false;
    const long n = degree();
    if (n < 1) return false;
    if (n == 1) return true;
    const Poly fm = monic();
    const auto fr = frobenius_powers(fm, static_cast<std::size_t>(n));
    const Poly X = x(field_);
    if ((fr[n] - X) % fm != Poly(field_)) return false;
    for (std::uint64_t r : prime_divisors(static_cast<std::uint64_t>(n))) {
      const Poly g = gcd(fr[n / r] - X, fm);
      if (g.degree() != 0) return false;
    }
    return true;
  }

  /// Full factorization into monic irreducibles with multiplicities, sorted
  /// by (degree, coefficients). Deterministic for a fixed seed.
  std::vector<std::pair<Poly, unsigned>> factor(std::uint64_t seed = 1) const {
    if (is_zero()) throw InputError("cannot factor the zero polynomial");
    std::vector<std::pair<Poly, unsigned>> out;
    std::mt19937_64 rng(seed);
    for (auto& [sf, mult] : squarefree_decomposition(monic())) {
      for (auto& [g, d] : distinct_degree(sf)) {
        std::vector<Poly> pieces;
        equal_degree(g, d, rng, pieces);
        for (auto& pc : pieces) out.emplace_back(std::move(pc), mult);
      }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      if (a.first.degree() != b.first.degree()) return a.first.degree() < b.first.degree();
      return a.first.key() < b.first.key();
    });
    // merge equal factors that may come from different squarefree layers
    std::vector<std::pair<Poly, unsigned>> merged;
    for (auto& fe : out) {
      if (!merged.empty() && merged.back().first == fe.first) {
        merged.back().second += fe.second;
      } else {
        merged.push_back(std::move(fe));
      }
    }
    return merged;
  }

  /// Sort key built from formatted coefficients (highest degree first).
  std::string key() const {
    std::string s;
    for (std::size_t i = c_.size(); i-- > 0;) s += f().format(c_[i]) + ";";
    return s;
  }

 private:
  void trim() {
    while (!c_.empty() && f().is_zero(c_.back())) c_.pop_back();
  }

  void check_same(const Poly& o) const {
    if (!field_ || !o.field_) throw InputError("polynomial without a field");
    if (field_ != o.field_ && !field_->same_as(*o.field_)) throw InputError("polynomials over different fields");
  }

  static std::vector<std::uint64_t> prime_divisors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
      if (n % p) continue;
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
    if (n > 1) out.push_back(n);
    return out;
  }

  static Poly parse_term(const FieldPtr& field, const std::string& term, bool negative, const std::string& text) {
    Elem c = field->one();
    std::size_t xpos = std::string::npos;
    int depth = 0;
    for (std::size_t i = 0; i < term.size(); ++i) {
      if (term[i] == '[') ++depth;
      if (term[i] == ']') --depth;
      if (depth == 0 && term[i] == 'x') {
        xpos = i;
        break;
      }
    }
    std::size_t exp = 0;
    std::string coef = term;
    if (xpos != std::string::npos) {
      coef = term.substr(0, xpos);
      if (!coef.empty() && coef.back() == '*') coef.pop_back();
      const std::string rest = term.substr(xpos + 1);
      if (rest.empty()) {
        exp = 1;
      } else if (rest[0] == '^' && rest.size() > 1 &&
                 std::all_of(rest.begin() + 1, rest.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
        exp = std::stoul(rest.substr(1));
      } else {
        throw InputError("bad monomial '" + term + "' in '" + text + "'");
      }
      if (!coef.empty()) c = field->parse(coef);
    } else {
      c = field->parse(coef);
    }
    if (negative) c = field->neg(c);
    return monomial(field, c, exp);
  }

  /// Squarefree decomposition of a monic polynomial: list of (squarefree
  /// part, multiplicity). Handles p-th powers by taking p-th roots.
  static std::vector<std::pair<Poly, unsigned>> squarefree_decomposition(const Poly& f) {
    std::vector<std::pair<Poly, unsigned>> out;
    if (f.degree() < 1) return out;
    const FieldPtr& fld = f.field_;
    const std::uint32_t p = fld->characteristic();
    Poly fp = f.derivative();
    if (fp.is_zero()) {
      for (auto& [g, e] : squarefree_decomposition(pth_root(f))) out.emplace_back(std::move(g), e * p);
      return out;
    }
    Poly c = gcd(f, fp);
    Poly w = f / c;
    unsigned i = 1;
    while (w.degree() > 0) {
      Poly y = gcd(w, c);
      Poly z = w / y;
      if (z.degree() > 0) out.emplace_back(z.monic(), i);
      ++i;
      w = std::move(y);
      c = c / w;
    }
    if (c.degree() > 0) {
      for (auto& [g, e] : squarefree_decomposition(pth_root(c.monic()))) out.emplace_back(std::move(g), e * p);
    }
    return out;
  }

  /// For f(x) = g(x^p), returns g with coefficients replaced by p-th roots.
  static Poly pth_root(const Poly& f) {
    const std::uint32_t p = f.f().characteristic();
    // a^(1/p) = a^(|F|/p)
    const BigInt e = f.f().order() / p;
    std::vector<Elem> c;
    for (std::size_t i = 0; i < f.c_.size(); i += p) c.push_back(f.f().pow(f.c_[i], e));
    return Poly(f.field_, std::move(c));
  }

  static std::vector<std::pair<Poly, std::size_t>> distinct_degree(const Poly& f) {
    std::vector<std::pair<Poly, std::size_t>> out;
    Poly rest = f;
    const BigInt qf = f.f().order();
    const Poly X = x(f.field_);
    Poly h = X % rest;
    for (std::size_t d = 1; rest.degree() >= 2 * static_cast<long>(d); ++d) {
      h = h.powmod(qf, rest);
      Poly g = gcd(h - X, rest);
      if (g.degree() > 0) {
        out.emplace_back(g, d);
        rest = rest / g;
        h = h % rest;
      }
    }
    if (rest.degree() > 0) out.emplace_back(rest.monic(), static_cast<std::size_t>(rest.degree()));
    return out;
  }

  static Poly random_poly(const FieldPtr& fld, long deg_below, std::mt19937_64& rng) {
    std::vector<Elem> c;
    for (long i = 0; i < deg_below; ++i) c.push_back(fld->random(rng));
    return Poly(fld, std::move(c));
  }

  /// Cantor-Zassenhaus splitting of a product of distinct degree-d monic
  /// irreducibles.
  static void equal_degree(const Poly& f, std::size_t d, std::mt19937_64& rng, std::vector<Poly>& out) {
    if (f.degree() <= static_cast<long>(d)) {
      out.push_back(f.monic());
      return;
    }
    const FieldPtr& fld = f.field_;
    const std::uint32_t p = fld->characteristic();
    const BigInt qd = pow_ui(fld->order(), d);
    for (;;) {
      const Poly a = random_poly(fld, f.degree(), rng);
      if (a.degree() < 1) continue;
      Poly b;
      if (p == 2) {
        // trace map a + a^2 + ... + a^(2^(K-1)), K = d * log2|F|
        const std::size_t K = d * fld->prime_degree();
        Poly t = a % f;
        Poly s = t;
        for (std::size_t i = 1; i < K; ++i) {
          t = (t * t) % f;
          s = s + t;
        }
        b = s;
      } else {
        b = a.powmod((qd - 1) / 2, f) - one(fld);
      }
      Poly g = gcd(b, f);
      if (g.degree() > 0 && g.degree() < f.degree()) {
        equal_degree(g, d, rng, out);
        equal_degree(f / g, d, rng, out);
        return;
      }
    }
  }

  FieldPtr field_;
  std::vector<Elem> c_;  // lowest degree first, no trailing zeros
};

}  // namespace pnpair
