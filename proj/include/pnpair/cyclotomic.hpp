#pragma once

// Factorization of x^m - 1 over F_q through q-cyclotomic cosets, and the
// polynomial analogues Phi, Theta, W, w and mu' of a divisor of x^m - 1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "pnpair/base_field.hpp"
#include "pnpair/ext_field.hpp"
#include "pnpair/numtheory.hpp"
#include "pnpair/poly.hpp"

namespace pnpair {

/// m = m' * p^j with gcd(m', p) = 1.
struct MSplit {
  std::uint64_t m_prime = 1;
  unsigned j = 0;
};

inline MSplit split_m(std::uint64_t m, std::uint64_t p) {
  if (m == 0) throw InputError("m must be positive");
  MSplit s{m, 0};
  while (s.m_prime % p == 0) {
    s.m_prime /= p;
    ++s.j;
  }
  return s;
}

/// Cosets {i, iq, iq^2, ...} of Z/m'Z, ordered by least representative.
inline std::vector<std::vector<std::uint64_t>> cyclotomic_cosets(const BigInt& q, std::uint64_t m_prime) {
  if (m_prime == 0) throw InputError("cyclotomic_cosets: modulus must be positive");
  std::vector<std::vector<std::uint64_t>> out;
  const std::uint64_t qm = to_u64(BigInt(q % from_u64(m_prime)));
  if (m_prime > 1) {
    BigInt g;
    const BigInt mb = from_u64(m_prime);
    mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), mb.get_mpz_t());
    if (g != 1) throw InputError("cyclotomic_cosets: q and m' must be coprime");
  }
  std::vector<bool> seen(m_prime, false);
  for (std::uint64_t i = 0; i < m_prime; ++i) {
    if (seen[i]) continue;
    std::vector<std::uint64_t> c;
    std::uint64_t x = i;
    while (!seen[x]) {
      seen[x] = true;
      c.push_back(x);
      x = mulmod_u64(x, qm, m_prime);
    }
    out.push_back(std::move(c));
  }
  return out;
}

struct CycloFactorization {
  BigInt q;
  std::uint32_t p = 0;
  std::uint64_t m = 0;
  std::uint64_t m_prime = 1;
  unsigned j = 0;
  std::uint64_t multiplicity = 1;  // p^j
  std::vector<std::vector<std::uint64_t>> cosets;
  std::vector<std::uint64_t> coset_degrees;  // one per distinct factor
  bool explicit_factors = false;
  std::vector<BasePoly> factors;  // parallel to cosets when explicit

  std::size_t distinct_count() const { return coset_degrees.size(); }
  /// W(x^m - 1) = 2^M'.
  BigInt big_w() const {
    BigInt r = 1;
    mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), distinct_count());
    return r;
  }
  std::vector<std::uint64_t> sorted_degrees() const {
    auto d = coset_degrees;
    std::sort(d.begin(), d.end());
    return d;
  }
};

/// Degrees-only factorization of x^m - 1 over F_q, q = p^k.
inline CycloFactorization cyclotomic_degrees(std::uint32_t p, unsigned k, std::uint64_t m) {
  if (!is_prime_u64(p)) throw InputError("p must be prime");
  if (k < 1 || m < 1) throw InputError("k and m must be positive");
  CycloFactorization cf;
  cf.p = p;
  cf.q = pow_ui(BigInt(p), k);
  cf.m = m;
  const MSplit s = split_m(m, p);
  cf.m_prime = s.m_prime;
  cf.j = s.j;
  cf.multiplicity = m / s.m_prime;
  cf.cosets = cyclotomic_cosets(cf.q, cf.m_prime);
  for (const auto& c : cf.cosets) cf.coset_degrees.push_back(c.size());
  return cf;
}

/// Number of distinct irreducible factors of x^m' - 1, computed as
/// sum over d | m' of phi(d)/ord_d(q).
inline std::uint64_t distinct_factor_count_formula(const BigInt& q, std::uint64_t m_prime) {
  std::uint64_t total = 0;
  for (std::uint64_t d : divisors_u64(m_prime)) total += euler_phi_u64(d) / mult_order(q, d);
  return total;
}

/// Largest log2(q^e) for which explicit factors are produced.
inline constexpr unsigned kExplicitFactorBits = 64;

/// Coset factorization with explicit polynomials when the splitting field
/// F_{q^e} of x^m' - 1 is small enough. Each coset C gives prod_{i in C}
/// (x - zeta^i) for a primitive m'-th root of unity zeta.
inline CycloFactorization cyclotomic_factorization(const BaseFieldPtr& base, std::uint64_t m, std::uint64_t seed = 1,
                                                   unsigned max_bits = kExplicitFactorBits) {
  CycloFactorization cf = cyclotomic_degrees(base->characteristic(), base->degree(), m);
  const std::uint64_t e = cf.m_prime == 1 ? 1 : mult_order(cf.q, cf.m_prime);
  if (static_cast<long double>(e) * std::log2(static_cast<long double>(base->size())) > max_bits) return cf;
  if (cf.m_prime == 1) {
    cf.factors.push_back(BasePoly::x_pow_minus_one(base, 1));
    cf.explicit_factors = true;
    return cf;
  }
  auto ext = make_context(base, static_cast<unsigned>(e), seed, false);
  const BigInt n = ext->order() - 1;
  const BigInt cof = n / from_u64(cf.m_prime);
  std::vector<std::uint64_t> primes;
  {
    std::uint64_t r = cf.m_prime;
    for (std::uint64_t p = 2; p * p <= r; ++p) {
      if (r % p) continue;
      primes.push_back(p);
      while (r % p == 0) r /= p;
    }
    if (r > 1) primes.push_back(r);
  }
  std::mt19937_64 rng(seed ^ 0x5851F42D4C957F2DULL);
  FieldElement zeta;
  for (;;) {
    const FieldElement a = ext->random(rng);
    if (ext->is_zero(a)) continue;
    zeta = ext->pow(a, cof);
    bool ok = true;
    for (auto r : primes) {
      if (ext->pow(zeta, from_u64(cf.m_prime / r)) == ext->one()) {
        ok = false;
        break;
      }
    }
    if (ok) break;
  }
  std::vector<FieldElement> zpow(cf.m_prime);
  zpow[0] = ext->one();
  for (std::uint64_t i = 1; i < cf.m_prime; ++i) zpow[i] = ext->mul(zpow[i - 1], zeta);
  for (const auto& coset : cf.cosets) {
    ExtPoly prod = ExtPoly::one(ext);
    for (auto i : coset) {
      prod = prod * ExtPoly(ext, {ext->neg(zpow[i]), ext->one()});
    }
    std::vector<std::uint32_t> c;
    for (const auto& v : prod.coeffs()) {
      if (!ext->in_base(v)) throw IntegrityError("coset product has coefficients outside F_q");
      c.push_back(v.c[0]);
    }
    cf.factors.emplace_back(base, std::move(c));
  }
  cf.explicit_factors = true;
  return cf;
}

struct PolyDivisorStats {
  std::size_t w = 0;
  BigInt W = 1;
  BigInt Phi = 1;
  Rational Theta = 1;
  int mu_prime = 1;
  long degree = 0;
};

/// Stats from a factor pattern (degree, multiplicity) over F_q.
inline PolyDivisorStats divisor_stats_from_pattern(const BigInt& q,
                                                   const std::vector<std::pair<std::uint64_t, unsigned>>& pattern) {
  PolyDivisorStats st;
  bool squarefree = true;
  for (const auto& [d, e] : pattern) {
    if (e == 0) continue;
    ++st.w;
    st.degree += static_cast<long>(d * e);
    st.Phi *= pow_ui(q, (e - 1) * d) * (pow_ui(q, d) - 1);
    if (e > 1) squarefree = false;
  }
  mpz_mul_2exp(st.W.get_mpz_t(), BigInt(1).get_mpz_t(), st.w);
  st.Theta = Rational(st.Phi, pow_ui(q, static_cast<unsigned long>(st.degree)));
  st.Theta.canonicalize();
  st.mu_prime = squarefree ? (st.w % 2 ? -1 : 1) : 0;
  return st;
}

inline PolyDivisorStats divisor_stats(const BasePoly& g, std::uint64_t seed = 1) {
  if (g.is_zero() || !g.is_monic()) throw InputError("divisor_stats needs a monic nonzero polynomial");
  std::vector<std::pair<std::uint64_t, unsigned>> pattern;
  for (const auto& [h, e] : g.factor(seed)) pattern.emplace_back(static_cast<std::uint64_t>(h.degree()), e);
  return divisor_stats_from_pattern(g.f().order(), pattern);
}

}  // namespace pnpair
