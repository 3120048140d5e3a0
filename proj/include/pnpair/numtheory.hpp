#pragma once

// Integer arithmetic functions over big integers: factorization (trial
// division, Brent-Pollard rho, cyclotomic pre-splitting of q^m - 1), the
// multiplicative functions phi/mu/omega/W/theta, and the worst-case constant
// of the bound W(t) < D * t^(1/nu).

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pnpair/errors.hpp"

namespace pnpair {

using BigInt = mpz_class;
using Rational = mpq_class;

inline std::string to_string(const BigInt& n) { return n.get_str(10); }
inline std::string to_string(const Rational& r) { return r.get_str(10); }

inline BigInt pow_ui(const BigInt& base, unsigned long exp) {
  BigInt r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
  return r;
}

inline BigInt powmod(const BigInt& base, const BigInt& exp, const BigInt& mod) {
  BigInt r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return r;
}

/// log10 of a positive big integer, accurate to long double precision.
inline long double log10_big(const BigInt& n) {
  if (n <= 0) throw InputError("log10 of non-positive integer");
  long exp2 = 0;
  const double mant = mpz_get_d_2exp(&exp2, n.get_mpz_t());
  return std::log10(static_cast<long double>(mant)) +
         static_cast<long double>(exp2) * std::log10(2.0L);
}

inline std::uint64_t to_u64(const BigInt& n) {
  if (n < 0 || mpz_sizeinbase(n.get_mpz_t(), 2) > 64) throw InputError("integer does not fit in 64 bits");
  std::uint64_t v = 0;
  mpz_export(&v, nullptr, -1, sizeof v, 0, 0, n.get_mpz_t());
  return v;
}

inline BigInt from_u64(std::uint64_t v) {
  BigInt r;
  mpz_import(r.get_mpz_t(), 1, -1, sizeof v, 0, 0, &v);
  return r;
}

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod_u64(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, b, m);
    b = mulmod_u64(b, b, m);
    e >>= 1;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Prime tables

/// Default ceiling for sieving; sieves above it raise ResourceError.
inline constexpr std::uint64_t kSieveBudget = std::uint64_t{1} << 28;

/// Returns a shared snapshot holding (at least) every prime <= n in
/// increasing order. Snapshots are immutable; growth replaces the cache.
inline std::shared_ptr<const std::vector<std::uint32_t>> primes_up_to(std::uint64_t n,
                                                                      std::uint64_t budget = kSieveBudget) {
  static std::mutex mu;
  static std::shared_ptr<const std::vector<std::uint32_t>> cache;
  static std::uint64_t cached_limit = 0;
  if (n > budget) {
    throw ResourceError("prime sieve up to " + std::to_string(n) + " exceeds budget " + std::to_string(budget));
  }
  std::lock_guard<std::mutex> lock(mu);
  if (cache && cached_limit >= n) return cache;
  const std::uint64_t limit = std::max<std::uint64_t>(n, std::max<std::uint64_t>(cached_limit * 2, 1 << 16));
  std::vector<bool> composite(limit + 1, false);
  auto primes = std::make_shared<std::vector<std::uint32_t>>();
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes->push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  cache = std::move(primes);
  cached_limit = limit;
  return cache;
}

/// Strong probable-prime test: trial division by small primes followed by
/// Miller-Rabin with the fixed witness set {2,3,...,37} (deterministic below
/// 3.3e24).
inline bool is_probable_prime(const BigInt& n) {
  static constexpr unsigned kWitnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  if (n < 2) return false;
  for (unsigned p : kWitnesses) {
    if (n == p) return true;
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
  }
  BigInt d = n - 1;
  unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_tdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
  const BigInt nm1 = n - 1;
  for (unsigned a : kWitnesses) {
    BigInt x = powmod(BigInt(a), d, n);
    if (x == 1 || x == nm1) continue;
    bool witness = true;
    for (unsigned long r = 1; r < s; ++r) {
      x = x * x % n;
      if (x == nm1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

inline bool is_prime_u64(std::uint64_t n) { return is_probable_prime(from_u64(n)); }

// ---------------------------------------------------------------------------
// Factorizations

struct PrimePower {
  BigInt prime;
  unsigned exponent = 0;
};

/// value = prod(prime^exponent) * cofactor, with cofactor == 1 when the
/// factorization is complete and composite otherwise.
struct IntFactorization {
  BigInt value = 1;
  std::vector<PrimePower> factors;  // strictly increasing primes
  BigInt cofactor = 1;
  /// No prime below this bound divides the cofactor.
  BigInt trial_bound = 2;
  bool used_external = false;

  bool complete() const { return cofactor == 1; }

  std::string provenance() const {
    if (!complete()) return "partial";
    return used_external ? "external" : "complete";
  }

  std::vector<BigInt> primes() const {
    std::vector<BigInt> out;
    out.reserve(factors.size());
    for (const auto& f : factors) out.push_back(f.prime);
    return out;
  }

  /// Checks the recombination, ordering and primality invariants.
  void verify() const {
    BigInt prod = cofactor;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      const auto& f = factors[i];
      if (f.exponent == 0) throw IntegrityError("zero exponent in factorization");
      if (i > 0 && !(factors[i - 1].prime < f.prime)) throw IntegrityError("primes not strictly increasing");
      if (!is_probable_prime(f.prime)) throw IntegrityError("non-prime factor " + to_string(f.prime));
      prod *= pow_ui(f.prime, f.exponent);
    }
    if (prod != value) throw IntegrityError("factorization does not recombine to " + to_string(value));
    if (cofactor != 1 && is_probable_prime(cofactor)) throw IntegrityError("prime cofactor left unlisted");
  }
};

struct FactorEffort {
  std::uint64_t trial_bound = 1'000'000;
  /// Iteration budget for each Brent-rho run on one composite.
  std::uint64_t rho_iterations = 2'000'000;
  std::uint64_t seed = 1;
};

namespace detail {

/// Brent's variant of Pollard rho with batched gcds. Returns a non-trivial
/// divisor or nothing when the iteration budget runs out.
inline std::optional<BigInt> brent_rho(const BigInt& n, std::uint64_t budget, std::uint64_t seed) {
  if (mpz_even_p(n.get_mpz_t())) return BigInt(2);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uint64_t used = 0;
  constexpr std::uint64_t kBatch = 128;
  while (used < budget) {
    const BigInt c = from_u64(rng() % 1'000'003 + 1) % n;
    BigInt y = from_u64(rng()) % n;
    BigInt x, ys, g = 1, acc = 1, diff;
    std::uint64_t r = 1;
    auto step = [&](BigInt& v) {
      v = v * v + c;
      mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
    };
    while (g == 1 && used < budget) {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) step(y);
      used += r;
      std::uint64_t k = 0;
      while (k < r && g == 1) {
        ys = y;
        const std::uint64_t lim = std::min(kBatch, r - k);
        for (std::uint64_t i = 0; i < lim; ++i) {
          step(y);
          diff = x - y;
          acc = acc * diff;
          mpz_mod(acc.get_mpz_t(), acc.get_mpz_t(), n.get_mpz_t());
        }
        used += lim;
        mpz_gcd(g.get_mpz_t(), acc.get_mpz_t(), n.get_mpz_t());
        k += lim;
      }
      r *= 2;
    }
    if (g == n) {
      // Batch overshot: replay one step at a time from the saved point.
      do {
        step(ys);
        diff = x - ys;
        mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
        ++used;
      } while (g == 1);
    }
    if (g != 1 && g != n) return g;
  }
  return std::nullopt;
}

/// Accumulates prime powers and leftover composites, then normalizes.
class FactorAccumulator {
 public:
  void add_prime(const BigInt& p, unsigned e) { primes_[p] += e; }
  void add_composite(const BigInt& c) { composites_.push_back(c); }

  /// Splits a number whose small primes are already removed.
  void split(BigInt n, const FactorEffort& effort, std::uint64_t salt) {
    std::vector<BigInt> stack{std::move(n)};
    while (!stack.empty()) {
      BigInt v = std::move(stack.back());
      stack.pop_back();
      if (v == 1) continue;
      for (const auto& [p, e] : primes_) {
        (void)e;
        while (mpz_divisible_p(v.get_mpz_t(), p.get_mpz_t())) {
          v /= p;
          primes_[p] += 1;
        }
      }
      if (v == 1) continue;
      if (is_probable_prime(v)) {
        primes_[v] += 1;
        continue;
      }
      if (mpz_perfect_power_p(v.get_mpz_t())) {
        for (unsigned long k = mpz_sizeinbase(v.get_mpz_t(), 2); k >= 2; --k) {
          BigInt root;
          if (mpz_root(root.get_mpz_t(), v.get_mpz_t(), k)) {
            for (unsigned long i = 0; i < k; ++i) stack.push_back(root);
            v = 1;
            break;
          }
        }
        if (v == 1) continue;
      }
      auto d = brent_rho(v, effort.rho_iterations, effort.seed + salt++);
      if (!d) {
        composites_.push_back(v);
        continue;
      }
      stack.push_back(*d);
      stack.push_back(v / *d);
    }
  }

  IntFactorization finish(const BigInt& value, const BigInt& trial_bound, bool external) {
    // Composite leftovers may share factors with known primes or each other.
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto& c : composites_) {
        for (const auto& [p, e] : primes_) {
          (void)e;
          while (c != 1 && mpz_divisible_p(c.get_mpz_t(), p.get_mpz_t())) {
            c /= p;
            primes_[p] += 1;
            changed = true;
          }
        }
      }
      for (std::size_t i = 0; i < composites_.size(); ++i) {
        for (std::size_t j = i + 1; j < composites_.size(); ++j) {
          BigInt g;
          mpz_gcd(g.get_mpz_t(), composites_[i].get_mpz_t(), composites_[j].get_mpz_t());
          if (g != 1 && g != composites_[i]) {
            composites_.push_back(g);
            composites_[i] /= g;
            changed = true;
          }
        }
      }
      std::vector<BigInt> kept;
      for (auto& c : composites_) {
        if (c == 1) continue;
        if (is_probable_prime(c)) {
          primes_[c] += 1;
          changed = true;
        } else {
          kept.push_back(c);
        }
      }
      composites_ = std::move(kept);
    }
    IntFactorization f;
    f.value = value;
    f.trial_bound = trial_bound;
    f.used_external = external;
    for (const auto& [p, e] : primes_) f.factors.push_back({p, e});
    for (const auto& c : composites_) f.cofactor *= c;
    return f;
  }

 private:
  std::map<BigInt, unsigned> primes_;
  std::vector<BigInt> composites_;
};

/// Removes from `n` every prime p < bound accepted by `keep(p)`. Rejected
/// primes must be ones that cannot divide n.
template <class Keep>
inline void trial_divide(BigInt& n, std::uint64_t bound, FactorAccumulator& acc, Keep keep) {
  auto primes = primes_up_to(bound);
  for (std::uint32_t p : *primes) {
    if (p >= bound) break;
    if (!keep(p)) continue;
    if (mpz_cmp_ui(n.get_mpz_t(), static_cast<unsigned long>(p) * p) < 0) {
      // no prime factor below sqrt(n) is left, so n is 1 or prime
      if (n > 1) acc.add_prime(n, 1);
      n = 1;
      break;
    }
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      unsigned e = 0;
      while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
        mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
        ++e;
      }
      acc.add_prime(BigInt(p), e);
    }
    if (n == 1) break;
  }
}

}  // namespace detail

/// Factors n >= 1: trial division below effort.trial_bound, then
/// Brent-Pollard rho. Leftover composites form the cofactor.
inline IntFactorization factor(const BigInt& n, const FactorEffort& effort = {}) {
  if (n < 1) throw InputError("factor: n must be >= 1");
  detail::FactorAccumulator acc;
  BigInt rest = n;
  detail::trial_divide(rest, effort.trial_bound, acc, [](std::uint32_t) { return true; });
  acc.split(rest, effort, 0);
  return acc.finish(n, from_u64(effort.trial_bound), false);
}

inline IntFactorization factor(std::uint64_t n, const FactorEffort& effort = {}) {
  return factor(from_u64(n), effort);
}

// ---------------------------------------------------------------------------
// External factor tables: lines "base^exp-1: p1 p2 ...", '#' comments.

class FactorTables {
 public:
  struct Entry {
    BigInt base;
    unsigned long exponent = 0;
    std::vector<BigInt> primes;
  };

  static FactorTables parse(std::istream& in, const std::string& source = "<stream>") {
    FactorTables t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      auto is_space = [](unsigned char ch) { return std::isspace(ch) != 0; };
      if (std::all_of(line.begin(), line.end(), is_space)) continue;
      auto fail = [&](const std::string& why) {
        throw InputError(source + ":" + std::to_string(lineno) + ": " + why);
      };
      const auto colon = line.find(':');
      if (colon == std::string::npos) fail("missing ':'");
      std::string head = line.substr(0, colon);
      head.erase(std::remove_if(head.begin(), head.end(), is_space), head.end());
      const auto caret = head.find('^');
      if (caret == std::string::npos || head.size() < caret + 3 || head.substr(head.size() - 2) != "-1") {
        fail("expected 'base^exp-1'");
      }
      Entry e;
      const std::string base = head.substr(0, caret);
      const std::string exp = head.substr(caret + 1, head.size() - caret - 3);
      if (base.empty() || exp.empty() || !std::all_of(base.begin(), base.end(), ::isdigit) ||
          !std::all_of(exp.begin(), exp.end(), ::isdigit)) {
        fail("non-numeric base or exponent");
      }
      e.base = BigInt(base);
      e.exponent = std::stoul(exp);
      if (e.base < 2 || e.exponent == 0) fail("base must be >= 2 and exponent >= 1");
      const BigInt value = pow_ui(e.base, e.exponent) - 1;
      std::istringstream rest(line.substr(colon + 1));
      std::string tok;
      while (rest >> tok) {
        if (!std::all_of(tok.begin(), tok.end(), ::isdigit)) fail("non-numeric prime '" + tok + "'");
        BigInt p(tok);
        if (!is_probable_prime(p)) fail(tok + " is not prime");
        if (!mpz_divisible_p(value.get_mpz_t(), p.get_mpz_t())) fail(tok + " does not divide " + head);
        e.primes.push_back(p);
      }
      t.entries_.push_back(std::move(e));
    }
    return t;
  }

  static FactorTables load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open factor table '" + path + "'");
    return parse(in, path);
  }

  const std::vector<Entry>& entries() const { return entries_; }
  void merge(const FactorTables& o) { entries_.insert(entries_.end(), o.entries_.begin(), o.entries_.end()); }

  std::vector<BigInt> all_primes() const {
    std::vector<BigInt> out;
    for (const auto& e : entries_) out.insert(out.end(), e.primes.begin(), e.primes.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  std::vector<Entry> entries_;
};

/// Small positive divisors of n (n given by its small factorization).
inline std::vector<std::uint64_t> divisors_u64(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      if (d * d != n) out.push_back(n / d);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline int mobius_u64(std::uint64_t n) {
  int mu = 1;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    mu = -mu;
  }
  if (n > 1) mu = -mu;
  return mu;
}

inline std::uint64_t euler_phi_u64(std::uint64_t n) {
  std::uint64_t r = n;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    while (n % p == 0) n /= p;
    r -= r / p;
  }
  if (n > 1) r -= r / n;
  return r;
}

/// Cyclotomic value Phi_d(x) = prod_{e | d} (x^e - 1)^{mu(d/e)}.
inline BigInt cyclotomic_value(const BigInt& x, std::uint64_t d) {
  BigInt num = 1, den = 1;
  for (std::uint64_t e : divisors_u64(d)) {
    const int mu = mobius_u64(d / e);
    if (mu == 0) continue;
    const BigInt term = pow_ui(x, e) - 1;
    (mu > 0 ? num : den) *= term;
  }
  BigInt r;
  mpz_divexact(r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return r;
}

/// Factors q^m - 1 after splitting it into the cyclotomic values Phi_d(q),
/// d | m. A prime dividing Phi_d(q) either divides d or is 1 mod d, which
/// restricts trial division per piece.
inline IntFactorization factor_qm_minus_1(const BigInt& q, std::uint64_t m, const FactorTables* tables = nullptr,
                                          const FactorEffort& effort = {}) {
  if (q < 2 || m < 1) throw InputError("factor_qm_minus_1: need q >= 2 and m >= 1");
  const BigInt value = pow_ui(q, m) - 1;
  detail::FactorAccumulator acc;
  const std::vector<BigInt> table_primes = tables ? tables->all_primes() : std::vector<BigInt>{};
  bool external = false;
  std::uint64_t salt = 0;
  for (std::uint64_t d : divisors_u64(m)) {
    BigInt piece = cyclotomic_value(q, d);
    if (piece == 0) continue;
    detail::trial_divide(piece, effort.trial_bound, acc,
                         [d](std::uint32_t p) { return d % p == 0 || p % d == 1; });
    for (const auto& p : table_primes) {
      if (p < from_u64(effort.trial_bound)) continue;
      unsigned e = 0;
      while (piece != 1 && mpz_divisible_p(piece.get_mpz_t(), p.get_mpz_t())) {
        piece /= p;
        ++e;
      }
      if (e) {
        acc.add_prime(p, e);
        external = true;
      }
    }
    acc.split(piece, effort, salt);
    salt += 1000;
  }
  return acc.finish(value, from_u64(effort.trial_bound), external);
}

// ---------------------------------------------------------------------------
// Multiplicative functions on complete factorizations

namespace detail {
inline void require_complete(const IntFactorization& f, const char* what) {
  if (!f.complete()) throw IncompleteFactorization(std::string(what) + " of " + to_string(f.value));
}
}  // namespace detail

inline BigInt euler_phi(const IntFactorization& f) {
  detail::require_complete(f, "phi");
  BigInt r = 1;
  for (const auto& pp : f.factors) r *= pow_ui(pp.prime, pp.exponent - 1) * (pp.prime - 1);
  return r;
}

inline int mobius(const IntFactorization& f) {
  detail::require_complete(f, "mu");
  for (const auto& pp : f.factors)
    if (pp.exponent > 1) return 0;
  return f.factors.size() % 2 ? -1 : 1;
}

inline std::size_t omega(const IntFactorization& f) {
  detail::require_complete(f, "omega");
  return f.factors.size();
}

/// Number of squarefree divisors, 2^omega.
inline BigInt big_w(const IntFactorization& f) {
  BigInt r = 1;
  mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), omega(f));
  return r;
}

/// theta(e) = phi(e)/e, exact.
inline Rational theta(const IntFactorization& f) {
  Rational r(euler_phi(f), f.value);
  r.canonicalize();
  return r;
}

/// Certified upper bound 2^(omega_known + floor(log C / log B)) on W(value)
/// when the cofactor C has no prime factor below B.
inline BigInt w_upper_bound(const IntFactorization& f, const BigInt& trial_bound) {
  if (trial_bound < 2) throw InputError("w_upper_bound: trial bound must be >= 2");
  if (trial_bound > f.trial_bound && !f.complete()) {
    throw InputError("w_upper_bound: cofactor was only cleared below " + to_string(f.trial_bound));
  }
  std::size_t unknown = 0;
  BigInt power = trial_bound;
  while (power <= f.cofactor) {
    ++unknown;
    power *= trial_bound;
  }
  BigInt r = 1;
  mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), f.factors.size() + unknown);
  return r;
}

/// Upper bound on the number of distinct primes hidden in the cofactor.
inline std::size_t unknown_prime_bound(const IntFactorization& f) {
  std::size_t unknown = 0;
  BigInt power = f.trial_bound;
  while (power <= f.cofactor) {
    ++unknown;
    power *= f.trial_bound;
  }
  return unknown;
}

// ---------------------------------------------------------------------------
// W(t) < D t^(1/nu)

struct WBoundParams {
  long double nu = 0;
  long double log10_D = 0;
  std::size_t prime_count = 0;   // primes p <= 2^nu
  long double log10_two_term = 0;  // contribution of p = 2 to log10_D
};

inline WBoundParams compute_D(long double nu, std::uint64_t sieve_budget = kSieveBudget) {
  if (!(nu > 1)) throw InputError("compute_D: nu must exceed 1");
  const long double cap = std::pow(2.0L, nu);
  if (cap > static_cast<long double>(sieve_budget)) {
    throw ResourceError("compute_D: 2^nu = " + std::to_string(static_cast<double>(cap)) + " exceeds sieve budget");
  }
  const auto limit = static_cast<std::uint64_t>(std::floor(cap));
  auto primes = primes_up_to(limit, sieve_budget);
  WBoundParams w;
  w.nu = nu;
  const long double l2 = std::log10(2.0L);
  long double sum = 0, comp = 0;  // Kahan summation
  for (std::uint32_t p : *primes) {
    if (p > limit) break;
    const long double term = l2 - std::log10(static_cast<long double>(p)) / nu;
    const long double y = term - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    ++w.prime_count;
  }
  w.log10_D = sum;
  w.log10_two_term = l2 - l2 / nu;
  return w;
}

/// Least e >= 1 with q^e = 1 (mod n).
inline std::uint64_t mult_order(const BigInt& q, std::uint64_t n) {
  if (n == 0) throw InputError("mult_order: modulus must be positive");
  if (n == 1) return 1;
  BigInt g;
  const BigInt nb = from_u64(n);
  mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), nb.get_mpz_t());
  if (g != 1) throw InputError("mult_order: gcd(q, n) != 1");
  const std::uint64_t qm = to_u64(BigInt(q % nb));
  std::uint64_t e = euler_phi_u64(n);
  std::uint64_t rest = e;
  for (std::uint64_t p = 2; p * p <= rest; ++p) {
    if (rest % p) continue;
    while (rest % p == 0) rest /= p;
    while (e % p == 0 && powmod_u64(qm, e / p, n) == 1) e /= p;
  }
  if (rest > 1)
    while (e % rest == 0 && powmod_u64(qm, e / rest, n) == 1) e /= rest;
  return e;
}

inline std::uint64_t mult_order(std::uint64_t q, std::uint64_t n) { return mult_order(from_u64(q), n); }

// ---------------------------------------------------------------------------
// JSON

inline void to_json(nlohmann::json& j, const IntFactorization& f) {
  nlohmann::json fac = nlohmann::json::array();
  for (const auto& pp : f.factors) fac.push_back({{"prime", to_string(pp.prime)}, {"exponent", pp.exponent}});
  j = {{"value", to_string(f.value)},
       {"factors", fac},
       {"cofactor", to_string(f.cofactor)},
       {"complete", f.complete()},
       {"provenance", f.provenance()}};
}

}  // namespace pnpair
