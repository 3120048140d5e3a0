#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "pnpair/numtheory.hpp"

using namespace pnpair;

namespace {

// smallest-prime-factor sieve
std::vector<std::uint32_t> spf_sieve(std::uint32_t n) {
  std::vector<std::uint32_t> spf(n + 1, 0);
  for (std::uint32_t i = 2; i <= n; ++i) {
    if (spf[i]) continue;
    for (std::uint64_t j = i; j <= n; j += i)
      if (!spf[j]) spf[j] = i;
  }
  return spf;
}

std::map<std::uint64_t, unsigned> naive_factor(std::uint64_t n) {
  std::map<std::uint64_t, unsigned> r;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    while (n % d == 0) {
      ++r[d];
      n /= d;
    }
  if (n > 1) ++r[n];
  return r;
}

std::map<std::uint64_t, unsigned> as_map(const IntFactorization& f) {
  std::map<std::uint64_t, unsigned> r;
  for (const auto& pp : f.factors) r[to_u64(pp.prime)] = pp.exponent;
  return r;
}

}  // namespace

TEST(Factor, One) {
  const auto f = factor(std::uint64_t{1});
  EXPECT_TRUE(f.factors.empty());
  EXPECT_EQ(f.cofactor, 1);
}

TEST(Factor, FiveToThirteenMinusOne) {
  const auto f = factor(pow_ui(BigInt(5), 13) - 1);
  ASSERT_TRUE(f.complete());
  EXPECT_EQ(as_map(f), naive_factor(1220703124));
}

TEST(Factor, FiveToFifteenMinusOnePrimeSet) {
  const std::uint64_t n = 30517578124;
  const auto f = factor(from_u64(n));
  std::vector<std::uint64_t> got;
  for (const auto& pp : f.factors) got.push_back(to_u64(pp.prime));
  std::vector<std::uint64_t> want;
  for (auto [p, e] : naive_factor(n)) want.push_back(p);
  EXPECT_EQ(got, want);
}

TEST(Factor, RecombinesAndMatchesSieveBelowMillion) {
  const std::uint32_t N = 1'000'000;
  const auto spf = spf_sieve(N);
  FactorEffort eff;
  for (std::uint32_t n = 1; n <= N; ++n) {
    std::map<std::uint64_t, unsigned> want;
    for (std::uint32_t t = n; t > 1; t /= spf[t]) ++want[spf[t]];
    const auto f = factor(std::uint64_t{n}, eff);
    ASSERT_NO_THROW(f.verify()) << n;
    ASSERT_EQ(as_map(f), want) << n;
  }
}

TEST(Factor, QmMinusOneExamples) {
  auto f = factor_qm_minus_1(BigInt(5), 9);
  EXPECT_EQ(f.value, 1953124);
  EXPECT_EQ(as_map(f), naive_factor(1953124));
  f = factor_qm_minus_1(BigInt(2), 2);
  EXPECT_EQ(as_map(f), (std::map<std::uint64_t, unsigned>{{3, 1}}));
}

TEST(Factor, TwentyFiveToFortyEightIsComplete) {
  const auto f = factor_qm_minus_1(BigInt(25), 48);
  ASSERT_TRUE(f.complete());
  f.verify();
  // the degree-32 cyclotomic piece is a product of listed primes
  BigInt piece = pow_ui(BigInt(5), 32) - pow_ui(BigInt(5), 16) + 1;
  for (const auto& pp : f.factors)
    while (piece % pp.prime == 0) piece /= pp.prime;
  EXPECT_EQ(piece, 1);
}

TEST(Factor, ExternalTables) {
  std::istringstream in("# test\n5^13-1: 2 305175781\n");
  const auto t = FactorTables::parse(in);
  const auto f = factor_qm_minus_1(BigInt(5), 13, &t, FactorEffort{1000, 0, 1});
  EXPECT_TRUE(f.complete());
  EXPECT_EQ(f.provenance(), "external");
  std::istringstream bad("5^13-1: 3\n");
  EXPECT_THROW(FactorTables::parse(bad), InputError);
}

TEST(Factor, PartialWhenRhoDisabled) {
  const auto f = factor(BigInt(1000003) * BigInt(1000033), FactorEffort{1000, 0, 1});
  EXPECT_FALSE(f.complete());
  EXPECT_EQ(f.provenance(), "partial");
  EXPECT_NO_THROW(f.verify());
}

TEST(Arith, TwelveStats) {
  const auto f = factor(std::uint64_t{12});
  EXPECT_EQ(euler_phi(f), 4);
  EXPECT_EQ(mobius(f), 0);
  EXPECT_EQ(omega(f), 2u);
  EXPECT_EQ(big_w(f), 4);
  EXPECT_EQ(theta(f), Rational(1, 3));
  EXPECT_EQ(theta(factor(std::uint64_t{2})), Rational(1, 2));
  EXPECT_EQ(big_w(factor(pow_ui(BigInt(5), 13) - 1)), 4);
}

TEST(Arith, WMultiplicativeOnCoprimePairs) {
  std::mt19937_64 rng(7);
  int done = 0;
  while (done < 200) {
    const std::uint64_t a = rng() % 1'000'000'000 + 1, b = rng() % 1'000'000'000 + 1;
    if (std::gcd(a, b) != 1) continue;
    ++done;
    EXPECT_EQ(big_w(factor(BigInt(from_u64(a)) * from_u64(b))), big_w(factor(a)) * big_w(factor(b)));
  }
}

TEST(Arith, WUpperBound) {
  const auto f = factor(std::uint64_t{12});
  EXPECT_EQ(w_upper_bound(f, 2), 4);
  std::mt19937_64 rng(3);
  auto spf = spf_sieve(200000);
  std::vector<std::uint64_t> primes;
  for (std::uint64_t i = 100000; i < 200000; ++i)
    if (spf[i] == i) primes.push_back(i);
  for (int it = 0; it < 50; ++it) {
    const BigInt n = BigInt(from_u64(primes[rng() % primes.size()])) * from_u64(primes[rng() % primes.size()]) * 6;
    const auto exact = factor(n);
    const auto partial = factor(n, FactorEffort{1000, 0, 1});
    EXPECT_GE(w_upper_bound(partial, partial.trial_bound), big_w(exact));
    EXPECT_GE(w_upper_bound(exact, 1000), big_w(exact));
  }
}

TEST(Arith, MultOrder) {
  EXPECT_EQ(mult_order(std::uint64_t{5}, 13), 4u);
  EXPECT_EQ(mult_order(std::uint64_t{5}, 16), 4u);
  EXPECT_EQ(mult_order(std::uint64_t{7}, 1), 1u);
  for (std::uint64_t n = 2; n < 3000; ++n) {
    for (std::uint64_t q : {2u, 3u, 5u, 25u}) {
      if (std::gcd(q, n) != 1) continue;
      std::uint64_t e = 1, x = q % n;
      while (x != 1) {
        x = x * q % n;
        ++e;
      }
      ASSERT_EQ(mult_order(q, n), e);
      ASSERT_EQ(euler_phi_u64(n) % e, 0u);
    }
  }
}

TEST(WBound, DAtTwo) {
  const auto w = compute_D(2);
  EXPECT_EQ(w.prime_count, 2u);
  EXPECT_NEAR(std::pow(10.0L, w.log10_D), 4 / std::sqrt(6.0L), 1e-12L);
}

TEST(WBound, DAtPrintedNu) {
  const auto w = compute_D(21.57L);
  EXPECT_GE(w.log10_D, 4905.0L);
  EXPECT_LE(w.log10_D, 4906.5L);
}

TEST(WBound, HoldsOnRandomValues) {
  std::mt19937_64 rng(11);
  std::vector<long double> ld;
  for (int nu = 2; nu <= 8; ++nu) ld.push_back(compute_D(nu).log10_D);
  for (int it = 0; it < 10000; ++it) {
    const std::uint64_t t = rng() % 1'000'000'000'000ULL + 1;
    const std::size_t w = factor(t).factors.size();
    const long double lw = w * std::log10(2.0L);
    for (int nu = 2; nu <= 8; ++nu) {
      ASSERT_LT(lw, ld[nu - 2] + std::log10(static_cast<long double>(t)) / nu) << t << " nu=" << nu;
    }
  }
}
