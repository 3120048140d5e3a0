#pragma once

// Sufficient conditions for primitive normal pairs with prescribed traces:
// the basic inequality, its W(t) < D t^(1/nu) variants, delta(q, m'), the
// prime-sieve evaluator and its parameter search. Comparisons are done in
// log10 with long double.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pnpair/cyclotomic.hpp"
#include "pnpair/errors.hpp"
#include "pnpair/numtheory.hpp"

namespace pnpair {

inline const long double kLog10Two = std::log10(2.0L);
/// Verdicts whose log10 margin is below this are flagged.
inline constexpr long double kMarginFlag = 1e-6L;

struct PairInstance {
  std::uint32_t p = 5;
  unsigned k = 1;
  std::uint64_t m = 1;
  unsigned n = 4;

  BigInt q() const { return pow_ui(BigInt(p), k); }
  long double log10_q() const { return k * std::log10(static_cast<long double>(p)); }
  void validate() const {
    if (!is_prime_u64(p)) throw InputError("p = " + std::to_string(p) + " is not prime");
    if (k < 1 || m < 1 || n < 1) throw InputError("k, m, n must be positive");
  }
  std::string label() const { return "(" + to_string(q()) + "," + std::to_string(m) + ")"; }
};

inline void to_json(nlohmann::json& j, const PairInstance& in) {
  j = {{"p", in.p}, {"k", in.k}, {"q", to_string(in.q())}, {"m", in.m}, {"n", in.n}};
}

enum class Variant { SUFF, D_FORM, D1_FORM, MPRIME_FORM, DELTA_FORM };
enum class Verdict { holds, holds_certified, fails, inconclusive };

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::SUFF: return "SUFF";
    case Variant::D_FORM: return "D_FORM";
    case Variant::D1_FORM: return "D1_FORM";
    case Variant::MPRIME_FORM: return "MPRIME_FORM";
    case Variant::DELTA_FORM: return "DELTA_FORM";
  }
  return "?";
}

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::holds_certified: return "holds (certified)";
    case Verdict::fails: return "fails";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

inline bool verdict_holds(Verdict v) { return v == Verdict::holds || v == Verdict::holds_certified; }

/// A W value that is either exact or a certified upper bound.
struct WValue {
  BigInt value = 1;
  bool exact = true;
};

inline WValue w_exact_or_bound(const IntFactorization& f) {
  if (f.complete()) return {big_w(f), true};
  return {w_upper_bound(f, f.trial_bound), false};
}

struct CriterionReport {
  PairInstance instance;
  Variant variant = Variant::SUFF;
  std::optional<long double> nu;
  long double lhs_log10 = 0;
  long double rhs_log10 = 0;
  bool holds = false;
  Verdict verdict = Verdict::fails;
  bool near_margin = false;
};

inline CriterionReport make_report(const PairInstance& in, Variant v, long double lhs, long double rhs, bool exact,
                                   std::optional<long double> nu = std::nullopt) {
  CriterionReport r;
  r.instance = in;
  r.variant = v;
  r.nu = nu;
  r.lhs_log10 = lhs;
  r.rhs_log10 = rhs;
  r.holds = lhs > rhs;
  r.verdict = r.holds ? (exact ? Verdict::holds : Verdict::holds_certified) : (exact ? Verdict::fails : Verdict::inconclusive);
  r.near_margin = std::fabs(lhs - rhs) < kMarginFlag;
  return r;
}

inline void to_json(nlohmann::json& j, const CriterionReport& r) {
  j = {{"instance", r.instance},
       {"variant", variant_name(r.variant)},
       {"lhs_log10", static_cast<double>(r.lhs_log10)},
       {"rhs_log10", static_cast<double>(r.rhs_log10)},
       {"holds", r.holds},
       {"verdict", verdict_name(r.verdict)},
       {"near_margin", r.near_margin}};
  if (r.nu) j["nu"] = static_cast<double>(*r.nu);
}

/// q^(m/2-2) > (2n+1) W(q^m-1)^2 W(x^m-1)^2.
inline CriterionReport suff_check(const PairInstance& in, const WValue& w_qm, const BigInt& w_xm) {
  in.validate();
  const long double lhs = (static_cast<long double>(in.m) / 2 - 2) * in.log10_q();
  const long double rhs = std::log10(2.0L * in.n + 1) + 2 * log10_big(w_qm.value) + 2 * log10_big(w_xm);
  return make_report(in, Variant::SUFF, lhs, rhs, w_qm.exact);
}

struct VariantInputs {
  std::optional<long double> nu;
  std::optional<long double> log10_D;
  std::optional<BigInt> w_xm;          // D1_FORM
  std::optional<Rational> delta;       // DELTA_FORM
};

/// The W(t) < D t^(1/nu) forms:
///   D_FORM      (2n+1) D^2 q^(2m/nu) 2^(2m)
///   D1_FORM     (2n+1) D^2 q^(2m/nu) W(x^m-1)^2
///   MPRIME_FORM (2n+1) D^2 q^(2m/nu) 2^(2m')          with m = m' p^j
///   DELTA_FORM  2(2n+1) D^2 q^(2m/nu) 2^(2 m delta) m
/// each compared against q^(m/2-2).
inline CriterionReport variant_check(const PairInstance& in, Variant v, const VariantInputs& x) {
  in.validate();
  if (v == Variant::SUFF) throw InputError("use suff_check for the SUFF variant");
  if (!x.nu || !x.log10_D) throw InputError(std::string(variant_name(v)) + " needs nu and D");
  const long double nu = *x.nu;
  if (!(nu > 0)) throw InputError("nu must be positive");
  const long double lq = in.log10_q();
  const long double m = static_cast<long double>(in.m);
  const long double lhs = (m / 2 - 2) * lq;
  long double rhs = 2 * *x.log10_D + (2 * m / nu) * lq;
  switch (v) {
    case Variant::D_FORM:
      rhs += std::log10(2.0L * in.n + 1) + 2 * m * kLog10Two;
      break;
    case Variant::D1_FORM:
      if (!x.w_xm) throw InputError("D1_FORM needs W(x^m-1)");
      rhs += std::log10(2.0L * in.n + 1) + 2 * log10_big(*x.w_xm);
      break;
    case Variant::MPRIME_FORM: {
      const MSplit s = split_m(in.m, in.p);
      rhs += std::log10(2.0L * in.n + 1) + 2 * static_cast<long double>(s.m_prime) * kLog10Two;
      break;
    }
    case Variant::DELTA_FORM: {
      if (!x.delta) throw InputError("DELTA_FORM needs delta");
      const long double d = x.delta->get_d();
      rhs += std::log10(2.0L * (2.0L * in.n + 1)) + 2 * m * d * kLog10Two + std::log10(m);
      break;
    }
    default:
      break;
  }
  return make_report(in, v, lhs, rhs, true, nu);
}

// ---------------------------------------------------------------------------
// Thresholds

/// Least integer M >= 1 with a*m > b for every m >= M; none when a <= 0.
inline std::optional<std::uint64_t> linear_threshold(long double a, long double b) {
  if (!(a > 0)) return std::nullopt;
  const long double x = b / a;
  if (x < 1) return 1;
  return static_cast<std::uint64_t>(std::floor(x)) + 1;
}

/// Least M >= 1 such that F(m) = a*m - log10(m) - b > 0 for all m >= M.
/// F is convex, so the set where F <= 0 is an interval.
inline std::optional<std::uint64_t> convex_threshold(long double a, long double b) {
  if (!(a > 0)) return std::nullopt;
  auto F = [&](std::uint64_t m) { return a * static_cast<long double>(m) - std::log10(static_cast<long double>(m)) - b; };
  const long double mstar = 1 / (a * std::log(10.0L));
  const std::uint64_t base = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(mstar)));
  // the integer minimum of F sits at base or base + 1
  std::uint64_t lo;
  if (F(base) <= 0) {
    lo = base;
  } else if (F(base + 1) <= 0) {
    lo = base + 1;
  } else {
    return 1;
  }
  std::uint64_t hi = lo + 1;
  while (F(hi) <= 0) {
    if (hi > (std::uint64_t{1} << 62)) return std::nullopt;
    lo = hi;
    hi *= 2;
  }
  // F(lo) <= 0 < F(hi), F increasing on [lo + 1, hi]
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (F(mid) > 0 ? hi : lo) = mid;
  }
  return hi;
}

struct Table1Row {
  long double nu = 0;
  std::uint64_t k_lo = 0;
  std::uint64_t k_hi = 0;
};

struct Table1Result {
  Table1Row row;
  long double log10_D = 0;
  std::optional<std::uint64_t> m_k;          // valid for every k in the range
  std::optional<std::uint64_t> m_k_at_k_hi;  // threshold at the top of the range
  std::optional<std::uint64_t> m_k_odd_D;    // diagnostic: D over odd primes only
};

/// Least m such that D_FORM holds for all larger m, at a single k.
inline std::optional<std::uint64_t> d_form_m_threshold(std::uint32_t p, std::uint64_t k, unsigned n, long double nu,
                                                       long double log10_D) {
  const long double lq = static_cast<long double>(k) * std::log10(static_cast<long double>(p));
  const long double a = lq * (0.5L - 2 / nu) - 2 * kLog10Two;
  const long double b = 2 * lq + std::log10(2.0L * n + 1) + 2 * log10_D;
  return linear_threshold(a, b);
}

/// Least k such that D_FORM holds at the given m for all larger k.
inline std::optional<std::uint64_t> d_form_k_threshold(std::uint32_t p, std::uint64_t m, unsigned n, long double nu,
                                                       long double log10_D) {
  const long double lp = std::log10(static_cast<long double>(p));
  const long double mm = static_cast<long double>(m);
  const long double a = lp * (mm / 2 - 2 - 2 * mm / nu);
  const long double b = std::log10(2.0L * n + 1) + 2 * log10_D + 2 * mm * kLog10Two;
  return linear_threshold(a, b);
}

/// For each row, the threshold m_k of D_FORM. The threshold decreases in k,
/// so the range value is the one at k_lo.
inline std::vector<Table1Result> table1_thresholds(const std::vector<Table1Row>& rows, std::uint32_t p = 5,
                                                   unsigned n = 4) {
  std::vector<Table1Result> out;
  for (const auto& row : rows) {
    if (row.k_lo == 0 || row.k_hi < row.k_lo) throw InputError("bad k range in table row");
    Table1Result r;
    r.row = row;
    const WBoundParams w = compute_D(row.nu);
    r.log10_D = w.log10_D;
    r.m_k = d_form_m_threshold(p, row.k_lo, n, row.nu, w.log10_D);
    r.m_k_at_k_hi = d_form_m_threshold(p, row.k_hi, n, row.nu, w.log10_D);
    r.m_k_odd_D = d_form_m_threshold(p, row.k_lo, n, row.nu, w.log10_D - w.log10_two_term);
    out.push_back(r);
  }
  return out;
}

/// Least m with DELTA_FORM holding for every larger m.
inline std::optional<std::uint64_t> delta_form_threshold(std::uint32_t p, unsigned k, unsigned n, long double nu,
                                                         long double log10_D, const Rational& delta) {
  const long double lq = k * std::log10(static_cast<long double>(p));
  const long double a = lq * (0.5L - 2 / nu) - 2 * delta.get_d() * kLog10Two;
  const long double b = 2 * lq + std::log10(2.0L * (2.0L * n + 1)) + 2 * log10_D;
  return convex_threshold(a, b);
}

/// Least j such that MPRIME_FORM holds for m = m' p^j' at every j' >= j,
/// using W(x^m-1) <= W_xm (2^m' for the printed form).
inline std::optional<unsigned> mprime_j_threshold(const PairInstance& base, std::uint64_t m_prime, long double nu,
                                                  long double log10_D, long double log10_w_xm) {
  const long double lq = base.log10_q();
  const long double a = lq * (0.5L - 2 / nu);
  const long double b = 2 * lq + std::log10(2.0L * base.n + 1) + 2 * log10_D + 2 * log10_w_xm;
  auto th = linear_threshold(a, b);
  if (!th) return std::nullopt;
  unsigned j = 0;
  long double m = static_cast<long double>(m_prime);
  while (m < static_cast<long double>(*th)) {
    m *= base.p;
    ++j;
  }
  return j;
}

// ---------------------------------------------------------------------------
// delta(q, m')

struct MDecomposition {
  std::uint64_t m_prime = 1;
  unsigned j = 0;
  std::uint64_t m_bar = 1;
  std::uint64_t order_e = 1;
  std::uint64_t M_prime = 1;
  Rational delta_exact = 1;                 // M'/m'
  std::optional<Rational> delta_lemma;      // case table, for m' > 4
  std::string lemma_case;                   // "2m_bar", "4m_bar", "6m_bar", "otherwise"
  Rational delta_printed_ratio = 1;         // M'/e as printed
  bool exceeds_lemma = false;               // delta_exact > delta_lemma
};

inline MDecomposition delta_compute(std::uint32_t p, unsigned k, std::uint64_t m) {
  const BigInt q = pow_ui(BigInt(p), k);
  const MSplit s = split_m(m, p);
  MDecomposition d;
  d.m_prime = s.m_prime;
  d.j = s.j;
  const BigInt qm1 = q - 1;
  BigInt g;
  const BigInt mp = from_u64(s.m_prime);
  mpz_gcd(g.get_mpz_t(), qm1.get_mpz_t(), mp.get_mpz_t());
  d.m_bar = to_u64(g);
  d.order_e = mult_order(q, s.m_prime);
  d.M_prime = cyclotomic_cosets(q, s.m_prime).size();
  d.delta_exact = Rational(from_u64(d.M_prime), mp);
  d.delta_exact.canonicalize();
  d.delta_printed_ratio = Rational(from_u64(d.M_prime), from_u64(d.order_e));
  d.delta_printed_ratio.canonicalize();
  if (s.m_prime > 4) {
    if (s.m_prime == 2 * d.m_bar) {
      d.delta_lemma = Rational(1, 2);
      d.lemma_case = "2m_bar";
    } else if (s.m_prime == 4 * d.m_bar) {
      d.delta_lemma = Rational(3, 8);
      d.lemma_case = "4m_bar";
    } else if (s.m_prime == 6 * d.m_bar) {
      d.delta_lemma = Rational(13, 36);
      d.lemma_case = "6m_bar";
    } else {
      d.delta_lemma = Rational(1, 3);
      d.lemma_case = "otherwise";
    }
    d.exceeds_lemma = d.delta_exact > *d.delta_lemma;
  }
  return d;
}

inline void to_json(nlohmann::json& j, const MDecomposition& d) {
  j = {{"m_prime", d.m_prime},
       {"j", d.j},
       {"m_bar", d.m_bar},
       {"order_e", d.order_e},
       {"M_prime", d.M_prime},
       {"delta_exact", to_string(d.delta_exact)},
       {"delta_printed_ratio", to_string(d.delta_printed_ratio)},
       {"exceeds_lemma", d.exceeds_lemma}};
  if (d.delta_lemma) {
    j["delta_lemma"] = to_string(*d.delta_lemma);
    j["lemma_case"] = d.lemma_case;
  }
}

// ---------------------------------------------------------------------------
// Prime sieve

struct SieveInput {
  PairInstance instance;
  std::vector<BigInt> d_primes;          // primes of q^m-1 kept in d
  std::vector<BigInt> remaining_primes;  // known primes outside d
  /// Bounded mode: primes hidden in an unfactored cofactor, each >= unknown_bound.
  std::size_t unknown_primes = 0;
  BigInt unknown_bound = 0;
  bool unknown_in_d = false;
  std::vector<std::uint64_t> g_degrees;          // irreducible factors kept in g
  std::vector<std::uint64_t> remaining_degrees;  // factors outside g
};

struct SieveOptions {
  /// Carry the factor 2 only on the prime sum, as printed.
  bool printed_l_formula = false;
};

struct SieveEvaluation {
  SieveInput input;
  BigInt d = 1;
  std::size_t r = 0, s = 0;
  Rational l = 1;  // lower bound in bounded mode
  long double l_value = 1;
  std::optional<long double> lambda;
  long double lhs_log10 = 0, rhs_log10 = 0;
  bool holds = false;
  Verdict verdict = Verdict::fails;
  bool near_margin = false;
  bool printed_l_formula = false;
};

inline SieveEvaluation sieve_evaluate(const SieveInput& in, const SieveOptions& opt = {}) {
  in.instance.validate();
  SieveEvaluation ev;
  ev.input = in;
  ev.printed_l_formula = opt.printed_l_formula;
  const BigInt q = in.instance.q();
  for (const auto& p : in.d_primes) ev.d *= p;
  const bool bounded = in.unknown_primes > 0;
  if (bounded && in.unknown_bound < 2) throw InputError("bounded sieve needs a trial bound >= 2");
  ev.r = in.remaining_primes.size() + (in.unknown_in_d ? 0 : in.unknown_primes);
  ev.s = in.remaining_degrees.size();
  Rational prime_sum = 0, poly_sum = 0;
  for (const auto& p : in.remaining_primes) prime_sum += Rational(1, p);
  if (bounded && !in.unknown_in_d) prime_sum += Rational(from_u64(in.unknown_primes), in.unknown_bound);
  for (auto deg : in.remaining_degrees) poly_sum += Rational(BigInt(1), pow_ui(q, deg));
  ev.l = 1 - 2 * prime_sum - (opt.printed_l_formula ? 1 : 2) * poly_sum;
  ev.l.canonicalize();
  ev.l_value = static_cast<long double>(ev.l.get_d());
  if (ev.l > 0) {
    // (2(r+s)-1)/l + 2 with l exact; long double only at the end
    Rational lam = Rational(static_cast<long>(2 * (ev.r + ev.s)) - 1) / ev.l + 2;
    ev.lambda = static_cast<long double>(lam.get_d());
  }
  const std::size_t wd = in.d_primes.size() + (in.unknown_in_d ? in.unknown_primes : 0);
  const std::size_t wg = in.g_degrees.size();
  const long double lq = in.instance.log10_q();
  ev.lhs_log10 = (static_cast<long double>(in.instance.m) / 2 - 2) * lq;
  ev.rhs_log10 = std::log10(2.0L * in.instance.n + 1) + 2 * static_cast<long double>(wd + wg) * kLog10Two;
  if (ev.lambda) ev.rhs_log10 += std::log10(*ev.lambda);
  ev.holds = ev.lambda.has_value() && ev.lhs_log10 > ev.rhs_log10;
  ev.near_margin = ev.lambda && std::fabs(ev.lhs_log10 - ev.rhs_log10) < kMarginFlag;
  ev.verdict = ev.holds ? (bounded ? Verdict::holds_certified : Verdict::holds) : (bounded ? Verdict::inconclusive : Verdict::fails);
  return ev;
}

inline void to_json(nlohmann::json& j, const SieveEvaluation& e) {
  std::vector<std::string> dp, rp;
  for (const auto& p : e.input.d_primes) dp.push_back(to_string(p));
  for (const auto& p : e.input.remaining_primes) rp.push_back(to_string(p));
  j = {{"instance", e.input.instance},
       {"d", to_string(e.d)},
       {"d_primes", dp},
       {"remaining_primes", rp},
       {"unknown_primes", e.input.unknown_primes},
       {"g_factors", e.input.g_degrees},
       {"remaining_factors", e.input.remaining_degrees},
       {"r", e.r},
       {"s", e.s},
       {"l", static_cast<double>(e.l_value)},
       {"l_exact", to_string(e.l)},
       {"Lambda", e.lambda ? nlohmann::json(static_cast<double>(*e.lambda)) : nlohmann::json("undefined")},
       {"lhs_log10", static_cast<double>(e.lhs_log10)},
       {"rhs_log10", static_cast<double>(e.rhs_log10)},
       {"holds", e.holds},
       {"verdict", verdict_name(e.verdict)},
       {"near_margin", e.near_margin},
       {"l_formula", e.printed_l_formula ? "printed" : "doubled"}};
}

/// Builds a sieve input keeping the primes in `keep_primes` (indices into
/// fac.factors) and the factors in `keep_cosets` (indices into cf.cosets).
inline SieveInput sieve_input_from(const PairInstance& in, const IntFactorization& fac, const CycloFactorization& cf,
                                   const std::vector<std::size_t>& keep_primes,
                                   const std::vector<std::size_t>& keep_cosets, bool unknown_in_d = false) {
  SieveInput s;
  s.instance = in;
  std::vector<bool> kp(fac.factors.size(), false), kc(cf.coset_degrees.size(), false);
  for (auto i : keep_primes) kp.at(i) = true;
  for (auto i : keep_cosets) kc.at(i) = true;
  for (std::size_t i = 0; i < fac.factors.size(); ++i) (kp[i] ? s.d_primes : s.remaining_primes).push_back(fac.factors[i].prime);
  for (std::size_t i = 0; i < cf.coset_degrees.size(); ++i) (kc[i] ? s.g_degrees : s.remaining_degrees).push_back(cf.coset_degrees[i]);
  if (!fac.complete()) {
    s.unknown_primes = unknown_prime_bound(fac);
    s.unknown_bound = fac.trial_bound;
    s.unknown_in_d = unknown_in_d;
  }
  return s;
}

struct SieveBudget {
  std::size_t max_evaluations = 1'000'000;
};

struct SieveSearchResult {
  std::optional<SieveEvaluation> found;
  std::size_t evaluations = 0;
  bool budget_exhausted = false;
  bool lemma53_applicable = false;
  std::optional<SieveEvaluation> lemma53;
  bool lemma53_lambda_ok = false;  // Lambda <= 2m'
};

/// Grid search: keep the t smallest primes in d and the u smallest-degree
/// factors in g, scanning t and u downward from everything kept (g first).
/// Also evaluates the selection d = q^m - 1, g = factors of degree < e.
inline SieveSearchResult sieve_search(const PairInstance& in, const IntFactorization& fac, const CycloFactorization& cf,
                                      const SieveBudget& budget = {}) {
  SieveSearchResult res;
  // primes are stored increasing; order cosets by degree (stable)
  std::vector<std::size_t> corder(cf.coset_degrees.size());
  std::iota(corder.begin(), corder.end(), 0);
  std::stable_sort(corder.begin(), corder.end(),
                   [&](std::size_t a, std::size_t b) { return cf.coset_degrees[a] < cf.coset_degrees[b]; });
  const std::size_t w = fac.factors.size();
  const std::size_t M = corder.size();
  const long double lq = in.log10_q();
  const std::size_t hidden = fac.complete() ? 0 : unknown_prime_bound(fac);
  const long double hidden_term = hidden ? static_cast<long double>(hidden) / mpz_get_d(fac.trial_bound.get_mpz_t()) : 0;
  // tail sums for the fast scan
  std::vector<long double> prime_tail(w + 1, 0), poly_tail(M + 1, 0);
  for (std::size_t i = w; i-- > 0;) prime_tail[i] = prime_tail[i + 1] + 1.0L / mpz_get_d(fac.factors[i].prime.get_mpz_t());
  for (std::size_t i = M; i-- > 0;)
    poly_tail[i] = poly_tail[i + 1] + std::pow(10.0L, -lq * static_cast<long double>(cf.coset_degrees[corder[i]]));
  const long double lhs = (static_cast<long double>(in.m) / 2 - 2) * lq;
  const long double c0 = std::log10(2.0L * in.n + 1);
  for (std::size_t t = w + 1; t-- > 0 && !res.found;) {
    for (std::size_t u = M + 1; u-- > 0;) {
      if (res.evaluations >= budget.max_evaluations) {
        res.budget_exhausted = true;
        break;
      }
      ++res.evaluations;
      const long double l = 1 - 2 * (prime_tail[t] + hidden_term) - 2 * poly_tail[u];
      if (l <= 0) continue;
      const std::size_t r = (w - t) + hidden, s = M - u;
      const long double lam = (2.0L * (r + s) - 1) / l + 2;
      const long double rhs = c0 + 2 * static_cast<long double>(t + u) * kLog10Two + std::log10(lam);
      if (lhs - rhs <= 1e-9L) continue;
      std::vector<std::size_t> kp(t), kc(u);
      std::iota(kp.begin(), kp.end(), 0);
      for (std::size_t i = 0; i < u; ++i) kc[i] = corder[i];
      SieveEvaluation ev = sieve_evaluate(sieve_input_from(in, fac, cf, kp, kc));
      if (ev.holds) {
        res.found = std::move(ev);
        break;
      }
    }
    if (res.budget_exhausted) break;
  }
  // selection with every prime in d and g = factors of degree below e
  const std::uint64_t e = cf.m_prime == 1 ? 1 : mult_order(cf.q, cf.m_prime);
  const BigInt qm1 = cf.q - 1;
  res.lemma53_applicable = e > 2 && !mpz_divisible_ui_p(qm1.get_mpz_t(), cf.m_prime);
  if (res.lemma53_applicable) {
    std::vector<std::size_t> kp(w), kc;
    std::iota(kp.begin(), kp.end(), 0);
    for (std::size_t i = 0; i < cf.coset_degrees.size(); ++i)
      if (cf.coset_degrees[i] < e) kc.push_back(i);
    SieveEvaluation ev = sieve_evaluate(sieve_input_from(in, fac, cf, kp, kc, true));
    res.lemma53_lambda_ok = ev.lambda && *ev.lambda <= 2.0L * static_cast<long double>(cf.m_prime);
    if (!res.found && ev.holds) res.found = ev;
    res.lemma53 = std::move(ev);
  }
  return res;
}

}  // namespace pnpair
