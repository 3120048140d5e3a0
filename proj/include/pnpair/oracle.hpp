#pragma once

// Brute-force ground truth on small fields: freeness predicates, trace
// constrained pair counts, the characteristic functions written as
// character sums, and numeric checks of the two character-sum bounds.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pnpair/cyclotomic.hpp"
#include "pnpair/errors.hpp"
#include "pnpair/ext_field.hpp"
#include "pnpair/numtheory.hpp"
#include "pnpair/ratfunc.hpp"
#include "pnpair/small_field.hpp"

namespace pnpair {

inline constexpr double kIndicatorTolerance = 1e-6;

/// The x^m - 1 factorization a field needs for g-freeness tests.
struct ModuleData {
  BasePoly xm1;
  std::vector<BasePoly> factors;  // distinct irreducible, monic
  std::vector<unsigned> multiplicity;
};

inline ModuleData module_data(const FieldContext& F, std::uint64_t seed = 1) {
  ModuleData md{BasePoly::x_pow_minus_one(F.base_ptr(), F.m()), {}, {}};
  for (auto& [h, e] : md.xm1.factor(seed)) {
    md.factors.push_back(h);
    md.multiplicity.push_back(e);
  }
  return md;
}

/// e as a set of primes dividing q^m - 1; g as a subset of the distinct
/// irreducible factors of x^m - 1. Only the radicals matter for freeness.
struct FreenessSpec {
  std::vector<BigInt> e_primes;
  std::vector<std::size_t> g_factors;  // indices into ModuleData::factors

  static FreenessSpec trivial() { return {}; }
  static FreenessSpec full(const FieldContext& F, const ModuleData& md) {
    const auto& fac = F.order_factorization();
    if (!fac || !fac->complete()) throw IncompleteFactorization("q^m - 1 for a full freeness spec");
    FreenessSpec s;
    s.e_primes = fac->primes();
    for (std::size_t i = 0; i < md.factors.size(); ++i) s.g_factors.push_back(i);
    return s;
  }
  /// From explicit e | q^m - 1 and monic g | x^m - 1.
  static FreenessSpec make(const FieldContext& F, const ModuleData& md, const BigInt& e, const BasePoly& g) {
    if (e <= 0 || (F.order() - 1) % e != 0) throw InputError("e must divide q^m - 1");
    if (g.is_zero() || !(md.xm1 % g).is_zero()) throw InputError("g must divide x^m - 1");
    FreenessSpec s;
    const auto& fac = F.order_factorization();
    if (!fac || !fac->complete()) throw IncompleteFactorization("q^m - 1 for a freeness spec");
    for (const auto& pr : fac->primes()) {
      if (e % pr == 0) s.e_primes.push_back(pr);
    }
    for (std::size_t i = 0; i < md.factors.size(); ++i) {
      if ((g % md.factors[i]).is_zero()) s.g_factors.push_back(i);
    }
    return s;
  }
};

// Generic predicates on FieldElement.

inline bool is_e_free(const FieldContext& F, const FieldElement& x, const std::vector<BigInt>& e_primes) {
  if (F.is_zero(x)) throw InputError("freeness is undefined at 0");
  const BigInt n = F.order() - 1;
  for (const auto& l : e_primes) {
    if (n % l != 0) throw InputError("prime " + to_string(l) + " does not divide q^m - 1");
    if (F.pow(x, n / l) == F.one()) return false;
  }
  return true;
}

inline bool is_primitive(const FieldContext& F, const FieldElement& x) {
  const auto& fac = F.order_factorization();
  if (!fac || !fac->complete()) throw IncompleteFactorization("q^m - 1 for primitivity test");
  return is_e_free(F, x, fac->primes());
}

inline bool is_g_free(const FieldContext& F, const FieldElement& x, const ModuleData& md,
                      const std::vector<std::size_t>& g_factors) {
  for (auto i : g_factors) {
    if (F.is_zero(F.module_action(md.xm1 / md.factors.at(i), x))) return false;
  }
  return true;
}

/// g given as a monic divisor of x^m - 1.
inline bool is_g_free(const FieldContext& F, const FieldElement& x, const BasePoly& g, std::uint64_t seed = 1) {
  const ModuleData md = module_data(F, seed);
  if (g.is_zero() || !(md.xm1 % g).is_zero()) throw InputError("g must divide x^m - 1");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < md.factors.size(); ++i) {
    if ((g % md.factors[i]).is_zero()) idx.push_back(i);
  }
  return is_g_free(F, x, md, idx);
}

inline bool is_normal(const FieldContext& F, const FieldElement& x, const ModuleData& md) {
  std::vector<std::size_t> all(md.factors.size());
  std::iota(all.begin(), all.end(), 0);
  return is_g_free(F, x, md, all);
}

inline bool is_normal(const FieldContext& F, const FieldElement& x) { return is_normal(F, x, module_data(F)); }

/// Fast predicates on logs for a fixed spec.
class FreenessTester {
 public:
  FreenessTester(const SmallField& sf, const ModuleData& md, const FreenessSpec& spec) : sf_(&sf) {
    for (const auto& l : spec.e_primes) {
      if (l > sf.order()) throw InputError("prime exceeds q^m - 1");
      const std::uint32_t v = static_cast<std::uint32_t>(l.get_ui());
      if (sf.order() % v) throw InputError("prime does not divide q^m - 1");
      e_primes_.push_back(v);
    }
    for (auto i : spec.g_factors) maps_.push_back(LinearMap::module_action(sf, md.xm1 / md.factors.at(i)));
  }

  bool e_free(SmallField::Log a) const {
    if (a == SmallField::kZero) return false;
    for (auto l : e_primes_) {
      if (a % l == 0) return false;
    }
    return true;
  }
  bool g_free(SmallField::Log a) const {
    if (maps_.empty()) return true;
    std::uint32_t d[64];
    sf_->digits(a, d);
    for (const auto& M : maps_) {
      if (!M.nonzero_image(d)) return false;
    }
    return true;
  }
  /// Freeness at 0 is undefined; 0 only passes a fully trivial spec.
  bool free(SmallField::Log a) const {
    if (a == SmallField::kZero) return e_primes_.empty() && maps_.empty();
    return e_free(a) && g_free(a);
  }
  bool trivial() const { return e_primes_.empty() && maps_.empty(); }

 private:
  const SmallField* sf_;
  std::vector<std::uint32_t> e_primes_;
  std::vector<LinearMap> maps_;
};

/// Coefficients of a polynomial over F_{q^m} as logs, low to high.
inline std::vector<SmallField::Log> poly_logs(const SmallField& sf, const ExtPoly& f) {
  std::vector<SmallField::Log> r;
  for (const auto& c : f.coeffs()) r.push_back(sf.log_of(c));
  return r;
}

inline SmallField::Log eval_logs(const SmallField& sf, const std::vector<SmallField::Log>& c, SmallField::Log x) {
  SmallField::Log r = SmallField::kZero;
  for (std::size_t i = c.size(); i-- > 0;) r = sf.add(sf.mul(r, x), c[i]);
  return r;
}

struct PairCountResult {
  std::uint64_t count = 0;
  std::optional<FieldElement> witness;
  std::uint64_t scanned = 0;
};

/// Counts for every (a, b) in F_q x F_q from one scan.
struct PairCountTable {
  std::uint32_t q = 0;
  std::uint64_t scanned = 0;
  std::vector<std::uint64_t> counts;           // a * q + b
  std::vector<SmallField::Log> witness;        // least exponent, or kZero
  std::uint64_t at(std::uint32_t a, std::uint32_t b) const { return counts.at(std::size_t{a} * q + b); }
};

/// Scans F_{q^m} \ S once. ε = γ^L runs over L in [0, q^m - 1) split into
/// `jobs` contiguous ranges; results do not depend on jobs.
inline PairCountTable count_pairs_table(const SmallField& sf, const ModuleData& md, const RationalFunction& f,
                                        const FreenessSpec& spec1, const FreenessSpec& spec2, unsigned jobs = 1) {
  if (f.f1.is_zero()) throw InputError("count_pairs needs a nonzero rational function");
  if (!f.ctx().same_as(sf.ctx())) throw InputError("rational function over another field");
  const FreenessTester t1(sf, md, spec1), t2(sf, md, spec2);
  const auto c1 = poly_logs(sf, f.f1), c2 = poly_logs(sf, f.f2);
  const SmallField::Log lead = sf.log_of(f.lead);
  const std::uint32_t q = sf.q(), n = sf.order();
  jobs = std::max(1u, std::min<unsigned>(jobs, 256));

  struct Local {
    std::vector<std::uint64_t> counts;
    std::vector<SmallField::Log> witness;
    std::uint64_t scanned = 0;
  };
  std::vector<Local> locals(jobs);
  auto work = [&](unsigned j) {
    Local& loc = locals[j];
    loc.counts.assign(std::size_t{q} * q, 0);
    loc.witness.assign(std::size_t{q} * q, SmallField::kZero);
    const std::uint64_t lo = std::uint64_t{n} * j / jobs, hi = std::uint64_t{n} * (j + 1) / jobs;
    for (std::uint64_t L = lo; L < hi; ++L) {
      const auto x = static_cast<SmallField::Log>(L);
      const auto v1 = eval_logs(sf, c1, x);
      const auto v2 = eval_logs(sf, c2, x);
      if (v1 == SmallField::kZero || v2 == SmallField::kZero) continue;  // x in S
      ++loc.scanned;
      if (!t1.e_free(x)) continue;
      const auto fx = sf.mul(lead, sf.div(v1, v2));
      if (!t2.e_free(fx)) continue;
      if (!t1.g_free(x) || !t2.g_free(fx)) continue;
      const std::size_t cell = std::size_t{sf.trace(x)} * q + sf.trace(fx);
      if (loc.counts[cell]++ == 0) loc.witness[cell] = x;
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> th;
    for (unsigned j = 0; j < jobs; ++j) th.emplace_back(work, j);
    for (auto& t : th) t.join();
  }
  PairCountTable tab;
  tab.q = q;
  tab.counts.assign(std::size_t{q} * q, 0);
  tab.witness.assign(std::size_t{q} * q, SmallField::kZero);
  for (const auto& loc : locals) {  // ranges are ascending, so the first hit is the least
    tab.scanned += loc.scanned;
    for (std::size_t c = 0; c < tab.counts.size(); ++c) {
      tab.counts[c] += loc.counts[c];
      if (tab.witness[c] == SmallField::kZero) tab.witness[c] = loc.witness[c];
    }
  }
  return tab;
}

/// Re-checks a witness through the generic FieldElement path.
inline bool verify_pair_witness(const FieldContext& F, const ModuleData& md, const RationalFunction& f,
                                const FreenessSpec& spec1, const FreenessSpec& spec2, const FieldElement& x,
                                std::optional<std::uint32_t> a, std::optional<std::uint32_t> b) {
  if (F.is_zero(x)) return false;
  if (F.is_zero(f.f1.evaluate(x))) return false;
  const auto fx = evaluate(f, x);
  if (!fx || F.is_zero(*fx)) return false;
  if (!is_e_free(F, x, spec1.e_primes) || !is_g_free(F, x, md, spec1.g_factors)) return false;
  if (!is_e_free(F, *fx, spec2.e_primes) || !is_g_free(F, *fx, md, spec2.g_factors)) return false;
  if (a && F.trace_to_base(x) != *a) return false;
  if (b && F.trace_to_base(*fx) != *b) return false;
  return true;
}

/// N_{f,a,b}(e1, e2, g1, g2); nullopt for a or b leaves that trace free.
inline PairCountResult count_pairs(const SmallField& sf, const ModuleData& md, const RationalFunction& f,
                                   std::optional<std::uint32_t> a, std::optional<std::uint32_t> b,
                                   const FreenessSpec& spec1, const FreenessSpec& spec2, unsigned jobs = 1) {
  const std::uint32_t q = sf.q();
  if ((a && *a >= q) || (b && *b >= q)) throw InputError("trace target outside F_q");
  const PairCountTable tab = count_pairs_table(sf, md, f, spec1, spec2, jobs);
  PairCountResult r;
  r.scanned = tab.scanned;
  SmallField::Log best = SmallField::kZero;
  for (std::uint32_t i = 0; i < q; ++i) {
    if (a && i != *a) continue;
    for (std::uint32_t j = 0; j < q; ++j) {
      if (b && j != *b) continue;
      const std::size_t c = std::size_t{i} * q + j;
      r.count += tab.counts[c];
      if (tab.witness[c] != SmallField::kZero && (best == SmallField::kZero || tab.witness[c] < best)) {
        best = tab.witness[c];
      }
    }
  }
  if (best != SmallField::kZero) {
    r.witness = sf.element(best);
    if (!verify_pair_witness(sf.ctx(), md, f, spec1, spec2, *r.witness, a, b)) {
      throw IntegrityError("pair witness failed independent re-verification");
    }
  }
  return r;
}

/// Convenience overload that builds the small field; enforces the scan budget.
inline PairCountResult count_pairs(const FieldPtr& ctx, const RationalFunction& f, std::optional<std::uint32_t> a,
                                   std::optional<std::uint32_t> b, const FreenessSpec& spec1,
                                   const FreenessSpec& spec2, unsigned jobs = 1,
                                   std::uint64_t budget = kDlogLimit) {
  if (ctx->order() > from_u64(budget)) {
    throw ResourceError("pair count needs a scan of " + to_string(ctx->order()) + " elements, budget " +
                        std::to_string(budget));
  }
  const SmallField sf(ctx, budget);
  return count_pairs(sf, module_data(*ctx), f, a, b, spec1, spec2, jobs);
}

// Characters.

struct CharacteristicValue {
  long double re = 0, im = 0;
  int value = 0;
  long double residual = 0;
};

inline CharacteristicValue round_indicator(std::complex<long double> z) {
  CharacteristicValue v;
  v.re = z.real();
  v.im = z.imag();
  v.value = static_cast<int>(std::llround(static_cast<double>(z.real())));
  v.residual = std::max(std::fabs(z.real() - v.value), std::fabs(z.imag()));
  if (v.residual >= kIndicatorTolerance) {
    throw IntegrityError("character sum residual " + std::to_string(static_cast<double>(v.residual)) +
                         " above tolerance");
  }
  return v;
}

inline std::complex<long double> unit_root(std::uint64_t num, std::uint64_t den) {
  const long double pi = 3.141592653589793238462643383279502884L;
  const long double t = 2 * pi * static_cast<long double>(num % den) / static_cast<long double>(den);
  return {std::cos(t), std::sin(t)};
}

/// Multiplicative characters χ(γ^L) = exp(2πi jL/d) for d | q^m - 1, and
/// additive characters ψ_v(y) = exp(2πi Tr(vy)/p) together with the
/// F_q-order of each ψ_v.
class CharacterSystem {
 public:
  static constexpr std::uint64_t kLimit = std::uint64_t{1} << 16;

  CharacterSystem(const SmallField& sf, const ModuleData& md) : sf_(&sf), md_(&md) {
    const std::uint64_t Q = std::uint64_t{sf.order()} + 1;
    if (Q > kLimit) throw ResourceError("character system limited to fields of size " + std::to_string(kLimit));
    const FieldContext& F = sf.ctx();
    const unsigned dims = sf.dims();
    std::vector<FieldElement> basis;
    std::uint64_t unit = 1;
    for (unsigned b = 0; b < dims; ++b, unit *= sf.p()) basis.push_back(F.from_index(unit));

    // images H o y_b for each exponent vector H that comes up
    std::map<std::vector<unsigned>, std::vector<SmallField::Log>> images;
    auto image_of = [&](const std::vector<unsigned>& ex) -> const std::vector<SmallField::Log>& {
      auto it = images.find(ex);
      if (it != images.end()) return it->second;
      BasePoly H = BasePoly::one(F.base_ptr());
      for (std::size_t i = 0; i < ex.size(); ++i) {
        for (unsigned t = 0; t < ex[i]; ++t) H = H * md.factors[i];
      }
      std::vector<SmallField::Log> img;
      for (const auto& y : basis) img.push_back(sf.log_of(F.module_action(H, y)));
      return images.emplace(ex, std::move(img)).first->second;
    };
    auto annihilates = [&](SmallField::Log v, const std::vector<unsigned>& ex) {
      for (auto z : image_of(ex)) {
        if (sf.abs_trace(sf.mul(v, z)) != 0) return false;
      }
      return true;
    };
    order_.resize(Q);
    for (std::uint64_t idx = 0; idx < Q; ++idx) {
      const SmallField::Log v = sf.log_of_index(idx);
      std::vector<unsigned> ex = md.multiplicity;
      for (std::size_t i = 0; i < ex.size(); ++i) {
        while (ex[i] > 0) {
          --ex[i];
          if (!annihilates(v, ex)) {
            ++ex[i];
            break;
          }
        }
      }
      order_[idx] = ex;
    }
  }

  const SmallField& field() const { return *sf_; }

  /// χ_{d,j}(x) with χ(0) = 0 unless d = 1.
  std::complex<long double> chi(std::uint64_t d, std::uint64_t j, SmallField::Log x) const {
    if (sf_->order() % d) throw InputError("character order must divide q^m - 1");
    if (x == SmallField::kZero) return d == 1 ? 1.0L : 0.0L;
    return unit_root(static_cast<unsigned __int128>(j) * x % d, d);
  }

  /// ψ_v(y) for the log of v.
  std::complex<long double> psi(SmallField::Log v, SmallField::Log y) const {
    return unit_root(sf_->abs_trace(sf_->mul(v, y)), sf_->p());
  }

  /// F_q-order of ψ_v as exponents over ModuleData::factors.
  const std::vector<unsigned>& additive_order(std::uint64_t v_index) const { return order_.at(v_index); }

  /// Number of additive characters of each F_q-order, keyed by exponents.
  std::map<std::vector<unsigned>, std::uint64_t> order_census() const {
    std::map<std::vector<unsigned>, std::uint64_t> c;
    for (const auto& o : order_) ++c[o];
    return c;
  }

 private:
  const SmallField* sf_;
  const ModuleData* md_;
  std::vector<std::vector<unsigned>> order_;
};

/// θ(e) Σ_{d|e} μ(d)/φ(d) Σ_{χ of order d} χ(x); e given by its primes.
inline CharacteristicValue characteristic_rho(const CharacterSystem& cs, SmallField::Log x,
                                              const std::vector<std::uint64_t>& e_primes) {
  if (x == SmallField::kZero) throw InputError("rho is defined on nonzero elements");
  std::complex<long double> total = 0;
  const std::size_t r = e_primes.size();
  long double theta = 1;
  for (auto l : e_primes) theta *= 1.0L - 1.0L / static_cast<long double>(l);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << r); ++mask) {
    std::uint64_t d = 1, phi = 1;
    int sign = 1;
    for (std::size_t i = 0; i < r; ++i) {
      if (mask >> i & 1) {
        d *= e_primes[i];
        phi *= e_primes[i] - 1;
        sign = -sign;
      }
    }
    std::complex<long double> s = 0;
    for (std::uint64_t j = 1; j <= d; ++j) {
      if (std::gcd(j, d) == 1) s += cs.chi(d, j % d, x);
    }
    total += static_cast<long double>(sign) / static_cast<long double>(phi) * s;
  }
  return round_indicator(theta * total);
}

/// Θ(g) Σ_{h|g} μ'(h)/Φ(h) Σ_{ψ of F_q-order h} ψ(x); g given as a subset of
/// the distinct irreducible factors (only its radical enters).
inline CharacteristicValue characteristic_eta(const CharacterSystem& cs, const ModuleData& md, SmallField::Log x,
                                              const std::vector<std::size_t>& g_factors) {
  const SmallField& sf = cs.field();
  const long double q = sf.q();
  std::vector<bool> in_g(md.factors.size(), false);
  for (auto i : g_factors) in_g.at(i) = true;
  long double theta = 1;
  for (auto i : g_factors) theta *= 1.0L - std::pow(q, -static_cast<long double>(md.factors[i].degree()));
  std::complex<long double> total = 0;
  const std::uint64_t Q = std::uint64_t{sf.order()} + 1;
  for (std::uint64_t idx = 0; idx < Q; ++idx) {
    const auto& o = cs.additive_order(idx);
    bool ok = true;
    int sign = 1;
    long double Phi = 1;
    for (std::size_t i = 0; i < o.size() && ok; ++i) {
      if (o[i] == 0) continue;
      if (o[i] > 1 || !in_g[i]) ok = false;
      sign = -sign;
      Phi *= std::pow(q, static_cast<long double>(md.factors[i].degree())) - 1;
    }
    if (!ok) continue;
    total += static_cast<long double>(sign) / Phi * cs.psi(sf.log_of_index(idx), x);
  }
  return round_indicator(theta * total);
}

/// (1/q) Σ_{u in F_q} ψ_u(Tr(x) - a) with ψ_u(c) = exp(2πi Tr_{F_q/F_p}(uc)/p).
inline CharacteristicValue characteristic_tau(const SmallField& sf, SmallField::Log x, std::uint32_t a) {
  const BaseField& B = sf.ctx().base();
  if (a >= B.size()) throw InputError("trace target outside F_q");
  const std::uint32_t c = B.sub(sf.trace(x), a);
  std::complex<long double> s = 0;
  for (std::uint32_t u = 0; u < B.size(); ++u) s += unit_root(B.abs_trace(B.mul(u, c)), B.characteristic());
  return round_indicator(s / static_cast<long double>(B.size()));
}

// Bound checks.

struct SumCheck {
  std::string check;
  bool applicable = true;
  std::string reason;
  long double magnitude = 0;  // largest |sum| over the characters tested
  long double bound = 0;
  bool pass = true;
  bool hypothesis_verified = true;
  std::uint64_t characters = 0;
};

inline nlohmann::json to_json(const SumCheck& s) {
  nlohmann::json j = {{"check", s.check}, {"applicable", s.applicable}, {"characters", s.characters}};
  if (!s.applicable) {
    j["reason"] = s.reason;
    return j;
  }
  j["value"] = static_cast<double>(s.magnitude);
  j["bound"] = static_cast<double>(s.bound);
  j["pass"] = s.pass;
  j["hypothesis_verified"] = s.hypothesis_verified;
  return j;
}

struct FactorShape {
  std::vector<std::pair<ExtPoly, int>> factors;  // numerator positive, denominator negative
};

inline FactorShape factor_shape(const RationalFunction& f, std::uint64_t seed = 1) {
  FactorShape s;
  if (!f.f1.is_zero() && f.f1.degree() > 0) {
    for (auto& [h, e] : f.f1.factor(seed)) s.factors.emplace_back(h, static_cast<int>(e));
  }
  if (f.f2.degree() > 0) {
    for (auto& [h, e] : f.f2.factor(seed)) s.factors.emplace_back(h, -static_cast<int>(e));
  }
  return s;
}

inline long double sqrt_qm(const SmallField& sf) {
  return std::sqrt(static_cast<long double>(sf.order()) + 1.0L);
}

/// Max over characters χ of exact order d of |Σ_{f(α) ≠ 0, ∞} χ(f(α))|
/// against (Σ deg f_j - 1) q^{m/2}.
inline SumCheck weil_sum_check(const CharacterSystem& cs, const RationalFunction& f, std::uint64_t d,
                               std::uint64_t seed = 1) {
  const SmallField& sf = cs.field();
  SumCheck r;
  r.check = "weil";
  if (d <= 1 || sf.order() % d) {
    r.applicable = false;
    r.reason = d <= 1 ? "trivial character" : "order does not divide q^m - 1";
    return r;
  }
  for (const auto& pr : factor(d).factors) {
    if (pr.exponent > 1) {
      r.applicable = false;
      r.reason = "order not squarefree";
      return r;
    }
  }
  if (f.f1.is_zero()) {
    r.applicable = false;
    r.reason = "zero function";
    return r;
  }
  const FactorShape sh = factor_shape(f, seed);
  std::uint64_t g = 0;
  long deg = 0;
  for (const auto& [h, e] : sh.factors) {
    g = std::gcd(g, static_cast<std::uint64_t>(std::abs(e)));
    deg += h.degree();
  }
  if (g % d == 0) {
    r.applicable = false;
    r.reason = "function is a constant times a d-th power";
    return r;
  }
  r.bound = static_cast<long double>(deg - 1) * sqrt_qm(sf);
  std::vector<SmallField::Log> vals;
  const FieldContext& F = sf.ctx();
  const std::uint64_t Q = std::uint64_t{sf.order()} + 1;
  for (std::uint64_t idx = 0; idx < Q; ++idx) {
    const auto v = evaluate(f, F.from_index(idx));
    if (!v || F.is_zero(*v)) continue;
    vals.push_back(sf.log_of(*v));
  }
  for (std::uint64_t j = 1; j < d; ++j) {
    if (std::gcd(j, d) != 1) continue;
    std::complex<long double> s = 0;
    for (auto L : vals) s += cs.chi(d, j, L);
    r.magnitude = std::max(r.magnitude, std::abs(s));
    ++r.characters;
  }
  r.pass = r.magnitude <= r.bound + kIndicatorTolerance;
  return r;
}

/// |Σ_{α ∉ S} χ(f(α)) ψ_v(g(α))| against [deg g_∞ + l0 + l1 - l2 - 2] q^{m/2}
/// for χ = χ_{d,j} and the additive character ψ_v.
inline SumCheck castro_sum_check(const CharacterSystem& cs, const RationalFunction& f, const RationalFunction& g,
                                 std::uint64_t d, std::uint64_t j, const FieldElement& v, std::uint64_t seed = 1) {
  const SmallField& sf = cs.field();
  const FieldContext& F = sf.ctx();
  SumCheck r;
  r.check = "castro";
  r.characters = 1;
  if (d <= 1 || sf.order() % d || std::gcd(j, d) != 1) {
    r.applicable = false;
    r.reason = "multiplicative character not of exact order d > 1";
    return r;
  }
  if (F.is_zero(v)) {
    r.applicable = false;
    r.reason = "trivial additive character";
    return r;
  }
  if (f.f1.is_zero()) {
    r.applicable = false;
    r.reason = "zero function";
    return r;
  }
  const FactorShape fs = factor_shape(f, seed);
  std::uint64_t mg = 0;
  for (const auto& [h, e] : fs.factors) mg = std::gcd(mg, static_cast<std::uint64_t>(std::abs(e)));
  if (mg % d == 0) {
    r.applicable = false;
    r.reason = "f is a constant times a d-th power";
    return r;
  }
  const FactorShape gs = factor_shape(g, seed);
  long deg_inf = 0, l0 = 0, l1 = 0, l2 = 0;
  bool coprime_pole = false;
  const long excess = g.f1.is_zero() ? 0 : g.n1() - g.n2();
  for (const auto& [h, e] : gs.factors) {
    if (e < 0) {
      deg_inf += h.degree() * (-e);
      l1 += h.degree();
      if ((-e) % static_cast<long>(sf.p())) coprime_pole = true;
    }
  }
  if (excess > 0) {
    deg_inf += excess;
    l1 += 1;
    if (excess % static_cast<long>(sf.p())) coprime_pole = true;
  }
  for (const auto& [h, e] : fs.factors) {
    l0 += h.degree();
    if (e > 0) continue;
    for (const auto& [h2, e2] : gs.factors) {
      if (h2 == h) {
        l2 += h.degree();
        break;
      }
    }
  }
  r.hypothesis_verified = coprime_pole;
  r.bound = static_cast<long double>(deg_inf + l0 + l1 - l2 - 2) * sqrt_qm(sf);
  const SmallField::Log vl = sf.log_of(v);
  std::complex<long double> s = 0;
  const std::uint64_t Q = std::uint64_t{sf.order()} + 1;
  for (std::uint64_t idx = 0; idx < Q; ++idx) {
    const FieldElement a = F.from_index(idx);
    const auto fa = evaluate(f, a);
    const auto ga = evaluate(g, a);
    if (!fa || !ga) continue;
    s += cs.chi(d, j, sf.log_of(*fa)) * cs.psi(vl, sf.log_of(*ga));
  }
  r.magnitude = std::abs(s);
  r.pass = r.magnitude <= r.bound + kIndicatorTolerance;
  return r;
}

// Count identities.

struct CountIdentity {
  std::string kind;  // "e_free", "g_free", "trace"
  std::string label;
  std::uint64_t observed = 0;
  Rational expected = 0;
  bool pass = false;
};

/// #e-free = θ(e)(q^m - 1) for all e | q^m - 1, #g-free = Θ(g) q^m for all
/// g | x^m - 1 and #{Tr = a} = q^{m-1}.
inline std::vector<CountIdentity> count_identities(const SmallField& sf, const ModuleData& md) {
  std::vector<CountIdentity> out;
  const FieldContext& F = sf.ctx();
  const auto& fac = F.order_factorization();
  if (!fac || !fac->complete()) throw IncompleteFactorization("q^m - 1 for count identities");
  const std::uint32_t n = sf.order();
  const std::uint64_t Q = std::uint64_t{n} + 1;
  const BigInt qb = BigInt(sf.q());

  // e | q^m - 1, enumerated through exponent vectors
  std::vector<std::pair<std::uint64_t, unsigned>> pf;
  for (const auto& pp : fac->factors) pf.emplace_back(to_u64(pp.prime), pp.exponent);
  std::vector<unsigned> ex(pf.size(), 0);
  for (;;) {
    std::uint64_t e = 1;
    Rational theta = 1;
    std::vector<std::uint64_t> primes;
    for (std::size_t i = 0; i < pf.size(); ++i) {
      for (unsigned t = 0; t < ex[i]; ++t) e *= pf[i].first;
      if (ex[i]) {
        primes.push_back(pf[i].first);
        theta *= Rational(BigInt(from_u64(pf[i].first - 1)), BigInt(from_u64(pf[i].first)));
      }
    }
    std::uint64_t cnt = 0;
    for (std::uint32_t L = 0; L < n; ++L) {
      bool ok = true;
      for (auto l : primes) {
        if (L % l == 0) {
          ok = false;
          break;
        }
      }
      cnt += ok;
    }
    CountIdentity ci{"e_free", "e=" + std::to_string(e), cnt, theta * Rational(from_u64(n)), false};
    ci.expected.canonicalize();
    ci.pass = Rational(from_u64(cnt)) == ci.expected;
    out.push_back(ci);
    std::size_t i = 0;
    while (i < ex.size() && ex[i] == pf[i].second) ex[i++] = 0;
    if (i == ex.size()) break;
    ++ex[i];
  }

  // per element, the mask of P with (x^m-1)/P o x != 0
  const std::size_t r = md.factors.size();
  std::vector<LinearMap> maps;
  for (const auto& P : md.factors) maps.push_back(LinearMap::module_action(sf, md.xm1 / P));
  std::vector<std::uint64_t> by_mask(std::size_t{1} << r, 0);
  std::vector<std::uint64_t> by_trace(sf.q(), 0);
  std::uint32_t d[64];
  for (std::uint64_t idx = 0; idx < Q; ++idx) {
    const auto L = sf.log_of_index(idx);
    sf.digits(L, d);
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < r; ++i) {
      if (maps[i].nonzero_image(d)) mask |= std::uint64_t{1} << i;
    }
    ++by_mask[mask];
    ++by_trace[sf.trace(L)];
  }
  std::vector<unsigned> gx(r, 0);
  for (;;) {
    std::uint64_t need = 0;
    std::vector<std::pair<std::uint64_t, unsigned>> pattern;
    std::string label;
    for (std::size_t i = 0; i < r; ++i) {
      if (gx[i]) need |= std::uint64_t{1} << i;
      pattern.emplace_back(md.factors[i].degree(), gx[i]);
      if (gx[i]) label += "(" + md.factors[i].to_string() + ")^" + std::to_string(gx[i]);
    }
    std::uint64_t cnt = 0;
    for (std::uint64_t mask = 0; mask < by_mask.size(); ++mask) {
      if ((mask & need) == need) cnt += by_mask[mask];
    }
    const PolyDivisorStats st = divisor_stats_from_pattern(qb, pattern);
    CountIdentity ci{"g_free", label.empty() ? "g=1" : "g=" + label, cnt, st.Theta * Rational(from_u64(Q)), false};
    ci.expected.canonicalize();
    ci.pass = Rational(from_u64(cnt)) == ci.expected;
    out.push_back(ci);
    std::size_t i = 0;
    while (i < gx.size() && gx[i] == md.multiplicity[i]) gx[i++] = 0;
    if (i == gx.size()) break;
    ++gx[i];
  }

  const std::uint64_t fiber = Q / sf.q();
  for (std::uint32_t a = 0; a < sf.q(); ++a) {
    CountIdentity ci{"trace", "a=" + F.base().format(a), by_trace[a], Rational(from_u64(fiber)), false};
    ci.pass = by_trace[a] == fiber;
    out.push_back(ci);
  }
  return out;
}

/// {check, instance, parameters, value, bound, pass, residual}
inline nlohmann::json oracle_report(const std::string& check, const FieldContext& F, nlohmann::json parameters,
                                    nlohmann::json value, nlohmann::json bound, bool pass, double residual) {
  return {{"check", check},
          {"instance", {{"p", F.characteristic()}, {"k", F.base().degree()}, {"m", F.m()}}},
          {"parameters", std::move(parameters)},
          {"value", std::move(value)},
          {"bound", std::move(bound)},
          {"pass", pass},
          {"residual", residual}};
}

}  // namespace pnpair
