#pragma once

// The exceptional-pair search for q = p^k, degree sum n: a threshold pass
// through the W(t) < D t^(1/nu) forms, then the sufficient condition and the
// prime sieve on every surviving (q, m).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "pnpair/criteria.hpp"
#include "pnpair/cyclotomic.hpp"
#include "pnpair/errors.hpp"
#include "pnpair/numtheory.hpp"

namespace pnpair {

// ---------------------------------------------------------------------------
// Reference data (audit only)

struct Table1Reference {
  Table1Row row;
  std::uint64_t m_k = 0;
};

struct Table2Row {
  std::uint64_t q = 0;
  std::uint64_t m = 0;
  BigInt d = 1;
  std::size_t r = 0;
  std::string g;
  std::size_t g_linear = 0;
  std::size_t s = 0;
  // printed values, present only for reference rows
  bool printed = false;
  double l = 0;
  double L = 0;
};

struct ReferenceData {
  std::uint32_t p = 5;
  unsigned n = 4;
  std::vector<Table1Reference> table1;
  std::vector<Table2Row> table2;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> exception_pairs;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> nominated_extra;
  std::uint64_t k_ge_3_candidates = 0;
  nlohmann::json thresholds;
  nlohmann::json printed_lists;

  std::vector<Table1Row> table1_rows() const {
    std::vector<Table1Row> r;
    for (const auto& t : table1) r.push_back(t.row);
    return r;
  }
};

inline ReferenceData parse_reference(const nlohmann::json& j) {
  ReferenceData ref;
  try {
    ref.p = j.value("p", 5u);
    ref.n = j.value("n", 4u);
    for (const auto& t : j.at("table1")) {
      Table1Reference r;
      r.row.nu = t.at("nu").get<double>();
      r.row.k_lo = t.at("k_lo").get<std::uint64_t>();
      r.row.k_hi = t.at("k_hi").get<std::uint64_t>();
      r.m_k = t.at("m_k").get<std::uint64_t>();
      ref.table1.push_back(r);
    }
    for (const auto& t : j.at("table2")) {
      Table2Row r;
      r.q = t.at("q").get<std::uint64_t>();
      r.m = t.at("m").get<std::uint64_t>();
      r.d = BigInt(t.at("d").get<std::string>());
      r.r = t.at("r").get<std::size_t>();
      r.g = t.at("g").get<std::string>();
      r.g_linear = t.at("g_linear").get<std::size_t>();
      r.s = t.at("s").get<std::size_t>();
      r.l = t.at("l").get<double>();
      r.L = t.at("L").get<double>();
      r.printed = true;
      ref.table2.push_back(r);
    }
    for (const auto& pr : j.at("exception_pairs")) ref.exception_pairs.emplace_back(pr.at(0), pr.at(1));
    for (const auto& pr : j.value("nominated_extra", nlohmann::json::array()))
      ref.nominated_extra.emplace_back(pr.at(0), pr.at(1));
    ref.k_ge_3_candidates = j.value("k_ge_3_candidates", std::uint64_t{0});
    ref.thresholds = j.value("thresholds", nlohmann::json::object());
    ref.printed_lists = j.value("printed_lists", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed reference data: ") + e.what());
  }
  return ref;
}

inline ReferenceData load_reference(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open reference data '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("reference data '" + path + "': " + e.what());
  }
  return parse_reference(j);
}

/// nu and k ranges of the threshold table, used as inputs.
inline std::vector<Table1Row> default_table1_rows() {
  return {{13.7L, 1379, 385896}, {11.3L, 212, 1378}, {10.1L, 84, 211}, {9.52L, 48, 83}, {9.2L, 33, 47},
          {8.9L, 26, 32},        {8.7L, 21, 25},     {8.6L, 18, 20},   {8.5L, 16, 17},  {8.5L, 14, 15},
          {8.4L, 13, 13},        {8.4L, 12, 12},     {8.5L, 11, 11},   {8.4L, 10, 10},  {8.4L, 9, 9},
          {8.5L, 8, 8},          {8.4L, 7, 7},       {8.5L, 6, 6},     {8.8L, 5, 5},    {9.4L, 4, 4},
          {11.3L, 3, 3}};
}

/// The (d, g) choices of the sieve table, used as inputs; g is a product of
/// linear factors, so only their number matters.
inline std::vector<Table2Row> default_table2_choices() {
  struct C {
    std::uint64_t q, m;
    const char* d;
    const char* g;
    std::size_t g_linear;
  };
  const C rows[] = {{5, 13, "2", "x+4", 1},
                    {5, 15, "2", "x+4", 1},
                    {5, 21, "2", "x+4", 1},
                    {5, 22, "6", "x+1", 1},
                    {5, 30, "462", "x+1", 1},
                    {5, 80, "66", "(x+1)(x+2)(x+3)(x+4)", 4},
                    {25, 11, "6", "x+4", 1},
                    {25, 13, "6", "x+4", 1},
                    {25, 14, "6", "x+1", 1},
                    {25, 15, "6", "x+4", 1},
                    {25, 18, "42", "x+1", 1},
                    {25, 21, "6", "x+4", 1},
                    {25, 36, "546", "4 linear factors", 4},
                    {25, 48, "9282", "14 linear factors", 14}};
  std::vector<Table2Row> out;
  for (const auto& c : rows) {
    Table2Row r;
    r.q = c.q;
    r.m = c.m;
    r.d = BigInt(c.d);
    r.g = c.g;
    r.g_linear = c.g_linear;
    out.push_back(r);
  }
  return out;
}

/// Printed values of a row, when the reference has it.
inline const Table2Row* find_table2(const ReferenceData& ref, std::uint64_t q, std::uint64_t m) {
  for (const auto& r : ref.table2)
    if (r.q == q && r.m == m) return &r;
  return nullptr;
}

/// q as p^k; throws unless q is a power of p.
inline unsigned exponent_of(std::uint64_t q, std::uint32_t p) {
  unsigned k = 0;
  while (q > 1 && q % p == 0) {
    q /= p;
    ++k;
  }
  if (q != 1 || k == 0) throw InputError("q is not a power of " + std::to_string(p));
  return k;
}

// ---------------------------------------------------------------------------
// Sieve table audit: the reference (d, g) choices fed to the sieve

struct Table2Audit {
  Table2Row row;
  SieveEvaluation eval;
  std::string provenance;
  bool d_consistent = true;  // d is squarefree and divides q^m - 1
  bool g_consistent = true;  // enough linear factors exist
  double l_error = 0, L_error = 0;
  bool r_match = false, s_match = false;
};

inline Table2Audit audit_table2_row(const Table2Row& row, std::uint32_t p = 5, unsigned n = 4,
                                    const FactorTables* tables = nullptr, const FactorEffort& effort = {},
                                    const SieveOptions& opt = {}) {
  Table2Audit a;
  a.row = row;
  const unsigned k = exponent_of(row.q, p);
  const PairInstance in{p, k, row.m, n};
  const IntFactorization fac = factor_qm_minus_1(in.q(), row.m, tables, effort);
  a.provenance = fac.provenance();
  const CycloFactorization cf = cyclotomic_degrees(p, k, row.m);
  std::vector<std::size_t> kp, kc;
  BigInt rest = row.d;
  for (std::size_t i = 0; i < fac.factors.size(); ++i) {
    if (mpz_divisible_p(rest.get_mpz_t(), fac.factors[i].prime.get_mpz_t())) {
      kp.push_back(i);
      rest /= fac.factors[i].prime;
    }
  }
  a.d_consistent = rest == 1;
  for (std::size_t i = 0; i < cf.coset_degrees.size() && kc.size() < row.g_linear; ++i) {
    if (cf.coset_degrees[i] == 1) kc.push_back(i);
  }
  a.g_consistent = kc.size() == row.g_linear;
  a.eval = sieve_evaluate(sieve_input_from(in, fac, cf, kp, kc), opt);
  if (row.printed) {
    a.l_error = std::fabs(static_cast<double>(a.eval.l_value) - row.l);
    a.L_error = a.eval.lambda ? std::fabs(static_cast<double>(*a.eval.lambda) - row.L) : HUGE_VAL;
    a.r_match = a.eval.r == row.r;
    a.s_match = a.eval.s == row.s;
  }
  return a;
}

inline void to_json(nlohmann::json& j, const Table2Audit& a) {
  j = {{"q", a.row.q},
       {"m", a.row.m},
       {"d", to_string(a.row.d)},
       {"g", a.row.g},
       {"sieve", a.eval},
       {"d_consistent", a.d_consistent},
       {"g_consistent", a.g_consistent},
       {"factorization", a.provenance}};
  if (a.row.printed) {
    j["printed"] = {{"r", a.row.r}, {"s", a.row.s}, {"l", a.row.l}, {"L", a.row.L}};
    j["l_error"] = a.l_error;
    j["L_error"] = a.L_error;
    j["r_match"] = a.r_match;
    j["s_match"] = a.s_match;
  }
}

// ---------------------------------------------------------------------------
// Exceptions pipeline

/// nu = 3.0, 3.2, ..., 14.8
inline std::vector<long double> default_nu_grid() {
  std::vector<long double> g;
  for (int i = 30; i < 150; i += 2) g.push_back(static_cast<long double>(i) / 10);
  return g;
}

struct PipelineOptions {
  std::uint32_t p = 5;
  unsigned n = 4;
  unsigned k_min = 1, k_max = 47;
  std::vector<Table1Row> table1 = default_table1_rows();  // nu per k for k >= 3
  std::vector<long double> nu_grid = default_nu_grid();
  const FactorTables* tables = nullptr;
  FactorEffort effort{};  // the escalated effort; the first pass is trial division only
  SieveBudget budget{};
  unsigned jobs = 1;
};

enum class Stage { threshold, suff, sieve, exception, unresolved };

inline const char* stage_name(Stage s) {
  switch (s) {
    case Stage::threshold: return "threshold";
    case Stage::suff: return "suff";
    case Stage::sieve: return "sieve";
    case Stage::exception: return "exception";
    case Stage::unresolved: return "unresolved";
  }
  return "?";
}

struct InstanceRecord {
  PairInstance instance;
  std::string branch;  // "k>=3", "case1", "case2"
  Stage stage = Stage::threshold;
  CriterionReport threshold;
  std::optional<CriterionReport> suff;
  std::optional<SieveEvaluation> sieve;
  std::size_t sieve_evaluations = 0;
  std::string provenance;
  bool escalated = false;
};

inline void to_json(nlohmann::json& j, const InstanceRecord& r) {
  j = {{"instance", r.instance},
       {"branch", r.branch},
       {"stage", stage_name(r.stage)},
       {"threshold", r.threshold},
       {"factorization", r.provenance},
       {"escalated", r.escalated},
       {"sieve_evaluations", r.sieve_evaluations}};
  if (r.suff) j["suff"] = *r.suff;
  if (r.sieve) j["sieve"] = *r.sieve;
}

struct CaseBounds {
  unsigned k = 0;
  std::uint64_t case2_threshold = 0;  // DELTA_FORM with delta = 1/3
  long double case2_nu = 0;
  std::vector<std::uint64_t> case1_m_primes;
  std::vector<std::uint64_t> special_m_primes;  // delta_exact > 1/3, handled per j
};

struct ExceptionsReport {
  std::uint32_t p = 5;
  unsigned n = 4;
  std::uint64_t k3_range = 0;       // (k, m) pairs below the per-k threshold
  std::uint64_t k3_candidates = 0;  // of those, failing the threshold form
  std::vector<CaseBounds> bounds;
  std::vector<InstanceRecord> records;  // candidates only, sorted by (k, m)

  std::vector<const InstanceRecord*> with_stage(Stage s) const {
    std::vector<const InstanceRecord*> out;
    for (const auto& r : records)
      if (r.stage == s) out.push_back(&r);
    return out;
  }
};

namespace detail {

struct NuTable {
  std::vector<long double> nu, log10_D;
  explicit NuTable(const std::vector<long double>& grid) {
    for (auto v : grid) {
      nu.push_back(v);
      log10_D.push_back(compute_D(v).log10_D);
    }
  }
};

/// D1_FORM at the nu of the grid with the largest margin.
inline CriterionReport best_d1(const PairInstance& in, const NuTable& nt, const BigInt& w_xm) {
  std::optional<CriterionReport> best;
  for (std::size_t i = 0; i < nt.nu.size(); ++i) {
    VariantInputs x;
    x.nu = nt.nu[i];
    x.log10_D = nt.log10_D[i];
    x.w_xm = w_xm;
    auto r = variant_check(in, Variant::D1_FORM, x);
    if (!best || r.lhs_log10 - r.rhs_log10 > best->lhs_log10 - best->rhs_log10) best = r;
  }
  return *best;
}

inline bool divides_u64(std::uint64_t d, const BigInt& n) { return mpz_divisible_ui_p(n.get_mpz_t(), d) != 0; }

/// suff, then the sieve, first on a trial-division factorization and then
/// with the full effort if the first pass is inconclusive.
inline void certify(InstanceRecord& rec, const PipelineOptions& opt) {
  const PairInstance& in = rec.instance;
  const CycloFactorization cf = cyclotomic_degrees(in.p, in.k, in.m);
  FactorEffort quick = opt.effort;
  quick.rho_iterations = 0;
  for (int pass = 0; pass < 2; ++pass) {
    const IntFactorization fac = factor_qm_minus_1(in.q(), in.m, opt.tables, pass == 0 ? quick : opt.effort);
    rec.provenance = fac.provenance();
    rec.escalated = pass == 1;
    rec.suff = suff_check(in, w_exact_or_bound(fac), cf.big_w());
    if (rec.suff->holds) {
      rec.stage = Stage::suff;
      return;
    }
    const SieveSearchResult sr = sieve_search(in, fac, cf, opt.budget);
    rec.sieve_evaluations = sr.evaluations;
    if (sr.found) {
      rec.sieve = sr.found;
      rec.stage = Stage::sieve;
      return;
    }
    if (fac.complete()) {
      rec.stage = Stage::exception;
      return;
    }
  }
  rec.stage = Stage::unresolved;
}

}  // namespace detail

/// Runs every branch and certifies the candidates; deterministic for fixed
/// options regardless of jobs.
inline ExceptionsReport exceptions_pipeline(const PipelineOptions& opt) {
  if (opt.k_min < 1 || opt.k_max < opt.k_min) throw InputError("bad k range");
  ExceptionsReport rep;
  rep.p = opt.p;
  rep.n = opt.n;
  const detail::NuTable nt(opt.nu_grid);
  std::map<std::pair<unsigned, std::uint64_t>, InstanceRecord> cand;

  auto consider = [&](unsigned k, std::uint64_t m, const std::string& branch, const CriterionReport& thr) {
    if (thr.holds) return;
    InstanceRecord rec;
    rec.instance = PairInstance{opt.p, k, m, opt.n};
    rec.branch = branch;
    rec.threshold = thr;
    cand.emplace(std::make_pair(k, m), rec);
  };

  // k >= 3: nu from the table row covering k, m below the per-k threshold
  for (unsigned k = std::max(3u, opt.k_min); k <= opt.k_max; ++k) {
    const Table1Row* row = nullptr;
    for (const auto& r : opt.table1)
      if (r.k_lo <= k && k <= r.k_hi) row = &r;
    if (!row) throw InputError("no table row covers k = " + std::to_string(k));
    const long double lD = compute_D(row->nu).log10_D;
    const auto M = d_form_m_threshold(opt.p, k, opt.n, row->nu, lD);
    if (!M) throw InputError("threshold form never holds at k = " + std::to_string(k));
    for (std::uint64_t m = 9; m < *M; ++m) {
      ++rep.k3_range;
      const PairInstance in{opt.p, k, m, opt.n};
      VariantInputs x;
      x.nu = row->nu;
      x.log10_D = lD;
      x.w_xm = cyclotomic_degrees(opt.p, k, m).big_w();
      const CriterionReport thr = variant_check(in, Variant::D1_FORM, x);
      if (!thr.holds) ++rep.k3_candidates;
      consider(k, m, "k>=3", thr);
    }
  }

  // k = 1, 2
  for (unsigned k = opt.k_min; k <= std::min(2u, opt.k_max); ++k) {
    CaseBounds cb;
    cb.k = k;
    const PairInstance base{opt.p, k, 1, opt.n};
    const BigInt q = base.q();
    const BigInt q2m1 = q * q - 1;
    const Rational third(1, 3);
    std::optional<std::uint64_t> T;
    for (std::size_t i = 0; i < nt.nu.size(); ++i) {
      auto t = delta_form_threshold(opt.p, k, opt.n, nt.nu[i], nt.log10_D[i], third);
      if (t && (!T || *t < *T)) {
        T = t;
        cb.case2_nu = nt.nu[i];
      }
    }
    if (!T) throw InputError("case II threshold undefined");
    cb.case2_threshold = *T;

    // least j with the per-m' form holding for all larger j, minimized over nu
    auto family = [&](std::uint64_t mp, const std::string& branch, std::uint64_t m_from) {
      const BigInt wx = cyclotomic_degrees(opt.p, k, mp).big_w();
      std::optional<unsigned> J;
      for (std::size_t i = 0; i < nt.nu.size(); ++i) {
        auto j = mprime_j_threshold(base, mp, nt.nu[i], nt.log10_D[i], log10_big(wx));
        if (j && (!J || *j < *J)) J = j;
      }
      if (!J) throw InputError("no j threshold for m' = " + std::to_string(mp));
      std::uint64_t m = mp;
      for (unsigned j = 0; j < *J; ++j, m *= opt.p) {
        if (m < 9 || m < m_from) continue;
        const PairInstance in{opt.p, k, m, opt.n};
        consider(k, m, branch, detail::best_d1(in, nt, cyclotomic_degrees(opt.p, k, m).big_w()));
      }
    };

    // Case I: m' | q^2 - 1
    for (std::uint64_t mp = 1; mp <= to_u64(q2m1); ++mp) {
      if (mp % opt.p == 0 || !detail::divides_u64(mp, q2m1)) continue;
      cb.case1_m_primes.push_back(mp);
      family(mp, "case1", 0);
    }
    // Case II below the threshold
    for (std::uint64_t m = 9; m < *T; ++m) {
      const MSplit s = split_m(m, opt.p);
      if (detail::divides_u64(s.m_prime, q2m1)) continue;
      const PairInstance in{opt.p, k, m, opt.n};
      consider(k, m, "case2", detail::best_d1(in, nt, cyclotomic_degrees(opt.p, k, m).big_w()));
    }
    // m' whose exact ratio M'/m' exceeds 1/3 are followed past the threshold
    for (std::uint64_t mp = 2; mp < *T; ++mp) {
      if (mp % opt.p == 0 || detail::divides_u64(mp, q2m1)) continue;
      const MDecomposition d = delta_compute(opt.p, k, mp);
      if (d.delta_exact <= third) continue;
      cb.special_m_primes.push_back(mp);
      family(mp, "case2", *T);
    }
    rep.bounds.push_back(cb);
  }

  std::vector<InstanceRecord> recs;
  for (auto& [key, r] : cand) recs.push_back(std::move(r));
  const unsigned jobs = std::max(1u, opt.jobs);
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(jobs);
  auto work = [&](unsigned w) {
    try {
      for (std::size_t i; (i = next.fetch_add(1)) < recs.size();) detail::certify(recs[i], opt);
    } catch (const std::exception& e) {
      errors[w] = e.what();
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> th;
    for (unsigned w = 0; w < jobs; ++w) th.emplace_back(work, w);
    for (auto& t : th) t.join();
  }
  for (const auto& e : errors)
    if (!e.empty()) throw ResourceError("pipeline worker failed: " + e);
  rep.records = std::move(recs);
  return rep;
}

using QmPair = std::pair<BigInt, std::uint64_t>;

struct ExceptionsDiff {
  std::vector<QmPair> computed;  // exceptions and unresolved
  std::vector<QmPair> missing;   // reference pairs resolved here
  std::vector<QmPair> extra;     // computed pairs not in the reference
  std::map<QmPair, std::string> stage_of;
};

inline ExceptionsDiff diff_exceptions(const ExceptionsReport& rep, const ReferenceData& ref) {
  ExceptionsDiff d;
  std::set<QmPair> mine;
  for (const auto& r : rep.records) {
    const QmPair key{r.instance.q(), r.instance.m};
    d.stage_of[key] = stage_name(r.stage);
    if (r.stage == Stage::exception || r.stage == Stage::unresolved) mine.insert(key);
  }
  d.computed.assign(mine.begin(), mine.end());
  std::set<QmPair> theirs;
  for (const auto& [q, m] : ref.exception_pairs) theirs.emplace(from_u64(q), m);
  for (const auto& pr : theirs) {
    if (!mine.count(pr)) d.missing.push_back(pr);
  }
  for (const auto& pr : mine) {
    if (!theirs.count(pr)) d.extra.push_back(pr);
  }
  return d;
}

inline nlohmann::json pair_json(const QmPair& pr) {
  nlohmann::json q = mpz_fits_ulong_p(pr.first.get_mpz_t()) ? nlohmann::json(pr.first.get_ui())
                                                             : nlohmann::json(to_string(pr.first));
  return {q, pr.second};
}

inline nlohmann::json pairs_json(const std::vector<QmPair>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& pr : v) a.push_back(pair_json(pr));
  return a;
}

inline nlohmann::json to_json(const ExceptionsDiff& d) {
  nlohmann::json miss = nlohmann::json::array();
  for (const auto& pr : d.missing) {
    auto it = d.stage_of.find(pr);
    miss.push_back({{"pair", pair_json(pr)}, {"stage", it == d.stage_of.end() ? "threshold" : it->second}});
  }
  return {{"computed", pairs_json(d.computed)}, {"missing", miss}, {"extra", pairs_json(d.extra)}};
}

}  // namespace pnpair
