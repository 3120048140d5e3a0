#pragma once

// Command-line front end. Every subcommand writes JSON lines (or CSV/text
// where noted) to `out`; diagnostics go to `err`. run() returns the exit code.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pnpair/criteria.hpp"
#include "pnpair/cyclotomic.hpp"
#include "pnpair/errors.hpp"
#include "pnpair/ext_field.hpp"
#include "pnpair/numtheory.hpp"
#include "pnpair/oracle.hpp"
#include "pnpair/pipeline.hpp"
#include "pnpair/ratfunc.hpp"

#ifndef PNPAIR_DATA_DIR
#define PNPAIR_DATA_DIR "data"
#endif

namespace pnpair::cli {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kFactorTablesEnv = "PNPAIR_FACTOR_TABLES";

struct RunConfig {
  std::string subcommand;
  std::uint32_t p = 5;
  unsigned k = 1;
  std::optional<std::uint64_t> m;
  unsigned n = 4;
  std::optional<std::string> f;
  std::optional<std::string> g;
  std::optional<std::string> a, b;
  std::optional<double> nu;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::string format = "json";
  std::optional<std::string> factor_tables;
  std::uint64_t scan_limit = kDlogLimit;
  std::string effort = "normal";  // trial | normal | high
  unsigned table = 2;
  std::string k_range = "1..47";
  std::string reference = std::string(PNPAIR_DATA_DIR) + "/reference.json";
  bool strict = false;
  bool printed_l = false;

  nlohmann::json to_json() const {
    auto opt = [](const auto& o) { return o ? nlohmann::json(*o) : nlohmann::json(nullptr); };
    return {{"subcommand", subcommand}, {"p", p},
            {"k", k},                   {"m", opt(m)},
            {"n", n},                   {"f", opt(f)},
            {"g", opt(g)},              {"a", opt(a)},
            {"b", opt(b)},              {"nu", opt(nu)},
            {"seed", seed},             {"jobs", jobs},
            {"format", format},         {"factor_tables", opt(factor_tables)},
            {"scan_limit", scan_limit}, {"effort", effort},
            {"table", table},           {"k_range", k_range},
            {"strict", strict},         {"printed_l_formula", printed_l}};
  }
};

inline FactorEffort effort_of(const std::string& e, std::uint64_t seed) {
  FactorEffort f;
  f.seed = seed;
  if (e == "trial") {
    f.rho_iterations = 0;
  } else if (e == "high") {
    f.rho_iterations = 20'000'000;
  } else if (e != "normal") {
    throw InputError("unknown effort '" + e + "' (trial, normal, high)");
  }
  return f;
}

/// A table file, or every regular file of a directory in name order.
inline std::optional<FactorTables> load_factor_tables(const RunConfig& cfg) {
  std::string path;
  if (cfg.factor_tables) {
    path = *cfg.factor_tables;
  } else if (const char* env = std::getenv(kFactorTablesEnv); env && *env) {
    path = env;
  } else {
    return std::nullopt;
  }
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::exists(path, ec)) throw InputError("factor tables '" + path + "' not found");
  if (!fs::is_directory(path, ec)) return FactorTables::load(path);
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file()) files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  FactorTables all;
  for (const auto& file : files) all.merge(FactorTables::load(file));
  return all;
}

inline std::pair<unsigned, unsigned> parse_k_range(const std::string& s) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      const unsigned k = static_cast<unsigned>(std::stoul(s));
      return {k, k};
    }
    return {static_cast<unsigned>(std::stoul(s.substr(0, dots))), static_cast<unsigned>(std::stoul(s.substr(dots + 2)))};
  } catch (const std::exception&) {
    throw InputError("bad k range '" + s + "' (expected LO..HI)");
  }
}

class Emitter {
 public:
  Emitter(const RunConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out) {}

  /// One JSON line, or a key=value line in text mode.
  void line(const std::string& type, nlohmann::json body) {
    body["type"] = type;
    body["version"] = kVersion;
    body["config"] = cfg_.to_json();
    if (cfg_.format == "text") {
      out_ << type << ":";
      for (const auto& [key, v] : body.items()) {
        if (key == "type" || key == "config" || key == "version") continue;
        out_ << ' ' << key << '=' << (v.is_string() ? v.get<std::string>() : v.dump());
      }
      out_ << '\n';
    } else {
      out_ << body.dump() << '\n';
    }
  }
  std::ostream& raw() { return out_; }

 private:
  const RunConfig& cfg_;
  std::ostream& out_;
};

inline PairInstance instance_of(const RunConfig& cfg) {
  if (!cfg.m) throw InputError("--m is required");
  PairInstance in{cfg.p, cfg.k, *cfg.m, cfg.n};
  in.validate();
  return in;
}

inline std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

// ---------------------------------------------------------------------------

inline void cmd_factor(const RunConfig& cfg, Emitter& em) {
  const PairInstance in = instance_of(cfg);
  const auto tables = load_factor_tables(cfg);
  const IntFactorization fac =
      factor_qm_minus_1(in.q(), in.m, tables ? &*tables : nullptr, effort_of(cfg.effort, cfg.seed));
  fac.verify();
  const WValue w = w_exact_or_bound(fac);
  em.line("factorization", {{"instance", in},
                            {"factorization", fac},
                            {"W", to_string(w.value)},
                            {"W_exact", w.exact},
                            {"omega_known", fac.factors.size()}});
}

inline void cmd_suff(const RunConfig& cfg, Emitter& em) {
  const PairInstance in = instance_of(cfg);
  const auto tables = load_factor_tables(cfg);
  const IntFactorization fac =
      factor_qm_minus_1(in.q(), in.m, tables ? &*tables : nullptr, effort_of(cfg.effort, cfg.seed));
  const CycloFactorization cf = cyclotomic_degrees(in.p, in.k, in.m);
  const WValue w = w_exact_or_bound(fac);
  nlohmann::json j = suff_check(in, w, cf.big_w());
  j["W_qm"] = to_string(w.value);
  j["W_exact"] = w.exact;
  j["W_xm"] = to_string(cf.big_w());
  j["factorization"] = fac.provenance();
  em.line("suff", j);
  if (cfg.nu) {
    VariantInputs x;
    x.nu = *cfg.nu;
    x.log10_D = compute_D(*cfg.nu).log10_D;
    x.w_xm = cf.big_w();
    x.delta = delta_compute(in.p, in.k, in.m).delta_exact;
    for (Variant v : {Variant::D_FORM, Variant::D1_FORM, Variant::MPRIME_FORM, Variant::DELTA_FORM}) {
      em.line("variant", variant_check(in, v, x));
    }
  }
}

inline void cmd_sieve(const RunConfig& cfg, Emitter& em) {
  const PairInstance in = instance_of(cfg);
  const auto tables = load_factor_tables(cfg);
  const IntFactorization fac =
      factor_qm_minus_1(in.q(), in.m, tables ? &*tables : nullptr, effort_of(cfg.effort, cfg.seed));
  const CycloFactorization cf = cyclotomic_degrees(in.p, in.k, in.m);
  const SieveBudget budget;
  const SieveSearchResult sr = sieve_search(in, fac, cf, budget);
  nlohmann::json j = {{"instance", in},
                      {"variant", "SIEVE"},
                      {"holds", sr.found.has_value()},
                      {"evaluations", sr.evaluations},
                      {"grid_budget", budget.max_evaluations},
                      {"budget_exhausted", sr.budget_exhausted},
                      {"factorization", fac.provenance()},
                      {"delta", delta_compute(in.p, in.k, in.m)}};
  if (sr.found) {
    j["lhs_log10"] = static_cast<double>(sr.found->lhs_log10);
    j["rhs_log10"] = static_cast<double>(sr.found->rhs_log10);
    j["verdict"] = verdict_name(sr.found->verdict);
    j["sieve"] = *sr.found;
  } else {
    j["sieve"] = nullptr;
  }
  if (sr.lemma53) {
    j["lemma53"] = *sr.lemma53;
    j["lemma53_lambda_ok"] = sr.lemma53_lambda_ok;
  }
  em.line("sieve", j);
}

inline void cmd_tables(const RunConfig& cfg, Emitter& em) {
  std::optional<ReferenceData> ref;
  try {
    ref = load_reference(cfg.reference);
  } catch (const InputError&) {
    ref.reset();  // the audit columns are simply omitted
  }
  const bool csv = cfg.format == "csv";
  if (cfg.table == 1) {
    const auto rows = default_table1_rows();
    const auto res = table1_thresholds(rows, cfg.p, cfg.n);
    if (csv) em.raw() << "nu,k_range,m_k\n";
    for (std::size_t i = 0; i < res.size(); ++i) {
      const auto& r = res[i];
      if (csv) {
        em.raw() << fixed(static_cast<double>(r.row.nu), 2) << ',' << r.row.k_lo << '-' << r.row.k_hi << ','
                 << (r.m_k ? std::to_string(*r.m_k) : "") << '\n';
        continue;
      }
      nlohmann::json j = {{"nu", static_cast<double>(r.row.nu)},
                          {"k_lo", r.row.k_lo},
                          {"k_hi", r.row.k_hi},
                          {"log10_D", static_cast<double>(r.log10_D)},
                          {"m_k", r.m_k ? nlohmann::json(*r.m_k) : nlohmann::json(nullptr)},
                          {"m_k_at_k_hi", r.m_k_at_k_hi ? nlohmann::json(*r.m_k_at_k_hi) : nlohmann::json(nullptr)},
                          {"m_k_odd_D", r.m_k_odd_D ? nlohmann::json(*r.m_k_odd_D) : nlohmann::json(nullptr)}};
      if (ref && i < ref->table1.size()) {
        j["printed_m_k"] = ref->table1[i].m_k;
        if (r.m_k) j["diff"] = static_cast<long long>(*r.m_k) - static_cast<long long>(ref->table1[i].m_k);
      }
      em.line("table1_row", j);
    }
    return;
  }
  if (cfg.table != 2) throw InputError("--table must be 1 or 2");
  const auto tables = load_factor_tables(cfg);
  SieveOptions so;
  so.printed_l_formula = cfg.printed_l;
  if (csv) em.raw() << "q,m,d,r,g,s,l,L\n";
  for (Table2Row row : default_table2_choices()) {
    if (ref) {
      if (const Table2Row* pr = find_table2(*ref, row.q, row.m)) {
        row.printed = true;
        row.r = pr->r;
        row.s = pr->s;
        row.l = pr->l;
        row.L = pr->L;
      }
    }
    const Table2Audit a =
        audit_table2_row(row, cfg.p, cfg.n, tables ? &*tables : nullptr, effort_of(cfg.effort, cfg.seed), so);
    if (csv) {
      em.raw() << row.q << ',' << row.m << ',' << to_string(row.d) << ',' << a.eval.r << ",\"" << row.g << "\","
               << a.eval.s << ',' << fixed(static_cast<double>(a.eval.l_value), 3) << ','
               << (a.eval.lambda ? fixed(static_cast<double>(*a.eval.lambda), 2) : std::string("")) << '\n';
      continue;
    }
    em.line("table2_row", a);
  }
}

inline void cmd_exceptions(const RunConfig& cfg, Emitter& em) {
  const auto [k_lo, k_hi] = parse_k_range(cfg.k_range);
  const auto tables = load_factor_tables(cfg);
  PipelineOptions opt;
  opt.p = cfg.p;
  opt.n = cfg.n;
  opt.k_min = k_lo;
  opt.k_max = k_hi;
  opt.tables = tables ? &*tables : nullptr;
  opt.effort = effort_of(cfg.effort, cfg.seed);
  opt.jobs = cfg.jobs;
  const ExceptionsReport rep = exceptions_pipeline(opt);
  const bool csv = cfg.format == "csv";
  if (csv) em.raw() << "q,m,branch,stage,factorization\n";
  std::map<std::string, std::uint64_t> stages;
  for (const auto& r : rep.records) {
    stages[r.branch + "/" + stage_name(r.stage)] += 1;
    if (csv) {
      em.raw() << to_string(r.instance.q()) << ',' << r.instance.m << ',' << r.branch << ',' << stage_name(r.stage)
               << ',' << r.provenance << '\n';
    } else {
      em.line("instance", r);
    }
  }
  if (csv) return;
  nlohmann::json bounds = nlohmann::json::array();
  for (const auto& b : rep.bounds) {
    bounds.push_back({{"k", b.k},
                      {"case2_threshold", b.case2_threshold},
                      {"case2_nu", static_cast<double>(b.case2_nu)},
                      {"case1_m_primes", b.case1_m_primes},
                      {"special_m_primes", b.special_m_primes}});
  }
  nlohmann::json summary = {{"k_range", {k_lo, k_hi}},
                            {"k3_range", rep.k3_range},
                            {"k3_candidates", rep.k3_candidates},
                            {"stages", stages},
                            {"bounds", bounds},
                            {"sieve_grid_budget", opt.budget.max_evaluations}};
  nlohmann::json unresolved = nlohmann::json::array();
  for (const auto* r : rep.with_stage(Stage::unresolved)) unresolved.push_back(pair_json({r->instance.q(), r->instance.m}));
  summary["unresolved"] = unresolved;
  if (auto ref = std::optional<ReferenceData>{}; true) {
    try {
      ref = load_reference(cfg.reference);
    } catch (const InputError&) {
    }
    if (ref) {
      summary["reference_k3_candidates"] = ref->k_ge_3_candidates;
      summary["k3_candidate_diff"] =
          static_cast<long long>(rep.k3_candidates) - static_cast<long long>(ref->k_ge_3_candidates);
      if (k_lo <= 2) summary["exceptions_diff"] = to_json(diff_exceptions(rep, *ref));
    }
  }
  em.line("summary", summary);
}

inline void cmd_verify(const RunConfig& cfg, Emitter& em) {
  if (!cfg.m) throw InputError("--m is required");
  if (!cfg.f) throw InputError("--f is required");
  const auto tables = load_factor_tables(cfg);
  FieldContext::Options fo;
  fo.effort = effort_of(cfg.effort, cfg.seed);
  fo.tables = tables ? &*tables : nullptr;
  if (pow_ui(pow_ui(BigInt(cfg.p), cfg.k), static_cast<unsigned long>(*cfg.m)) > from_u64(cfg.scan_limit)) {
    throw ResourceError("verify needs a scan of q^m elements, above --scan-limit " + std::to_string(cfg.scan_limit));
  }
  const FieldPtr F = make_context(cfg.p, cfg.k, static_cast<unsigned>(*cfg.m), cfg.seed, &fo);
  const RationalFunction f = parse_rational(F, *cfg.f);
  const auto& qm1 = F->order_factorization();
  if (!qm1 || !qm1->complete()) throw IncompleteFactorization("q^m - 1 for verify");
  const MembershipEvidence mem = check_membership(f, *qm1, cfg.strict, cfg.seed);
  em.line("membership", {{"field", F->to_json()}, {"f", f.to_string()}, {"n", f.n()}, {"membership", membership_json(mem)}});

  const SmallField sf(F, cfg.scan_limit);
  const ModuleData md = module_data(*F, cfg.seed);
  const FreenessSpec full = FreenessSpec::full(*F, md);
  const PairCountTable tab = count_pairs_table(sf, md, f, full, full, cfg.jobs);
  const BaseField& B = F->base();
  std::optional<std::uint32_t> a, b;
  if (cfg.a) a = B.parse(*cfg.a);
  if (cfg.b) b = B.parse(*cfg.b);
  std::uint64_t cells = 0, positive = 0;
  nlohmann::json empty = nlohmann::json::array();
  for (std::uint32_t i = 0; i < B.size(); ++i) {
    if (a && i != *a) continue;
    for (std::uint32_t j = 0; j < B.size(); ++j) {
      if (b && j != *b) continue;
      ++cells;
      const std::uint64_t count = tab.at(i, j);
      const auto w = tab.witness[std::size_t{i} * B.size() + j];
      nlohmann::json params = {{"a", B.format(i)}, {"b", B.format(j)}, {"f", f.to_string()}, {"scanned", tab.scanned}};
      bool verified = false;
      if (w != SmallField::kZero) {
        const FieldElement x = sf.element(w);
        verified = verify_pair_witness(*F, md, f, full, full, x, i, j);
        if (!verified) throw IntegrityError("witness for (" + B.format(i) + "," + B.format(j) + ") failed re-verification");
        params["witness"] = F->format(x);
        params["witness_value"] = F->format(*evaluate(f, x));
      } else {
        empty.push_back({B.format(i), B.format(j)});
      }
      positive += count > 0;
      em.line("pair_count", oracle_report("pair_count", *F, params, count, 0, count > 0 && verified, 0.0));
    }
  }
  em.line("existence", {{"instance", {{"p", cfg.p}, {"k", cfg.k}, {"m", *cfg.m}}},
                        {"cells", cells},
                        {"cells_with_pair", positive},
                        {"cells_without_pair", empty},
                        {"in_Rn", mem.in_Rn}});
}

inline void cmd_charsum(const RunConfig& cfg, Emitter& em) {
  if (!cfg.m) throw InputError("--m is required");
  if (!cfg.f) throw InputError("--f is required");
  const FieldPtr F = make_context(cfg.p, cfg.k, static_cast<unsigned>(*cfg.m), cfg.seed);
  const SmallField sf(F, CharacterSystem::kLimit);
  const ModuleData md = module_data(*F, cfg.seed);
  const CharacterSystem cs(sf, md);
  const RationalFunction f = parse_rational(F, *cfg.f);
  const RationalFunction g = parse_rational(F, cfg.g.value_or("x"));
  const auto& qm1 = F->order_factorization();
  if (!qm1 || !qm1->complete()) throw IncompleteFactorization("q^m - 1 for charsum");
  std::vector<std::uint64_t> primes;
  for (const auto& pr : qm1->primes()) primes.push_back(to_u64(pr));
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << primes.size()); ++mask) {
    std::uint64_t d = 1;
    for (std::size_t i = 0; i < primes.size(); ++i)
      if (mask >> i & 1) d *= primes[i];
    const SumCheck w = weil_sum_check(cs, f, d, cfg.seed);
    em.line("charsum", oracle_report("weil", *F, {{"f", f.to_string()}, {"d", d}, {"detail", to_json(w)}},
                                     static_cast<double>(w.magnitude), static_cast<double>(w.bound), w.pass, 0.0));
    const SumCheck c = castro_sum_check(cs, f, g, d, 1, F->one(), cfg.seed);
    em.line("charsum", oracle_report("castro", *F,
                                     {{"f", f.to_string()}, {"g", g.to_string()}, {"d", d}, {"j", 1}, {"v", "1"},
                                      {"detail", to_json(c)}},
                                     static_cast<double>(c.magnitude), static_cast<double>(c.bound), c.pass, 0.0));
  }
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Primitive normal pairs with prescribed traces: criteria, pipeline and small-field oracle",
               "pnpair"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  std::optional<std::uint64_t> m;
  std::optional<double> nu;
  std::optional<std::string> f, g, a, b, tables;

  auto common = [&](CLI::App* s) {
    s->add_option("--p", cfg.p, "characteristic")->capture_default_str();
    s->add_option("--k", cfg.k, "q = p^k")->capture_default_str();
    s->add_option("--m", m, "extension degree");
    s->add_option("--n", cfg.n, "degree sum")->capture_default_str();
    s->add_option("--seed", cfg.seed, "seed for every randomized step")->capture_default_str();
    s->add_option("--jobs", cfg.jobs, "worker threads")->capture_default_str();
    s->add_option("--format", cfg.format, "json, csv or text")
        ->check(CLI::IsMember({"json", "csv", "text"}))
        ->capture_default_str();
    s->add_option("--factor-tables", tables, "factor table file or directory");
    s->add_option("--effort", cfg.effort, "factoring effort: trial, normal, high")->capture_default_str();
    s->add_option("--reference", cfg.reference, "reference data for audit output")->capture_default_str();
  };
  auto* c_factor = app.add_subcommand("factor", "factor q^m - 1");
  auto* c_suff = app.add_subcommand("suff", "sufficient condition");
  auto* c_sieve = app.add_subcommand("sieve", "prime sieve search");
  auto* c_tables = app.add_subcommand("tables", "reproduce the threshold or sieve table");
  auto* c_exc = app.add_subcommand("exceptions", "exceptional pair pipeline");
  auto* c_verify = app.add_subcommand("verify", "exhaustive pair search on a small field");
  auto* c_charsum = app.add_subcommand("charsum", "character sum bound checks");
  for (auto* s : {c_factor, c_suff, c_sieve, c_tables, c_exc, c_verify, c_charsum}) common(s);
  c_suff->add_option("--nu", nu, "also evaluate the W(t) < D t^(1/nu) forms");
  c_tables->add_option("--table", cfg.table, "1 or 2")->capture_default_str();
  c_tables->add_flag("--printed-l", cfg.printed_l, "use the l formula exactly as printed");
  c_exc->add_option("--k-range", cfg.k_range, "LO..HI")->capture_default_str();
  for (auto* s : {c_verify, c_charsum}) {
    s->add_option("--f", f, "rational function (NUM)/(DEN)");
    s->add_option("--scan-limit", cfg.scan_limit, "largest field to scan")->capture_default_str();
  }
  c_verify->add_option("--a", a, "trace of x (all when omitted)");
  c_verify->add_option("--b", b, "trace of f(x) (all when omitted)");
  c_verify->add_flag("--strict", cfg.strict, "membership with p not dividing r");
  c_charsum->add_option("--g", g, "additive argument (default x)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::bad_input);
  }
  cfg.m = m;
  cfg.nu = nu;
  cfg.f = f;
  cfg.g = g;
  cfg.a = a;
  cfg.b = b;
  cfg.factor_tables = tables;
  cfg.subcommand = app.get_subcommands().front()->get_name();
  Emitter em(cfg, out);
  try {
    if (cfg.format == "csv" && cfg.subcommand != "tables" && cfg.subcommand != "exceptions") {
      throw InputError("csv output is available for tables and exceptions");
    }
    const std::string& s = cfg.subcommand;
    if (s == "factor") cmd_factor(cfg, em);
    else if (s == "suff") cmd_suff(cfg, em);
    else if (s == "sieve") cmd_sieve(cfg, em);
    else if (s == "tables") cmd_tables(cfg, em);
    else if (s == "exceptions") cmd_exceptions(cfg, em);
    else if (s == "verify") cmd_verify(cfg, em);
    else if (s == "charsum") cmd_charsum(cfg, em);
  } catch (const Error& e) {
    err << "pnpair: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::bad_alloc&) {
    err << "pnpair: out of memory\n";
    return static_cast<int>(ExitCode::resource);
  } catch (const std::exception& e) {
    err << "pnpair: internal error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::integrity);
  }
  out.flush();
  return static_cast<int>(ExitCode::ok);
}

}  // namespace pnpair::cli
