#pragma once

// Rational functions f = lead * f1/f2 over F_{q^m} in simplest form, and the
// membership test for the admissible class R^n_{q^m}.

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "pnpair/errors.hpp"
#include "pnpair/ext_field.hpp"
#include "pnpair/numtheory.hpp"
#include "pnpair/poly.hpp"

namespace pnpair {

struct RationalFunction {
  ExtPoly f1;  // monic (or zero)
  ExtPoly f2;  // monic, nonzero
  FieldElement lead;

  long n1() const { return f1.is_zero() ? 0 : f1.degree(); }
  long n2() const { return f2.degree(); }
  long n() const { return n1() + n2(); }
  const FieldContext& ctx() const { return f2.f(); }

  std::string to_string() const {
    ExtPoly num = f1.scale(lead);
    return "(" + num.to_string() + ")/(" + f2.to_string() + ")";
  }
};

/// Cancels gcd(num, den), makes both sides monic and moves the scalar into
/// `lead`.
inline RationalFunction reduce(const ExtPoly& num, const ExtPoly& den) {
  if (den.is_zero()) throw InputError("rational function with zero denominator");
  const FieldPtr& fld = den.field();
  RationalFunction r;
  if (num.is_zero()) {
    r.f1 = ExtPoly(fld);
    r.f2 = ExtPoly::one(fld);
    r.lead = fld->zero();
    return r;
  }
  const ExtPoly g = gcd(num, den);
  const ExtPoly a = num / g;
  const ExtPoly b = den / g;
  r.lead = fld->div(a.lead(), b.lead());
  r.f1 = a.monic();
  r.f2 = b.monic();
  return r;
}

/// "(NUM)/(DEN)" or a bare polynomial.
inline RationalFunction parse_rational(const FieldPtr& fld, const std::string& text) {
  std::string t;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
  if (t.empty()) throw InputError("empty rational function");
  // split at a top-level '/'
  int depth = 0;
  std::size_t slash = std::string::npos;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] == '(' || t[i] == '[') ++depth;
    if (t[i] == ')' || t[i] == ']') --depth;
    if (depth < 0) throw InputError("unbalanced parentheses in '" + text + "'");
    if (t[i] == '/' && depth == 0) {
      if (slash != std::string::npos) throw InputError("more than one '/' in '" + text + "'");
      slash = i;
    }
  }
  if (depth != 0) throw InputError("unbalanced parentheses in '" + text + "'");
  auto strip = [&](std::string s) {
    if (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
    if (s.find('(') != std::string::npos || s.find(')') != std::string::npos) {
      throw InputError("nested parentheses are not supported in '" + text + "'");
    }
    return s;
  };
  const std::string num = strip(slash == std::string::npos ? t : t.substr(0, slash));
  const std::string den = slash == std::string::npos ? "1" : strip(t.substr(slash + 1));
  return reduce(ExtPoly::parse(fld, num), ExtPoly::parse(fld, den));
}

/// f(x), or nothing at a pole.
inline std::optional<FieldElement> evaluate(const RationalFunction& f, const FieldElement& x) {
  const FieldContext& F = f.ctx();
  const FieldElement den = f.f2.evaluate(x);
  if (F.is_zero(den)) return std::nullopt;
  return F.div(F.mul(f.lead, f.f1.evaluate(x)), den);
}

struct MembershipEvidence {
  bool in_Rn = false;
  bool condition_i = false;
  BigInt witness_d = 0;  // set when (i) fails
  std::uint64_t d0 = 0;  // gcd of non-x multiplicities (0: none)
  bool condition_ii = false;
  std::optional<ExtPoly> witness_g;  // denominator factor satisfying (ii)
  unsigned witness_r = 0;
  bool strict = false;
  std::uint64_t excluded_set_size = 0;  // |S|
  std::vector<std::pair<ExtPoly, unsigned>> numerator_factors;
  std::vector<std::pair<ExtPoly, unsigned>> denominator_factors;
};

/// Tests both defining conditions. Condition (ii) follows the printed form
/// (q^m does not divide r); strict mode asks p not dividing r instead.
inline MembershipEvidence check_membership(const RationalFunction& f, const IntFactorization& qm_minus_1,
                                           bool strict = false, std::uint64_t seed = 1) {
  if (!qm_minus_1.complete()) throw IncompleteFactorization("q^m - 1 for membership test");
  const FieldContext& F = f.ctx();
  if (qm_minus_1.value != F.order() - 1) throw InputError("factorization does not match q^m - 1");
  MembershipEvidence ev;
  ev.strict = strict;
  if (!f.f1.is_zero() && f.f1.degree() > 0) ev.numerator_factors = f.f1.factor(seed);
  if (f.f2.degree() > 0) ev.denominator_factors = f.f2.factor(seed);

  auto is_x = [&](const ExtPoly& h) { return h.degree() == 1 && F.is_zero(h.coeff(0)); };
  std::uint64_t d0 = 0;
  for (const auto* fs : {&ev.numerator_factors, &ev.denominator_factors}) {
    for (const auto& [h, e] : *fs) {
      if (!is_x(h)) d0 = std::gcd(d0, static_cast<std::uint64_t>(e));
    }
  }
  ev.d0 = d0;
  const BigInt n = qm_minus_1.value;
  if (d0 == 0) {
    ev.condition_i = false;
    ev.witness_d = qm_minus_1.factors.empty() ? BigInt(0) : qm_minus_1.factors.front().prime;
  } else {
    BigInt g;
    const BigInt d0b = from_u64(d0);
    mpz_gcd(g.get_mpz_t(), d0b.get_mpz_t(), n.get_mpz_t());
    ev.condition_i = g == 1;
    if (!ev.condition_i) ev.witness_d = g;
  }

  const BigInt qm = F.order();
  const std::uint32_t p = F.characteristic();
  for (const auto& [h, r] : ev.denominator_factors) {
    const bool ok = strict ? (r % p != 0) : !mpz_divisible_p(BigInt(r).get_mpz_t(), qm.get_mpz_t());
    if (ok) {
      ev.condition_ii = true;
      ev.witness_g = h;
      ev.witness_r = r;
      break;
    }
  }
  ev.in_Rn = ev.condition_i && ev.condition_ii;

  // S: zeros of f1 and f2 in F_{q^m}, together with 0
  std::uint64_t roots = 1;
  for (const auto* fs : {&ev.numerator_factors, &ev.denominator_factors}) {
    for (const auto& [h, e] : *fs) {
      if (h.degree() == 1 && !is_x(h)) ++roots;
    }
  }
  ev.excluded_set_size = roots;
  return ev;
}

inline nlohmann::json membership_json(const MembershipEvidence& ev) {
  nlohmann::json j = {{"in_Rn", ev.in_Rn},
                      {"condition_i", ev.condition_i},
                      {"d0", ev.d0},
                      {"condition_ii", ev.condition_ii},
                      {"strict", ev.strict},
                      {"excluded_set_size", ev.excluded_set_size}};
  if (!ev.condition_i) j["witness_d"] = to_string(ev.witness_d);
  if (ev.witness_g) {
    j["witness_g"] = ev.witness_g->to_string();
    j["witness_r"] = ev.witness_r;
  }
  return j;
}

}  // namespace pnpair
