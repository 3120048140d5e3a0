#pragma once

// Log-domain arithmetic on fields small enough for a full dlog table.
// Nonzero elements are handled as exponents of the context generator, with
// addition through a Zech table; F_q-linear maps act on F_p digit vectors.

#include <cstdint>
#include <memory>
#include <vector>

#include "pnpair/errors.hpp"
#include "pnpair/ext_field.hpp"

namespace pnpair {

class SmallField {
 public:
  using Log = std::uint32_t;
  static constexpr Log kZero = 0xFFFFFFFFu;

  explicit SmallField(FieldPtr ctx, std::uint64_t limit = kDlogLimit)
      : ctx_(ctx), dlog_(std::make_shared<DlogTable>(ctx, limit)) {
    const BaseField& B = ctx_->base();
    n_ = static_cast<std::uint32_t>(dlog_->entries());
    q_ = B.size();
    p_ = B.characteristic();
    dims_ = ctx_->prime_degree();
    half_ = (p_ == 2) ? 0 : n_ / 2;

    zech_.resize(n_);
    for (std::uint32_t e = 0; e < n_; ++e) {
      const std::uint64_t idx = dlog_->exp_index(e);
      const std::uint32_t c0 = static_cast<std::uint32_t>(idx % q_);
      const std::uint64_t moved = idx - c0 + B.add(c0, B.one());
      zech_[e] = moved == 0 ? kZero : dlog_->log_index(moved);
    }

    // Tr(sum c_i X^i) = sum c_i Tr(X^i)
    std::vector<std::uint32_t> tx(ctx_->m());
    FieldElement xi = ctx_->one();
    for (unsigned i = 0; i < ctx_->m(); ++i) {
      tx[i] = ctx_->trace_to_base(xi);
      xi = ctx_->mul(xi, ctx_->root());
    }
    trace_.resize(n_);
    for (std::uint32_t e = 0; e < n_; ++e) {
      std::uint64_t idx = dlog_->exp_index(e);
      std::uint32_t s = 0;
      for (unsigned i = 0; i < ctx_->m(); ++i) {
        s = B.add(s, B.mul(static_cast<std::uint32_t>(idx % q_), tx[i]));
        idx /= q_;
      }
      trace_[e] = s;
    }
  }

  const FieldContext& ctx() const { return *ctx_; }
  const FieldPtr& ctx_ptr() const { return ctx_; }
  const DlogTable& dlog() const { return *dlog_; }
  /// q^m - 1.
  std::uint32_t order() const { return n_; }
  std::uint32_t q() const { return q_; }
  std::uint32_t p() const { return p_; }
  /// Dimension km over F_p.
  unsigned dims() const { return dims_; }

  Log log_of(const FieldElement& x) const { return ctx_->is_zero(x) ? kZero : dlog_->log(x); }
  FieldElement element(Log a) const { return a == kZero ? ctx_->zero() : dlog_->exp(a); }
  std::uint64_t index(Log a) const { return a == kZero ? 0 : dlog_->exp_index(a); }
  Log log_of_index(std::uint64_t idx) const { return idx == 0 ? kZero : dlog_->log_index(idx); }

  Log mul(Log a, Log b) const {
    if (a == kZero || b == kZero) return kZero;
    const std::uint64_t s = std::uint64_t{a} + b;
    return static_cast<Log>(s >= n_ ? s - n_ : s);
  }
  Log inv(Log a) const {
    if (a == kZero) throw DivisionByZero();
    return a == 0 ? 0 : n_ - a;
  }
  Log div(Log a, Log b) const { return mul(a, inv(b)); }
  Log neg(Log a) const {
    if (a == kZero) return kZero;
    const std::uint64_t s = std::uint64_t{a} + half_;
    return static_cast<Log>(s >= n_ ? s - n_ : s);
  }
  Log add(Log a, Log b) const {
    if (a == kZero) return b;
    if (b == kZero) return a;
    const Log d = b >= a ? b - a : b + n_ - a;
    const Log z = zech_[d];
    if (z == kZero) return kZero;
    return mul(a, z);
  }
  Log pow(Log a, std::uint64_t e) const {
    if (e == 0) return 0;
    if (a == kZero) return kZero;
    return static_cast<Log>((static_cast<unsigned __int128>(a) * e) % n_);
  }

  /// Tr_{F_{q^m}/F_q} as a base-field element.
  std::uint32_t trace(Log a) const { return a == kZero ? 0 : trace_[a]; }
  /// Tr_{F_{q^m}/F_p} in [0, p).
  std::uint32_t abs_trace(Log a) const { return ctx_->base().abs_trace(trace(a)); }

  /// F_p coordinates (base-p digits of the dense index), length dims().
  void digits(Log a, std::uint32_t* out) const {
    std::uint64_t idx = index(a);
    for (unsigned b = 0; b < dims_; ++b) {
      out[b] = static_cast<std::uint32_t>(idx % p_);
      idx /= p_;
    }
  }

 private:
  FieldPtr ctx_;
  std::shared_ptr<DlogTable> dlog_;
  std::uint32_t n_ = 0, q_ = 0, p_ = 0, half_ = 0;
  unsigned dims_ = 0;
  std::vector<Log> zech_;
  std::vector<std::uint32_t> trace_;
};

/// An F_q-linear map of F_{q^m} stored as a km x km matrix over F_p.
class LinearMap {
 public:
  LinearMap() = default;

  /// The map y -> h o y.
  static LinearMap module_action(const SmallField& sf, const BasePoly& h) {
    const FieldContext& F = sf.ctx();
    LinearMap L;
    L.p_ = sf.p();
    L.dims_ = sf.dims();
    L.cols_.assign(static_cast<std::size_t>(L.dims_) * L.dims_, 0);
    std::uint64_t unit = 1;
    for (unsigned b = 0; b < L.dims_; ++b, unit *= sf.p()) {
      std::uint64_t img = F.index(F.module_action(h, F.from_index(unit)));
      for (unsigned r = 0; r < L.dims_; ++r) {
        L.cols_[static_cast<std::size_t>(b) * L.dims_ + r] = static_cast<std::uint32_t>(img % sf.p());
        img /= sf.p();
      }
    }
    return L;
  }

  /// True iff the image of the digit vector is nonzero.
  bool nonzero_image(const std::uint32_t* d) const {
    for (unsigned r = 0; r < dims_; ++r) {
      std::uint64_t s = 0;
      for (unsigned b = 0; b < dims_; ++b) {
        if (d[b]) s += std::uint64_t{d[b]} * cols_[static_cast<std::size_t>(b) * dims_ + r];
      }
      if (s % p_) return true;
    }
    return false;
  }

 private:
  std::uint32_t p_ = 2;
  unsigned dims_ = 0;
  std::vector<std::uint32_t> cols_;
};

}  // namespace pnpair
