#pragma once

// The three operator families:
//   Jain              P_n(f, x)  = sum_v omega(v, n x) f(v / n)
//   Jain-Baskakov     D(f, x)    = sum_{v>=1} omega(v, n x) E_v[f] + e^{-n x} f(0)
//   King-type         D*(f, x)   = D(f, .) with n x replaced by n r_n(x)
// where E_v[f] = (n-c)/c int p_{n,v-1,c} f is the normalised kernel average.
// Since omega(0, lam) = e^{-lam}, the D sum is sum_{v>=0} omega(v) F_v with F_0 = f(0).

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jainop/core.hpp"
#include "jainop/functions.hpp"
#include "jainop/kernels.hpp"

namespace jainop {

struct EvalResult {
  double x = 0.0;
  double value = 0.0;
  std::int64_t v_terms_used = 0;
  double est_tail_bound = 0.0;
  double quad_error_est = 0.0;
};

/// r_n(x) = (n - 2c)(1 - beta) x / n.
inline double king_transform(const OperatorParams& p, double x) {
  p.require(2, "king_transform");
  if (!(x >= 0.0)) throw DomainError("x must be nonnegative");
  return (p.n - 2.0 * p.c) * (1.0 - p.beta) * x / p.n;
}

/// Kernel averages E_v[f] for one (params, f, cfg), filled lazily. Concurrent
/// readers are safe; a missing entry may be computed twice but is published
/// whole under the write lock.
class KernelAverageCache {
 public:
  KernelAverageCache(OperatorParams p, TestFunction f, EvalConfig cfg)
      : params_(p), f_(std::move(f)), cfg_(cfg) {}

  KernelIntegral get(std::int64_t v) const {
    {
      std::shared_lock lock(mutex_);
      if (v < static_cast<std::int64_t>(entries_.size()) && entries_[v]) return *entries_[v];
    }
    const KernelIntegral k = kernel_average(params_, v, f_, cfg_);
    std::unique_lock lock(mutex_);
    if (v >= static_cast<std::int64_t>(entries_.size())) entries_.resize(v + 1);
    if (!entries_[v]) entries_[v] = k;
    return *entries_[v];
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.has_value();
    return n;
  }

 private:
  OperatorParams params_;
  TestFunction f_;
  EvalConfig cfg_;
  mutable std::shared_mutex mutex_;
  mutable std::vector<std::optional<KernelIntegral>> entries_;
};

/// Evaluator bound to one (kind, params, f, cfg); reuses kernel averages
/// across evaluation points.
class OperatorEvaluator {
 public:
  OperatorEvaluator(OperatorKind kind, OperatorParams params, TestFunction f, EvalConfig cfg = {})
      : kind_(kind), params_(params), f_(std::move(f)), cfg_(cfg) {
    cfg_.validate();
    params_.validate(cfg_.beta_guard);
    if (!f_.value) throw DomainError("test function has no value");
    if (kind_ != OperatorKind::Jain) {
      params_.require(1, "Jain-Baskakov operator");
      if (!params_.exceeds(f_.growth_degree + 1))
        throw IntegrabilityError(f_.name + " has growth degree " + std::to_string(f_.growth_degree) +
                                 ", which needs n > " + std::to_string(f_.growth_degree + 1) + "c");
      if (kind_ == OperatorKind::KingJainBaskakov) params_.require(3, "King-type operator");
      cache_ = std::make_shared<KernelAverageCache>(params_, f_, cfg_);
    }
  }

  OperatorKind kind() const noexcept { return kind_; }
  const OperatorParams& params() const noexcept { return params_; }
  const TestFunction& function() const noexcept { return f_; }
  const EvalConfig& config() const noexcept { return cfg_; }

  /// n x for Jain and Jain-Baskakov, n r_n(x) for King.
  double basis_argument(double x) const {
    return kind_ == OperatorKind::KingJainBaskakov ? params_.n * king_transform(params_, x) : params_.n * x;
  }

  EvalResult evaluate(double x) const {
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("x must be a nonnegative finite number");
    EvalResult out;
    out.x = x;
    if (x == 0.0) {
      out.value = f_(0.0);
      out.v_terms_used = 1;
      return out;
    }
    const double lam = basis_argument(x);
    const double m = f_.growth_constant;
    const int d = f_.growth_degree;
    SeriesResult r;
    if (kind_ == OperatorKind::Jain) {
      const double n = params_.n;
      r = sum_basis_series(
          lam, params_.beta,
          [&](std::int64_t v) { return std::pair{f_(static_cast<double>(v) / n), 0.0}; },
          [&](std::int64_t v) { return m * (1.0 + std::pow(static_cast<double>(v) / n, d)); },
          cfg_.tail_eps, cfg_.v_max);
    } else {
      const double f0 = f_(0.0);
      r = sum_basis_series(
          lam, params_.beta,
          [&](std::int64_t v) {
            if (v == 0) return std::pair{f0, 0.0};
            const auto k = cache_->get(v);
            return std::pair{k.value, k.error_estimate};
          },
          [&](std::int64_t v) {
            return m * (1.0 + normalized_kernel_moment(params_, static_cast<double>(v), d));
          },
          cfg_.tail_eps, cfg_.v_max);
    }
    out.value = r.value;
    out.v_terms_used = std::max<std::int64_t>(r.terms, 1);
    out.est_tail_bound = r.tail_bound;
    out.quad_error_est = r.error_sum;
    return out;
  }

  EvalResult operator()(double x) const { return evaluate(x); }

  std::size_t cached_kernel_averages() const { return cache_ ? cache_->size() : 0; }

 private:
  OperatorKind kind_;
  OperatorParams params_;
  TestFunction f_;
  EvalConfig cfg_;
  std::shared_ptr<KernelAverageCache> cache_;
};

inline EvalResult eval_jain(const OperatorParams& p, const TestFunction& f, double x,
                            const EvalConfig& cfg = {}) {
  return OperatorEvaluator(OperatorKind::Jain, p, f, cfg)(x);
}

inline EvalResult eval_jain_baskakov(const OperatorParams& p, const TestFunction& f, double x,
                                     const EvalConfig& cfg = {}) {
  return OperatorEvaluator(OperatorKind::JainBaskakov, p, f, cfg)(x);
}

inline EvalResult eval_king(const OperatorParams& p, const TestFunction& f, double x,
                            const EvalConfig& cfg = {}) {
  return OperatorEvaluator(OperatorKind::KingJainBaskakov, p, f, cfg)(x);
}

/// Per-point failures collected by eval_grid.
class GridError : public Error {
 public:
  struct Failure {
    std::size_t index;
    double x;
    std::string kind;
    std::string message;
  };

  explicit GridError(std::vector<Failure> failures)
      : Error(describe(failures)), failures_(std::move(failures)) {}

  const std::vector<Failure>& failures() const noexcept { return failures_; }
  std::string_view kind() const noexcept override { return failures_.front().kind; }

 private:
  static std::string describe(const std::vector<Failure>& fs) {
    std::string s = std::to_string(fs.size()) + " grid point(s) failed:";
    for (const auto& f : fs) s += " [" + std::to_string(f.index) + "] x=" + std::to_string(f.x) + ": " + f.message + ";";
    return s;
  }
  std::vector<Failure> failures_;
};

/// Elementwise evaluation; one evaluator (and kernel cache) for all points.
inline std::vector<EvalResult> eval_grid(OperatorKind kind, const OperatorParams& p, const TestFunction& f,
                                         std::span<const double> xs, const EvalConfig& cfg = {}) {
  const OperatorEvaluator op(kind, p, f, cfg);
  std::vector<EvalResult> out(xs.size());
  std::vector<GridError::Failure> failures;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    try {
      out[i] = op(xs[i]);
    } catch (const Error& e) {
      failures.push_back({i, xs[i], std::string(e.kind()), e.what()});
    }
  }
  if (!failures.empty()) throw GridError(std::move(failures));
  return out;
}

}  // namespace jainop
