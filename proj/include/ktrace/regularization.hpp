#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ktrace/algebra_model.hpp"
#include "ktrace/limit_report.hpp"
#include "ktrace/matrix_core.hpp"
#include "ktrace/weight_pairing.hpp"

namespace ktrace {

/// sum_n 2^-n a_n over the given positive contractions.
inline MatrixElement make_strictly_positive(const std::vector<MatrixElement>& dense_sequence) {
  require(!dense_sequence.empty(), ErrorCode::EmptyInput, "need at least one positive contraction");
  const std::size_t n = dense_sequence.front().dim();
  ComplexMatrix sum = ComplexMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  double weight = 1.0;
  for (const MatrixElement& a : dense_sequence) {
    require(a.dim() == n, ErrorCode::InvalidArgument, "all inputs must have the same dimension");
    require(is_positive(a), ErrorCode::NotPositive, "inputs must be positive");
    require(operator_norm(a) <= 1.0 + tol::projection, ErrorCode::InvalidArgument, "inputs must be contractions");
    weight *= 0.5;
    sum += weight * a.entries();
  }
  return MatrixElement(std::move(sum), dense_sequence.front().block_tags());
}

/// d_n = f_n(a0) for a strictly positive generator a0, either a matrix (finite
/// algebra) or a diagonal sequence g_1, g_2, ... (compact model).
class ApproximateUnit {
 public:
  static ApproximateUnit from_matrix(const MatrixElement& a0) {
    require(is_self_adjoint(a0, tol::symmetric(a0.dim())), ErrorCode::NotStrictlyPositive, "generator must be positive");
    ApproximateUnit u;
    u.spectrum_ = hermitian_spectrum(a0);
    u.tags_ = a0.block_tags();
    u.name_ = "matrix";
    if (u.spectrum_.eigenvalues.front() <= tol::inverse) {
      throw Error(ErrorCode::NotStrictlyPositive,
                  "generator has eigenvalue " + std::to_string(u.spectrum_.eigenvalues.front()));
    }
    return u;
  }

  /// g must be positive everywhere; the first 1024 values are checked (2^-k
  /// underflows past k = 1074).
  static ApproximateUnit from_diagonal(std::function<double(std::size_t)> g, std::string name) {
    for (std::size_t k = 1; k <= 1024; ++k) {
      const double v = g(k);
      require(std::isfinite(v) && v > 0.0 && v <= 1.0, ErrorCode::NotStrictlyPositive,
              "diagonal generator must lie in (0, 1], fails at index " + std::to_string(k));
    }
    ApproximateUnit u;
    u.diagonal_ = std::move(g);
    u.name_ = std::move(name);
    return u;
  }

  static ApproximateUnit dyadic() {
    return from_diagonal([](std::size_t k) { return std::ldexp(1.0, -static_cast<int>(k)); }, "dyadic");
  }
  static ApproximateUnit harmonic() {
    return from_diagonal([](std::size_t k) { return 1.0 / static_cast<double>(k); }, "harmonic");
  }

  bool is_diagonal() const { return static_cast<bool>(diagonal_); }
  const std::string& name() const { return name_; }

  /// d_n restricted to the given corner (ignored for a matrix generator).
  MatrixElement d(std::size_t n, std::size_t corner) const {
    const PiecewiseLinearRamp f = PiecewiseLinearRamp::unit_ladder(n);
    if (is_diagonal()) {
      std::vector<double> diag(corner);
      for (std::size_t k = 0; k < corner; ++k) diag[k] = f(diagonal_(k + 1));
      return MatrixElement::diagonal(diag);
    }
    if (covers(n, corner)) return MatrixElement::identity(spectrum_.source_dim).with_blocks(tags_);
    return apply_function(spectrum_, f, tags_);
  }

  /// True when d_n is the identity on the corner, after which d_n a d_n = a for
  /// every a supported there.
  bool covers(std::size_t n, std::size_t corner) const {
    const double threshold = 1.0 / static_cast<double>(n);
    if (is_diagonal()) {
      for (std::size_t k = 1; k <= corner; ++k)
        if (diagonal_(k) < threshold) return false;
      return true;
    }
    return spectrum_.eigenvalues.front() >= threshold;
  }

  double ladder_residual(std::size_t n, std::size_t corner) const {
    const MatrixElement dn = d(n, corner);
    return operator_norm(dn * d(n + 1, corner) - dn);
  }

  double unit_residual(std::size_t n, const MatrixElement& a) const {
    return operator_norm(d(n, a.dim()) * a - a);
  }

 private:
  ApproximateUnit() = default;
  std::function<double(std::size_t)> diagonal_;
  HermitianSpectrum spectrum_;
  std::vector<int> tags_;
  std::string name_;
};

inline ApproximateUnit approximate_unit(const MatrixElement& a0) { return ApproximateUnit::from_matrix(a0); }

struct RegularizationRun {
  std::vector<double> series;  // tau(d_n a d_n), n = 1, 2, ...
  LimitReport report;
};

/// tilde-tau(a) = sup_n tau(d_n a d_n).
///
/// The run stops once d_n covers the corner of a, from where the sequence is
/// constant. Otherwise the report brackets the supremum between the last value
/// and tau(a).
inline RegularizationRun regularize_trace(const WeightSpec& tau, const ApproximateUnit& unit, const ModelElement& a,
                                          std::size_t n_max = 64) {
  require(tau.is_trace(), ErrorCode::InvalidArgument, "regularization takes a trace");
  require(a.level() == 1, ErrorCode::InvalidArgument, "regularization acts on elements of A");
  require(!a.has_tail(), ErrorCode::InvalidArgument, "formal infinite-rank parts cannot be compressed by d_n");
  require(a.is_positive(), ErrorCode::NotPositive, "regularization is evaluated on positive elements");
  require(n_max >= 1, ErrorCode::InvalidArgument, "n_max must be >= 1");
  require(unit.is_diagonal() == a.model().is_compact(), ErrorCode::InvalidArgument,
          "diagonal generators act on the compact model, matrix generators on finite algebras");

  const std::size_t corner = a.matrix().dim();
  RegularizationRun run;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const MatrixElement dn = unit.d(n, corner);
    const ModelElement compressed(a.model(), 1, MatrixElement((dn * a.matrix() * dn).entries()));
    run.series.push_back(evaluate_weight(tau, compressed).value());
    if (unit.covers(n, corner)) {
      run.report = LimitReport::exact(run.series.back(), static_cast<std::int64_t>(n));
      return run;
    }
  }
  const double last = run.series.back();
  const ExtendedValue full = evaluate_weight(tau, a);
  const auto n = static_cast<std::int64_t>(n_max);
  if (full.is_finite() && last >= full.value() - 1e-12) {
    run.report = LimitReport::exact(last, n);
  } else if (full.is_finite()) {
    run.report = LimitReport::bracket(last, full.value(), n);
  } else {
    run.report = LimitReport{LimitStatus::bracketed, last, last, full.value(), full.value(), n};
  }
  return run;
}

/// phi(a) <= tilde-tau(a) + 1e-8 on every sample, given phi <= tau there.
inline bool domination_check(const WeightSpec& phi, const WeightSpec& tau, const ApproximateUnit& unit,
                             const std::vector<ModelElement>& samples, std::size_t n_max = 64) {
  for (const ModelElement& a : samples) {
    const ExtendedValue pa = evaluate_weight(phi, a);
    const ExtendedValue ta = evaluate_weight(tau, a);
    require(pa.value() <= ta.value() + 1e-8, ErrorCode::InvalidArgument, "phi must be dominated by tau on the samples");
    const LimitReport r = regularize_trace(tau, unit, a, n_max).report;
    const double reg = r.converged() ? r.value : r.lo;
    if (pa.value() > reg + 1e-8) return false;
  }
  return true;
}

}  // namespace ktrace
