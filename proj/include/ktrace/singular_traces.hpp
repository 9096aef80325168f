#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ktrace/dimension_group.hpp"
#include "ktrace/limit_report.hpp"

namespace ktrace {

struct SingularTauOptions {
  std::int64_t n_max = 100000;
  std::size_t truncation = 60;  // J: terms of the geometric tail kept past k
  CesaroOptions cesaro{};
};

/// s_k = k^exponent tau_k(x), k = 1..n_max, with the largest per-term
/// truncation error.
struct SingularTauTerms {
  std::vector<double> terms;
  double truncation_error = 0.0;
};

namespace detail {

/// Catalog series: tau_k(sum c_j p_j) = S_{<k} / k^2 + c_k / 2 + sum_{j>k} c_j 2^-j,
/// S_{<k} = sum_{j<k} c_j. The geometric tail keeps J terms past k.
inline SingularTauTerms catalog_terms(const FormalPositiveSeries& s, double exponent, std::int64_t n_max,
                                      std::size_t J) {
  const auto n = static_cast<std::size_t>(n_max);
  const std::size_t len = s.length ? *s.length : n + J + 1;
  std::vector<double> c(n + J + 2, 0.0);
  for (std::size_t j = 1; j < c.size() && j <= len; ++j) c[j] = s.coefficient(j);

  SingularTauTerms out;
  out.terms.resize(n);
  double head = 0.0;  // S_{<k}, compensated
  double carry = 0.0;
  const bool square = exponent == 2.0;
  for (std::size_t k = 1; k <= n; ++k) {
    double tail = 0.0;
    for (std::size_t i = J; i >= 1; --i) tail = 0.5 * (tail + c[k + i]);
    tail = std::ldexp(tail, -static_cast<int>(k));
    const double kd = static_cast<double>(k);
    const double head_scale = square ? 1.0 : std::pow(kd, exponent - 2.0);
    const double weight = square ? kd * kd : std::pow(kd, exponent);
    out.terms[k - 1] = head_scale * (head + carry) + weight * (0.5 * c[k] + tail);
    if (k + J < len) {
      const double dropped = weight * s.coefficient_sup * std::ldexp(1.0, -static_cast<int>(k + J));
      out.truncation_error = std::max(out.truncation_error, dropped);
    }
    const double t = head + c[k];
    carry += std::abs(head) >= std::abs(c[k]) ? (head - t) + c[k] : (c[k] - t) + head;
    head = t;
  }
  return out;
}

/// Finite sums of arbitrary scale elements, evaluated from exact rationals.
inline SingularTauTerms finite_terms(const FormalPositiveSeries& s, double exponent, std::int64_t n_max) {
  require(s.exact(), ErrorCode::InvalidArgument, "finite series need exact coefficients");
  std::vector<std::pair<Rational, DimensionGroupElement>> terms;
  std::size_t tail_start = 1;
  Rational tail_q = 0;
  for (std::size_t j = 1; j <= *s.length; ++j) {
    terms.emplace_back(s.exact_coefficient(j), s.element(j));
    tail_start = std::max(tail_start, terms.back().second.tail_start());
    tail_q += terms.back().first * terms.back().second.tail_q();
  }
  const double q = to_double(tail_q);
  const bool square = exponent == 2.0;

  SingularTauTerms out;
  out.terms.resize(static_cast<std::size_t>(n_max));
  for (std::size_t k = 1; k <= out.terms.size(); ++k) {
    const double kd = static_cast<double>(k);
    if (k >= tail_start) {
      // every element is in its q/k^2 tail: s_k = q k^(exponent - 2)
      out.terms[k - 1] = square ? q : q * std::pow(kd, exponent - 2.0);
      continue;
    }
    Rational v = 0;
    for (const auto& [c, g] : terms) v += c * g.at(k);
    out.terms[k - 1] = square ? to_double(v * Rational(k) * Rational(k)) : to_double(v) * std::pow(kd, exponent);
  }
  return out;
}

inline void widen(LimitReport& r, double err) {
  if (err <= 0.0 || r.unbounded()) return;
  r.lo -= err;
  r.hi += err;
  r.error_bound += 2.0 * err;
}

}  // namespace detail

inline SingularTauTerms singular_tau_terms(const FormalPositiveSeries& s, double exponent,
                                           const SingularTauOptions& opt = {}) {
  require(std::isfinite(exponent) && exponent > 0.0, ErrorCode::InvalidArgument, "exponent must be positive");
  require(opt.n_max >= 1 && opt.truncation >= 1, ErrorCode::InvalidArgument, "n_max and J must be >= 1");
  if (s.catalog) return detail::catalog_terms(s, exponent, opt.n_max, opt.truncation);
  require(s.finite(), ErrorCode::InvalidArgument, "infinite series must use the projection catalog");
  return detail::finite_terms(s, exponent, opt.n_max);
}

/// lim (1/N) sum_{k<=N} tau_k(x) k^exponent, with the truncation error of the
/// terms folded into the report.
inline LimitReport singular_tau(const FormalPositiveSeries& s, double exponent, const SingularTauOptions& opt = {}) {
  const SingularTauTerms t = singular_tau_terms(s, exponent, opt);
  LimitReport r = cesaro_limit(std::span<const double>(t.terms), opt.cesaro);
  detail::widen(r, t.truncation_error);
  return r;
}

inline LimitReport singular_tau(const DimensionGroupElement& g, double exponent, const SingularTauOptions& opt = {}) {
  require(g.is_positive(), ErrorCode::InvalidArgument, "singular traces are evaluated on positive elements");
  return singular_tau(FormalPositiveSeries::single(1, g), exponent, opt);
}

/// Exact value on a projection class: q for exponent 2, and 0 for exponents
/// in (1, 2), where q k^(exponent-2) -> 0.
inline Rational singular_tau_on_projection(const DimensionGroupElement& g, double exponent) {
  require(g.in_scale(), ErrorCode::NotInScale, "projection classes lie in the scale");
  require(exponent > 1.0 && exponent <= 2.0, ErrorCode::InvalidArgument, "exponent must lie in (1, 2]");
  if (exponent == 2.0) return g.tail_q();
  return 0;
}

struct GapWitness {
  LimitReport partial;   // tau(sum_{j<=M} p_j/j^2)
  LimitReport full;      // tau(sum_j p_j/j^2)
  Rational partial_exact;
  double gap_lower_bound = 0.0;  // full.lo - partial.hi
  bool certified = false;        // gap >= 1/2 - combined error bounds
};

/// Certifies tau(sum_{j<=M} p_j/j^2) <= tau(sum_j p_j/j^2) - 1/2.
inline GapWitness lsc_gap_witness(std::size_t m, const SingularTauOptions& opt = {}) {
  require(m >= 1, ErrorCode::InvalidArgument, "M must be >= 1");
  GapWitness w;
  w.partial = singular_tau(FormalPositiveSeries::zeta(m), 2.0, opt);
  w.full = singular_tau(FormalPositiveSeries::zeta(), 2.0, opt);
  for (std::size_t j = 1; j <= m; ++j) w.partial_exact += Rational(1) / (Rational(j) * Rational(j));
  w.gap_lower_bound = w.full.lo - w.partial.hi;
  w.certified = w.partial.converged() && w.full.converged() &&
                w.full.value - w.partial.value >= 0.5 - (w.full.error_bound + w.partial.error_bound);
  return w;
}

/// n -> (t_n, tau(b(x_n))) for a sampled function b.
struct SampledFunctionTrace {
  std::function<double(std::size_t)> weight;
  std::function<double(std::size_t)> sample;
  std::string description;

  /// g = sum_n t_n^-1 f_n (x) a: samples t_n^-1 tau(a) with t_n = n.
  static SampledFunctionTrace g_pattern(double tau_a) {
    return {[](std::size_t n) { return static_cast<double>(n); },
            [tau_a](std::size_t n) { return tau_a / static_cast<double>(n); }, "sum_n t_n^-1 f_n (x) a"};
  }
  /// The first L terms of the g pattern.
  static SampledFunctionTrace truncated(std::size_t L, double tau_a) {
    return {[](std::size_t n) { return static_cast<double>(n); },
            [L, tau_a](std::size_t n) { return n <= L ? tau_a / static_cast<double>(n) : 0.0; },
            "sum_{n<=" + std::to_string(L) + "} t_n^-1 f_n (x) a"};
  }
  /// tau(b(x_n)) = c for every n, with t_n = n.
  static SampledFunctionTrace constant_samples(double c) {
    return {[](std::size_t n) { return static_cast<double>(n); }, [c](std::size_t) { return c; },
            "constant samples"};
  }
};

/// mu(b) = lim (1/N) sum t_n tau(b(x_n)); unbounded averages mean mu(b) = infinity.
inline LimitReport mu_function_trace(const SampledFunctionTrace& f, std::int64_t n_max = 100000,
                                     const CesaroOptions& opt = {}) {
  return cesaro_limit(
      [&](std::int64_t n) {
        const auto k = static_cast<std::size_t>(n);
        const double t = f.weight(k);
        const double v = f.sample(k);
        require(t > 0.0 && std::isfinite(t), ErrorCode::InvalidArgument, "weights t_n must be positive");
        require(v >= 0.0 && std::isfinite(v), ErrorCode::InvalidArgument, "samples must be nonnegative");
        return t * v;
      },
      n_max, opt);
}

}  // namespace ktrace
