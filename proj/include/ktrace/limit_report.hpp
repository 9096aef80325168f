#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "ktrace/errors.hpp"

namespace ktrace {

enum class LimitStatus { converged, bracketed, unbounded };

constexpr std::string_view to_string(LimitStatus s) {
  switch (s) {
    case LimitStatus::converged: return "converged";
    case LimitStatus::bracketed: return "bracketed";
    case LimitStatus::unbounded: return "unbounded";
  }
  return "bracketed";
}

/// Outcome of extracting the limit of a sequence. For a converged report the
/// bracket is the uncertainty interval around value and error_bound is its
/// width; a bracketed report carries [liminf, limsup] estimates instead; an
/// unbounded report stands for the value +infinity.
struct LimitReport {
  LimitStatus status = LimitStatus::bracketed;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double error_bound = 0.0;
  std::int64_t n_used = 0;

  bool converged() const { return status == LimitStatus::converged; }
  bool unbounded() const { return status == LimitStatus::unbounded; }

  static LimitReport exact(double v, std::int64_t n = 0) {
    return {LimitStatus::converged, v, v, v, 0.0, n};
  }
  static LimitReport around(double v, double width, std::int64_t n) {
    return {LimitStatus::converged, v, v - 0.5 * width, v + 0.5 * width, width, n};
  }
  static LimitReport bracket(double lo, double hi, std::int64_t n) {
    return {LimitStatus::bracketed, 0.5 * (lo + hi), lo, hi, hi - lo, n};
  }
  static LimitReport infinite(std::int64_t n) {
    const double inf = std::numeric_limits<double>::infinity();
    return {LimitStatus::unbounded, inf, inf, inf, inf, n};
  }
};

namespace detail {

inline LimitStatus combine_status(const LimitReport& x, const LimitReport& y) {
  if (x.unbounded() || y.unbounded()) return LimitStatus::unbounded;
  if (x.converged() && y.converged()) return LimitStatus::converged;
  return LimitStatus::bracketed;
}

}  // namespace detail

/// Interval arithmetic on reports.
inline LimitReport operator+(const LimitReport& x, const LimitReport& y) {
  LimitReport r{detail::combine_status(x, y), x.value + y.value, x.lo + y.lo, x.hi + y.hi,
                x.error_bound + y.error_bound, std::max(x.n_used, y.n_used)};
  if (r.status == LimitStatus::unbounded) return LimitReport::infinite(r.n_used);
  return r;
}

inline LimitReport operator-(const LimitReport& x, const LimitReport& y) {
  LimitReport r{detail::combine_status(x, y), x.value - y.value, x.lo - y.hi, x.hi - y.lo,
                x.error_bound + y.error_bound, std::max(x.n_used, y.n_used)};
  if (r.status == LimitStatus::unbounded) {
    require(!y.unbounded(), ErrorCode::InvalidArgument, "difference with an infinite subtrahend is undefined");
    return LimitReport::infinite(r.n_used);
  }
  return r;
}

struct CesaroOptions {
  std::int64_t window = 100;
  double error_floor = 1e-6;
  double overflow_guard = 1e9;
};

/// A_N = (1/N) sum_{k<=N} s_k for every N, with compensated summation.
inline std::vector<double> running_averages(std::span<const double> terms) {
  std::vector<double> averages(terms.size());
  double sum = 0.0;
  double carry = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double x = terms[i];
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
    averages[i] = (sum + carry) / static_cast<double>(i + 1);
  }
  return averages;
}

/// Limit of the Cesaro averages of s_1..s_n.
///
/// Eventually constant terms give their constant. Otherwise the averages are
/// sampled (window means) at n, n/2, ..., n/16: increments that shrink
/// geometrically are extrapolated with Aitken's delta-squared step, and the
/// drift between successive extrapolations sets the error bound; increments
/// that do not shrink mean growth (unbounded); anything else is reported as a
/// [min, max] bracket of the late averages.
inline LimitReport cesaro_limit(std::span<const double> terms, const CesaroOptions& opt = {}) {
  const auto n = static_cast<std::int64_t>(terms.size());
  require(n >= 1, ErrorCode::EmptyInput, "cesaro_limit needs at least one term");
  for (double t : terms) require(std::isfinite(t), ErrorCode::InvalidArgument, "sequence terms must be finite");
  const std::vector<double> avg = running_averages(terms);
  const auto at = [&](std::int64_t N) { return avg[static_cast<std::size_t>(N - 1)]; };

  const double last = at(n);
  if (std::abs(last) > opt.overflow_guard && n >= 2 && std::abs(last) >= std::abs(at(n - 1))) {
    return LimitReport::infinite(n);
  }

  const double tail_const = terms.back();
  bool constant_tail = true;
  for (std::int64_t k = n / 2; k < n; ++k) {
    if (terms[static_cast<std::size_t>(k)] != tail_const) {
      constant_tail = false;
      break;
    }
  }
  if (constant_tail && n >= 2) return LimitReport::around(tail_const, opt.error_floor, n);

  const std::int64_t w = std::max<std::int64_t>(1, std::min(opt.window, n / 64));
  const auto window_mean = [&](std::int64_t end) {
    double s = 0.0;
    for (std::int64_t N = end - w + 1; N <= end; ++N) s += at(N);
    return s / static_cast<double>(w);
  };
  double oscillation = 0.0;
  {
    double lo = last, hi = last;
    for (std::int64_t N = std::max<std::int64_t>(1, n - w + 1); N <= n; ++N) {
      lo = std::min(lo, at(N));
      hi = std::max(hi, at(N));
    }
    oscillation = hi - lo;
  }
  const auto late_bracket = [&]() {
    double lo = last, hi = last;
    for (std::int64_t N = std::max<std::int64_t>(1, n / 8); N <= n; ++N) {
      lo = std::min(lo, at(N));
      hi = std::max(hi, at(N));
    }
    return LimitReport::bracket(lo, hi, n);
  };

  if (n / 16 < 2 * w || n < 64) return late_bracket();

  double d[5];
  for (int i = 0; i < 5; ++i) d[i] = window_mean(n >> i);
  const double inc[4] = {d[0] - d[1], d[1] - d[2], d[2] - d[3], d[3] - d[4]};
  const double scale = std::max(1.0, std::abs(d[0]));
  const double flat = 1e-13 * scale;

  if (std::abs(inc[0]) <= flat && std::abs(inc[1]) <= flat) {
    return LimitReport::around(d[0], std::max(opt.error_floor, oscillation), n);
  }

  const bool rising = inc[0] > 0 && inc[1] > 0 && inc[2] > 0 && inc[3] > 0;
  const bool falling = inc[0] < 0 && inc[1] < 0 && inc[2] < 0 && inc[3] < 0;
  if (rising || falling) {
    double r[3];
    for (int i = 0; i < 3; ++i) r[i] = inc[i] / inc[i + 1];
    if (rising && r[0] >= 0.98 && r[1] >= 0.98 && std::abs(inc[0]) > 1e-9 * scale) {
      return LimitReport::infinite(n);
    }
    if (std::all_of(r, r + 3, [](double x) { return x > 0.0 && x < 0.95; })) {
      double l[3];
      for (int i = 0; i < 3; ++i) l[i] = d[i] + inc[i] * r[i] / (1.0 - r[i]);
      // The extrapolations themselves approach the limit at a steady ratio
      // rho, so the error left in l[0] is about spread * rho / (1 - rho).
      const double spread = std::abs(l[0] - l[1]);
      const double previous = std::abs(l[1] - l[2]);
      if (spread <= std::abs(inc[0])) {
        const double rho = previous > 0.0 ? spread / previous : 0.0;
        const double half = rho < 0.9 ? std::max(2.0 * spread, spread * rho / (1.0 - rho)) : 10.0 * spread;
        return LimitReport::around(l[0], std::max({opt.error_floor, 2.0 * half, oscillation}), n);
      }
    }
  }
  return late_bracket();
}

template <typename Generator>
LimitReport cesaro_limit(Generator&& s, std::int64_t n_max, const CesaroOptions& opt = {}) {
  require(n_max >= 1, ErrorCode::InvalidArgument, "n_max must be >= 1");
  std::vector<double> terms(static_cast<std::size_t>(n_max));
  for (std::int64_t k = 1; k <= n_max; ++k) terms[static_cast<std::size_t>(k - 1)] = s(k);
  return cesaro_limit(std::span<const double>(terms), opt);
}

}  // namespace ktrace
