#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ktrace/errors.hpp"

namespace ktrace {

using Rational = boost::multiprecision::cpp_rational;

inline Rational rational(std::int64_t num, std::int64_t den = 1) {
  require(den != 0, ErrorCode::InvalidArgument, "zero denominator");
  return Rational(num) / Rational(den);
}

inline Rational pow2_inverse(std::size_t j) {
  boost::multiprecision::cpp_int den = 1;
  den <<= static_cast<unsigned>(j);
  return Rational(boost::multiprecision::cpp_int(1), den);
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// A bounded rational sequence a_1, a_2, ... with a_i = q / i^2 for i >= N,
/// stored as the prefix a_1..a_{N-1} plus (q, N) with N minimal.
class DimensionGroupElement {
 public:
  DimensionGroupElement() = default;

  DimensionGroupElement(std::vector<Rational> prefix, Rational q, std::size_t tail_start)
      : prefix_(std::move(prefix)), q_(std::move(q)), n_(tail_start) {
    require(n_ >= 1, ErrorCode::InvalidArgument, "tail start N must be >= 1");
    require(prefix_.size() == n_ - 1, ErrorCode::InvalidArgument,
            "prefix must hold a_1..a_{N-1}: expected " + std::to_string(n_ - 1) + " entries");
    canonicalize();
  }

  const std::vector<Rational>& prefix() const { return prefix_; }
  const Rational& tail_q() const { return q_; }
  std::size_t tail_start() const { return n_; }

  /// a_k, k >= 1.
  Rational at(std::size_t k) const {
    require(k >= 1, ErrorCode::InvalidArgument, "coordinates are indexed from 1");
    if (k < n_) return prefix_[k - 1];
    return q_ / (Rational(k) * Rational(k));
  }

  bool is_zero() const { return n_ == 1 && q_ == 0; }

  /// G^+: the zero element, or every a_n > 0.
  bool is_positive() const {
    if (is_zero()) return true;
    return q_ > 0 && std::all_of(prefix_.begin(), prefix_.end(), [](const Rational& a) { return a > 0; });
  }

  /// The scale: positive with every a_n < 1. Since q/i^2 decreases, the tail
  /// condition reduces to q < N^2.
  bool in_scale() const {
    if (!is_positive()) return false;
    if (!std::all_of(prefix_.begin(), prefix_.end(), [](const Rational& a) { return a < 1; })) return false;
    return q_ < Rational(n_) * Rational(n_);
  }

  friend DimensionGroupElement operator+(const DimensionGroupElement& x, const DimensionGroupElement& y) {
    return combine(x, y, [](const Rational& a, const Rational& b) { return a + b; });
  }
  friend DimensionGroupElement operator-(const DimensionGroupElement& x, const DimensionGroupElement& y) {
    return combine(x, y, [](const Rational& a, const Rational& b) { return a - b; });
  }
  DimensionGroupElement operator-() const { return DimensionGroupElement() - *this; }
  friend DimensionGroupElement operator*(const Rational& t, const DimensionGroupElement& x) {
    std::vector<Rational> p;
    p.reserve(x.prefix_.size());
    for (const Rational& a : x.prefix_) p.push_back(t * a);
    return DimensionGroupElement(std::move(p), t * x.q_, x.n_);
  }

  friend bool operator==(const DimensionGroupElement& x, const DimensionGroupElement& y) {
    return x.n_ == y.n_ && x.q_ == y.q_ && x.prefix_ == y.prefix_;
  }

  /// x <= y in the order of G: y - x in G^+.
  friend bool operator<=(const DimensionGroupElement& x, const DimensionGroupElement& y) {
    return (y - x).is_positive();
  }

 private:
  template <typename Op>
  static DimensionGroupElement combine(const DimensionGroupElement& x, const DimensionGroupElement& y, Op op) {
    const std::size_t n = std::max(x.n_, y.n_);
    std::vector<Rational> p;
    p.reserve(n - 1);
    for (std::size_t k = 1; k < n; ++k) p.push_back(op(x.at(k), y.at(k)));
    return DimensionGroupElement(std::move(p), op(x.q_, y.q_), n);
  }

  void canonicalize() {
    while (n_ > 1) {
      const Rational last_index(n_ - 1);
      if (prefix_.back() != q_ / (last_index * last_index)) break;
      prefix_.pop_back();
      --n_;
    }
  }

  std::vector<Rational> prefix_;
  Rational q_ = 0;
  std::size_t n_ = 1;
};

inline DimensionGroupElement make_element(std::vector<Rational> prefix, Rational q, std::size_t tail_start) {
  return DimensionGroupElement(std::move(prefix), std::move(q), tail_start);
}

/// tau_k(g) = a_k.
inline Rational tau_k(const DimensionGroupElement& g, std::size_t k) {
  require(k >= 1, ErrorCode::InvalidArgument, "tau_k needs k >= 1");
  return g.at(k);
}

/// tau_k(p_j) = 2^-j for k < j, 1/2 for k = j, 1/k^2 for k > j.
inline DimensionGroupElement projection_p(std::size_t j) {
  require(j >= 1, ErrorCode::InvalidArgument, "catalog projections start at j = 1");
  std::vector<Rational> prefix(j - 1, pow2_inverse(j));
  prefix.push_back(rational(1, 2));
  return DimensionGroupElement(std::move(prefix), 1, j + 1);
}

/// sum_j c_j g_j with c_j >= 0 and g_j in the scale. Catalog series use
/// g_j = p_j. Exact coefficients are optional; series with irrational
/// coefficients (j^-1.5) only have the floating-point ones.
struct FormalPositiveSeries {
  std::string name;
  std::function<double(std::size_t)> coefficient;
  std::function<Rational(std::size_t)> exact_coefficient;  // may be empty
  std::function<DimensionGroupElement(std::size_t)> element;
  std::optional<std::size_t> length;                // number of terms; empty = infinite
  std::function<double(std::size_t)> tail_sum_bound;  // >= sum_{j>J} c_j
  double coefficient_sup = 0.0;                       // >= sup_j c_j
  bool catalog = false;

  bool finite() const { return length.has_value(); }
  bool exact() const { return static_cast<bool>(exact_coefficient); }
  std::size_t terms_up_to(std::size_t J) const { return length ? std::min(*length, J) : J; }

  /// sum_j p_j / j^2, optionally cut after M terms.
  static FormalPositiveSeries zeta(std::optional<std::size_t> m = std::nullopt) {
    FormalPositiveSeries s;
    s.name = m ? "zeta2_truncated_" + std::to_string(*m) : "zeta2";
    s.coefficient = [m](std::size_t j) {
      if (m && j > *m) return 0.0;
      return 1.0 / (static_cast<double>(j) * static_cast<double>(j));
    };
    s.exact_coefficient = [m](std::size_t j) {
      if (m && j > *m) return Rational(0);
      return Rational(1) / (Rational(j) * Rational(j));
    };
    s.element = projection_p;
    s.length = m;
    s.tail_sum_bound = [m](std::size_t J) {
      if (m && J >= *m) return 0.0;
      return 1.0 / static_cast<double>(J);
    };
    s.coefficient_sup = 1.0;
    s.catalog = true;
    return s;
  }

  /// sum_j j^-power p_j, power > 1.
  static FormalPositiveSeries power(double power) {
    require(power > 1.0, ErrorCode::InvalidArgument, "coefficient power must exceed 1 for summability");
    FormalPositiveSeries s;
    s.name = "power_" + std::to_string(power);
    s.coefficient = [power](std::size_t j) { return std::pow(static_cast<double>(j), -power); };
    if (power == std::floor(power) && power <= 64.0) {
      const auto e = static_cast<unsigned>(power);
      s.exact_coefficient = [e](std::size_t j) {
        return Rational(1) / Rational(boost::multiprecision::pow(boost::multiprecision::cpp_int(j), e));
      };
    }
    s.element = projection_p;
    s.tail_sum_bound = [power](std::size_t J) { return std::pow(static_cast<double>(J), 1.0 - power) / (power - 1.0); };
    s.coefficient_sup = 1.0;
    s.catalog = true;
    return s;
  }

  /// Finite explicit sum of scale elements.
  static FormalPositiveSeries finite_sum(std::vector<std::pair<Rational, DimensionGroupElement>> terms) {
    require(!terms.empty(), ErrorCode::EmptyInput, "a finite series needs at least one term");
    double sup = 0.0;
    for (const auto& [c, g] : terms) {
      require(c >= 0, ErrorCode::InvalidArgument, "series coefficients must be nonnegative");
      require(g.in_scale(), ErrorCode::NotInScale, "series elements must lie in the scale");
      sup = std::max(sup, to_double(c));
    }
    auto shared = std::make_shared<const std::vector<std::pair<Rational, DimensionGroupElement>>>(std::move(terms));
    FormalPositiveSeries s;
    s.name = "finite_sum";
    s.coefficient = [shared](std::size_t j) { return to_double((*shared)[j - 1].first); };
    s.exact_coefficient = [shared](std::size_t j) { return (*shared)[j - 1].first; };
    s.element = [shared](std::size_t j) { return (*shared)[j - 1].second; };
    s.length = shared->size();
    s.tail_sum_bound = [](std::size_t) { return 0.0; };
    s.coefficient_sup = sup;
    return s;
  }

  static FormalPositiveSeries single(const Rational& c, const DimensionGroupElement& g) {
    return finite_sum({{c, g}});
  }
};

struct ExactSeriesValue {
  Rational value;
  double error = 0.0;  // |true tau_k - value| <= error
};

/// sum_{j<=J} c_j tau_k(g_j) exactly. The dropped tail is bounded by
/// sum_{j>J} c_j (tau_k < 1 on the scale); for catalog series with J >= k,
/// tau_k(p_j) = 2^-j for all dropped j, which gives sup c * 2^-J.
inline ExactSeriesValue series_tau_k(const FormalPositiveSeries& s, std::size_t k, std::size_t J) {
  require(k >= 1 && J >= 1, ErrorCode::InvalidArgument, "k and J must be >= 1");
  require(s.exact(), ErrorCode::InvalidArgument, "series " + s.name + " has no exact coefficients");
  ExactSeriesValue out;
  const std::size_t count = s.terms_up_to(J);
  for (std::size_t j = 1; j <= count; ++j) {
    const Rational c = s.exact_coefficient(j);
    if (c != 0) out.value += c * tau_k(s.element(j), k);
  }
  if (s.finite() && J >= *s.length) return out;
  if (s.catalog && J >= k) {
    out.error = s.coefficient_sup * std::ldexp(1.0, -static_cast<int>(J));
  } else {
    out.error = s.tail_sum_bound(J);
  }
  return out;
}

/// The singular trace on a projection class: its tail coefficient q.
inline Rational k0_pairing_exact(const DimensionGroupElement& g) {
  require(g.in_scale(), ErrorCode::NotInScale, "k0_pairing_exact takes an element of the scale");
  return g.tail_q();
}

}  // namespace ktrace
