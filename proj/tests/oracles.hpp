#pragma once

// Reference computations that share no code with the library: inertia counts,
// schoolbook products, brute-force sums in long double.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using LComplex = std::complex<long double>;
using Dense = std::vector<std::vector<LComplex>>;

inline Dense to_dense(const Eigen::MatrixXcd& m) {
  Dense d(static_cast<std::size_t>(m.rows()), std::vector<LComplex>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = LComplex(m(i, j).real(), m(i, j).imag());
  return d;
}

/// Number of eigenvalues of the Hermitian h below x: the negative pivots of
/// an unpivoted LDL* factorization of h - x (Sylvester's law of inertia).
inline std::size_t count_below(const Dense& h, long double x) {
  Dense m = h;
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) m[i][i] -= x;
  std::size_t negative = 0;
  for (std::size_t k = 0; k < n; ++k) {
    long double d = m[k][k].real();
    if (std::abs(d) < 1e-30L) d = -1e-30L;
    if (d < 0) ++negative;
    for (std::size_t i = k + 1; i < n; ++i) {
      const LComplex factor = m[i][k] / d;
      for (std::size_t j = k + 1; j < n; ++j) m[i][j] -= factor * m[k][j];
    }
  }
  return negative;
}

/// Ascending eigenvalues by bisection on the inertia count.
inline std::vector<double> eigenvalues(const Eigen::MatrixXcd& a) {
  const Dense h = to_dense(a);
  long double bound = 1.0L;
  for (const auto& row : h)
    for (const LComplex& z : row) bound += std::abs(z);
  std::vector<double> out;
  for (std::size_t i = 0; i < h.size(); ++i) {
    long double lo = -bound;
    long double hi = bound;
    for (int it = 0; it < 200; ++it) {
      const long double mid = 0.5L * (lo + hi);
      if (count_below(h, mid) > i) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    out.push_back(static_cast<double>(0.5L * (lo + hi)));
  }
  return out;
}

inline double operator_norm(const Eigen::MatrixXcd& a) {
  const std::vector<double> ev = eigenvalues(a.adjoint() * a);
  return std::sqrt(std::max(0.0, ev.back()));
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& outer, const Eigen::MatrixXcd& inner) {
  const Eigen::Index p = inner.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(outer.rows() * p, outer.cols() * p);
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) = outer(i / p, j / p) * inner(i % p, j % p);
  return out;
}

inline Eigen::MatrixXcd direct_sum(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
  const Eigen::Index n = x.rows() + y.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i < x.rows() && j < x.rows()) out(i, j) = x(i, j);
      if (i >= x.rows() && j >= x.rows()) out(i, j) = y(i - x.rows(), j - x.rows());
    }
  return out;
}

/// Ky Fan: min over rank-r projections of Tr(diag(h) f) is the sum of the r
/// smallest h.
inline double ky_fan_minimum(std::vector<double> h, std::size_t r) {
  std::sort(h.begin(), h.end());
  double s = 0.0;
  for (std::size_t i = 0; i < r; ++i) s += h[i];
  return s;
}

/// tau_k(p_j) straight from the table.
inline long double tau_k_pj(std::size_t k, std::size_t j) {
  if (k < j) return std::ldexp(1.0L, -static_cast<int>(j));
  if (k == j) return 0.5L;
  return 1.0L / (static_cast<long double>(k) * static_cast<long double>(k));
}

/// k^exponent * sum_j c_j tau_k(p_j), summing j up to k + 80.
inline long double catalog_term(const std::function<long double(std::size_t)>& c, std::size_t k, long double exponent,
                                std::vector<long double>& head_cache) {
  // head_cache[k] = sum_{j<k} c_j, extended on demand
  while (head_cache.size() <= k) {
    const std::size_t j = head_cache.size() - 1;
    head_cache.push_back(head_cache.back() + (j >= 1 ? c(j) : 0.0L));
  }
  long double v = head_cache[k] / (static_cast<long double>(k) * static_cast<long double>(k));
  for (std::size_t j = k; j <= k + 80; ++j) v += c(j) * tau_k_pj(k, j);
  return std::pow(static_cast<long double>(k), exponent) * v;
}

/// Plain running average (1/N) sum_{k<=N} s_k for N = 1..n.
inline std::vector<long double> cesaro_averages(const std::function<long double(std::size_t)>& c, std::size_t n,
                                                long double exponent) {
  std::vector<long double> head{0.0L, 0.0L};
  std::vector<long double> out;
  long double sum = 0.0L;
  for (std::size_t k = 1; k <= n; ++k) {
    sum += catalog_term(c, k, exponent, head);
    out.push_back(sum / static_cast<long double>(k));
  }
  return out;
}

}  // namespace oracle
