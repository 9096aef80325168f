#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ktrace/errors.hpp"

namespace ktrace {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

namespace tol {

inline double symmetric(std::size_t n) { return 1e-10 * static_cast<double>(std::max<std::size_t>(n, 1)); }
inline double unitary(std::size_t n) { return symmetric(n); }
inline double reconstruction(std::size_t n, double norm) { return 1e-10 * static_cast<double>(n) * norm; }

inline constexpr double projection = 1e-8;
inline constexpr double inverse = 1e-10;

}  // namespace tol

/// Dense complex square matrix. Optional block tags label every index with the
/// summand it belongs to, e.g. M_2 (+) M_3 is tagged {0,0,1,1,1}.
class MatrixElement {
 public:
  MatrixElement() : entries_(ComplexMatrix::Zero(1, 1)) {}

  explicit MatrixElement(ComplexMatrix entries, std::vector<int> block_tags = {})
      : entries_(std::move(entries)), block_tags_(std::move(block_tags)) {
    require(entries_.rows() == entries_.cols() && entries_.rows() >= 1, ErrorCode::InvalidArgument,
            "matrix must be square with dim >= 1");
    require(entries_.allFinite(), ErrorCode::InvalidArgument, "matrix entries must be finite");
    require(block_tags_.empty() || block_tags_.size() == dim(), ErrorCode::InvalidArgument,
            "block tags must label every index exactly once");
  }

  static MatrixElement zero(std::size_t n) { return MatrixElement(ComplexMatrix::Zero(as_index(n), as_index(n))); }
  static MatrixElement identity(std::size_t n) {
    return MatrixElement(ComplexMatrix::Identity(as_index(n), as_index(n)));
  }
  static MatrixElement diagonal(const std::vector<double>& d) {
    ComplexMatrix m = ComplexMatrix::Zero(as_index(d.size()), as_index(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m(as_index(i), as_index(i)) = d[i];
    return MatrixElement(std::move(m));
  }
  static MatrixElement from_parts(const Eigen::MatrixXd& re, const Eigen::MatrixXd& im) {
    require(re.rows() == im.rows() && re.cols() == im.cols(), ErrorCode::InvalidArgument,
            "real and imaginary parts differ in shape");
    ComplexMatrix m(re.rows(), re.cols());
    m.real() = re;
    m.imag() = im;
    return MatrixElement(std::move(m));
  }

  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  const ComplexMatrix& entries() const { return entries_; }
  Complex operator()(std::size_t i, std::size_t j) const { return entries_(as_index(i), as_index(j)); }

  bool has_blocks() const { return !block_tags_.empty(); }
  const std::vector<int>& block_tags() const { return block_tags_; }
  MatrixElement with_blocks(std::vector<int> tags) const { return MatrixElement(entries_, std::move(tags)); }

  MatrixElement adjoint() const { return MatrixElement(entries_.adjoint(), block_tags_); }

  friend MatrixElement operator+(const MatrixElement& x, const MatrixElement& y) {
    check_same_dim(x, y);
    return MatrixElement(x.entries_ + y.entries_, merged_tags(x, y));
  }
  friend MatrixElement operator-(const MatrixElement& x, const MatrixElement& y) {
    check_same_dim(x, y);
    return MatrixElement(x.entries_ - y.entries_, merged_tags(x, y));
  }
  friend MatrixElement operator*(const MatrixElement& x, const MatrixElement& y) {
    check_same_dim(x, y);
    return MatrixElement(x.entries_ * y.entries_, merged_tags(x, y));
  }
  friend MatrixElement operator*(Complex s, const MatrixElement& x) { return MatrixElement(s * x.entries_, x.block_tags_); }
  friend MatrixElement operator*(double s, const MatrixElement& x) { return MatrixElement(s * x.entries_, x.block_tags_); }
  MatrixElement operator-() const { return MatrixElement(-entries_, block_tags_); }

  static Eigen::Index as_index(std::size_t i) { return static_cast<Eigen::Index>(i); }

 private:
  static void check_same_dim(const MatrixElement& x, const MatrixElement& y) {
    require(x.dim() == y.dim(), ErrorCode::InvalidArgument,
            "dimension mismatch: " + std::to_string(x.dim()) + " vs " + std::to_string(y.dim()));
  }
  static std::vector<int> merged_tags(const MatrixElement& x, const MatrixElement& y) {
    if (!x.has_blocks()) return y.block_tags_;
    if (!y.has_blocks()) return x.block_tags_;
    require(x.block_tags_ == y.block_tags_, ErrorCode::InvalidArgument, "block structures differ");
    return x.block_tags_;
  }

  ComplexMatrix entries_;
  std::vector<int> block_tags_;
};

struct HermitianSpectrum {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix frame;              // unitary, eigenvectors as columns
  std::size_t source_dim = 0;

  MatrixElement reconstruct() const {
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(eigenvalues.data(), static_cast<Eigen::Index>(eigenvalues.size()));
    return MatrixElement(frame * d.cast<Complex>().asDiagonal() * frame.adjoint());
  }
};

/// Continuous piecewise-linear map given by breakpoints; constant beyond the
/// last breakpoint. Segments are left-closed, so a breakpoint's value is exact.
class PiecewiseLinearRamp {
 public:
  explicit PiecewiseLinearRamp(std::vector<std::pair<double, double>> breakpoints)
      : points_(std::move(breakpoints)) {
    require(!points_.empty(), ErrorCode::InvalidArgument, "ramp needs at least one breakpoint");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const auto [t, v] = points_[i];
      require(std::isfinite(t) && v >= 0.0 && v <= 1.0, ErrorCode::InvalidArgument, "ramp values must lie in [0,1]");
      if (i > 0) {
        require(t >= points_[i - 1].first, ErrorCode::InvalidArgument, "breakpoints must be nondecreasing");
        require(t > points_[i - 1].first || v == points_[i - 1].second, ErrorCode::InvalidArgument,
                "ramp must be continuous");
      }
    }
  }

  /// 0 on [0,delta], linear on [delta, 1-delta], 1 on [1-delta, 1].
  static PiecewiseLinearRamp gap_ramp(double delta) {
    require(delta > 0.0 && delta < 0.5, ErrorCode::InvalidArgument, "delta must lie in (0, 1/2)");
    return PiecewiseLinearRamp({{0.0, 0.0}, {delta, 0.0}, {1.0 - delta, 1.0}, {1.0, 1.0}});
  }

  static PiecewiseLinearRamp identity_on_unit_interval() { return PiecewiseLinearRamp({{0.0, 0.0}, {1.0, 1.0}}); }

  /// f_n: 0 on [0, 1/(n+1)], linear on [1/(n+1), 1/n], 1 from 1/n on.
  static PiecewiseLinearRamp unit_ladder(std::size_t n) {
    require(n >= 1, ErrorCode::InvalidArgument, "ladder index starts at 1");
    const double lo = 1.0 / static_cast<double>(n + 1);
    const double hi = 1.0 / static_cast<double>(n);
    return PiecewiseLinearRamp({{0.0, 0.0}, {lo, 0.0}, {hi, 1.0}});
  }

  double operator()(double t) const {
    if (t <= points_.front().first) return points_.front().second;
    if (t >= points_.back().first) return points_.back().second;
    auto next = std::upper_bound(points_.begin(), points_.end(), t,
                                 [](double x, const std::pair<double, double>& p) { return x < p.first; });
    const auto& right = *next;
    const auto& left = *(next - 1);
    if (t == left.first) return left.second;
    const double slope = (right.second - left.second) / (right.first - left.first);
    return left.second + (t - left.first) * slope;
  }

  double domain_begin() const { return points_.front().first; }
  const std::vector<std::pair<double, double>>& breakpoints() const { return points_; }

 private:
  std::vector<std::pair<double, double>> points_;
};

namespace detail {

inline double frobenius(const ComplexMatrix& m) { return m.norm(); }

inline double spectral_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() <= 16) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues()(0);
  }
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

/// ||m|| <= bound, skipping the SVD whenever the Frobenius norm already settles it.
inline bool norm_at_most(const ComplexMatrix& m, double bound) {
  if (frobenius(m) <= bound) return true;
  return spectral_norm(m) <= bound;
}

/// Fix each eigenvector's phase so its largest entry is real and positive.
inline void normalize_phases(ComplexMatrix& frame) {
  for (Eigen::Index c = 0; c < frame.cols(); ++c) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index r = 0; r < frame.rows(); ++r) {
      const double a = std::abs(frame(r, c));
      if (a > best_abs + 1e-12) {
        best_abs = a;
        best = r;
      }
    }
    if (best_abs > 0.0) frame.col(c) *= std::conj(frame(best, c)) / best_abs;
  }
}

}  // namespace detail

inline double operator_norm(const MatrixElement& a) { return detail::spectral_norm(a.entries()); }

inline Complex standard_trace(const MatrixElement& a) { return a.entries().trace(); }

inline bool is_self_adjoint(const MatrixElement& a, double tolerance) {
  return detail::norm_at_most(a.entries() - a.entries().adjoint(), tolerance);
}

inline HermitianSpectrum hermitian_spectrum(const MatrixElement& a) {
  const std::size_t n = a.dim();
  if (!is_self_adjoint(a, tol::symmetric(n))) {
    throw Error(ErrorCode::NotSelfAdjoint, "||a - a*|| exceeds " + std::to_string(tol::symmetric(n)));
  }
  const ComplexMatrix h = 0.5 * (a.entries() + a.entries().adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "eigensolver did not converge");

  HermitianSpectrum spectrum;
  spectrum.source_dim = n;
  spectrum.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
  spectrum.frame = solver.eigenvectors();
  detail::normalize_phases(spectrum.frame);

  const double norm = std::max(std::abs(spectrum.eigenvalues.front()), std::abs(spectrum.eigenvalues.back()));
  const double residual = detail::frobenius(spectrum.reconstruct().entries() - h);
  if (residual > tol::reconstruction(n, norm) && residual > 1e-300) {
    throw Error(ErrorCode::NumericalFailure, "eigen reconstruction residual " + std::to_string(residual));
  }
  return spectrum;
}

/// frame * diag(f(eigenvalues)) * frame^*, for any scalar function f.
template <typename F>
MatrixElement apply_function(const HermitianSpectrum& spectrum, F&& f, std::vector<int> block_tags = {}) {
  Eigen::VectorXcd values(static_cast<Eigen::Index>(spectrum.eigenvalues.size()));
  for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i) {
    values(static_cast<Eigen::Index>(i)) = Complex(f(spectrum.eigenvalues[i]), 0.0);
  }
  return MatrixElement(spectrum.frame * values.asDiagonal() * spectrum.frame.adjoint(), std::move(block_tags));
}

inline MatrixElement functional_calculus(const PiecewiseLinearRamp& f, const MatrixElement& a) {
  const HermitianSpectrum spectrum = hermitian_spectrum(a);
  const double slack = tol::symmetric(a.dim());
  if (spectrum.eigenvalues.front() < f.domain_begin() - slack) {
    throw Error(ErrorCode::DomainExceeded, "eigenvalue " + std::to_string(spectrum.eigenvalues.front()) +
                                               " lies below the ramp's domain");
  }
  return apply_function(spectrum, f, a.block_tags());
}

enum class Classification { projection, positive, self_adjoint, general };

constexpr std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::projection: return "projection";
    case Classification::positive: return "positive";
    case Classification::self_adjoint: return "self-adjoint";
    case Classification::general: return "general";
  }
  return "general";
}

inline Classification classify(const MatrixElement& a, double tolerance = tol::projection) {
  require(tolerance > 0.0, ErrorCode::InvalidArgument, "classification tolerance must be positive");
  if (!is_self_adjoint(a, tolerance)) return Classification::general;
  const ComplexMatrix& m = a.entries();
  if (detail::norm_at_most(m * m - m, tolerance)) return Classification::projection;
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "eigensolver did not converge");
  if (solver.eigenvalues()(0) >= -tolerance) return Classification::positive;
  return Classification::self_adjoint;
}

inline bool is_projection(const MatrixElement& a, double tolerance = tol::projection) {
  return classify(a, tolerance) == Classification::projection;
}

inline bool is_positive(const MatrixElement& a, double tolerance = tol::projection) {
  const Classification c = classify(a, tolerance);
  return c == Classification::projection || c == Classification::positive;
}

/// Number of eigenvalues above 1/2; the rank of a projection.
inline std::size_t projection_rank(const MatrixElement& e) {
  const HermitianSpectrum s = hermitian_spectrum(e);
  return static_cast<std::size_t>(std::count_if(s.eigenvalues.begin(), s.eigenvalues.end(), [](double x) { return x > 0.5; }));
}

/// Kronecker product with the outer factor first: entry (i*n + s, j*n + t) = outer(i,j) * inner(s,t).
inline ComplexMatrix kron(const ComplexMatrix& outer, const ComplexMatrix& inner) {
  ComplexMatrix out(outer.rows() * inner.rows(), outer.cols() * inner.cols());
  for (Eigen::Index i = 0; i < outer.rows(); ++i) {
    for (Eigen::Index j = 0; j < outer.cols(); ++j) {
      out.block(i * inner.rows(), j * inner.cols(), inner.rows(), inner.cols()) = outer(i, j) * inner;
    }
  }
  return out;
}

/// Block-diagonal direct sum x (+) y.
inline MatrixElement direct_sum(const MatrixElement& x, const MatrixElement& y) {
  const auto n = static_cast<Eigen::Index>(x.dim());
  const auto m = static_cast<Eigen::Index>(y.dim());
  ComplexMatrix out = ComplexMatrix::Zero(n + m, n + m);
  out.topLeftCorner(n, n) = x.entries();
  out.bottomRightCorner(m, m) = y.entries();
  std::vector<int> tags;
  if (x.has_blocks() && y.has_blocks()) {
    tags = x.block_tags();
    tags.insert(tags.end(), y.block_tags().begin(), y.block_tags().end());
  }
  return MatrixElement(std::move(out), std::move(tags));
}

}  // namespace ktrace
