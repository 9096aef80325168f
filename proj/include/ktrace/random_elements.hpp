#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "ktrace/algebra_model.hpp"
#include "ktrace/matrix_core.hpp"

namespace ktrace {

using Rng = std::mt19937_64;

/// Complex Gaussian matrix, entries (x + iy)/sqrt(2) with x, y standard normal.
inline ComplexMatrix random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = Complex(normal(rng), normal(rng)) / std::sqrt(2.0);
  return m;
}

inline ComplexMatrix random_hermitian(Eigen::Index n, Rng& rng) {
  const ComplexMatrix g = random_gaussian(n, n, rng);
  return 0.5 * (g + g.adjoint());
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the phases of R's
/// diagonal moved into Q.
inline ComplexMatrix random_unitary(Eigen::Index n, Rng& rng) {
  const ComplexMatrix g = random_gaussian(n, n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = std::abs(r(i, i));
    if (a > 0.0) q.col(i) *= r(i, i) / a;
  }
  return q;
}

/// Projection of the given rank onto a Haar-random subspace.
inline ComplexMatrix random_projection_matrix(Eigen::Index n, Eigen::Index rank, Rng& rng) {
  require(rank >= 0 && rank <= n, ErrorCode::InvalidArgument, "projection rank must lie in [0, n]");
  if (rank == 0) return ComplexMatrix::Zero(n, n);
  const ComplexMatrix u = random_unitary(n, rng);
  const ComplexMatrix frame = u.leftCols(rank);
  return frame * frame.adjoint();
}

/// 0 <= a <= 1 with uniformly drawn eigenvalues.
inline ComplexMatrix random_positive_contraction(Eigen::Index n, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const ComplexMatrix u = random_unitary(n, rng);
  Eigen::VectorXcd d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = unit(rng);
  return u * d.asDiagonal() * u.adjoint();
}

inline MatrixElement random_projection(std::size_t n, std::size_t rank, Rng& rng) {
  return MatrixElement(random_projection_matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(rank), rng));
}

namespace detail {

/// Indices of M_k(A) grouped by summand label.
inline std::map<int, std::vector<Eigen::Index>> label_groups(const std::vector<int>& labels) {
  std::map<int, std::vector<Eigen::Index>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(static_cast<Eigen::Index>(i));
  return groups;
}

/// Fill each summand block of an n x n matrix with make(block_size).
template <typename Make>
ComplexMatrix scatter_blocks(const std::vector<int>& labels, Make&& make) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (const auto& [label, idx] : label_groups(labels)) {
    const ComplexMatrix block = make(label, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < idx.size(); ++j)
        out(idx[i], idx[j]) = block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return out;
}

}  // namespace detail

inline ModelElement random_model_element(const AlgebraModel& model, std::size_t level, Rng& rng) {
  const ComplexMatrix m =
      detail::scatter_blocks(model.labels(level), [&](int, Eigen::Index d) { return random_gaussian(d, d, rng); });
  return ModelElement(model, level, MatrixElement(m));
}

inline ModelElement random_model_hermitian(const AlgebraModel& model, std::size_t level, Rng& rng) {
  const ComplexMatrix m =
      detail::scatter_blocks(model.labels(level), [&](int, Eigen::Index d) { return random_hermitian(d, rng); });
  return ModelElement(model, level, MatrixElement(m));
}

inline ModelElement random_model_positive(const AlgebraModel& model, std::size_t level, Rng& rng) {
  const ComplexMatrix m = detail::scatter_blocks(
      model.labels(level), [&](int, Eigen::Index d) { return random_positive_contraction(d, rng); });
  return ModelElement(model, level, MatrixElement(m));
}

/// Random projection in M_k(A). Per-summand ranks are drawn uniformly unless
/// given (one rank per block label).
inline ModelElement random_model_projection(const AlgebraModel& model, std::size_t level, Rng& rng,
                                            const std::optional<std::vector<std::size_t>>& ranks = std::nullopt) {
  require(!ranks || ranks->size() == model.block_count(), ErrorCode::InvalidArgument, "one rank per block is required");
  const ComplexMatrix m = detail::scatter_blocks(model.labels(level), [&](int label, Eigen::Index d) {
    Eigen::Index r = 0;
    if (ranks) {
      r = static_cast<Eigen::Index>((*ranks)[static_cast<std::size_t>(label)]);
    } else {
      r = std::uniform_int_distribution<Eigen::Index>(0, d)(rng);
    }
    return random_projection_matrix(d, r, rng);
  });
  return ModelElement(model, level, MatrixElement(m));
}

/// Random projection of M_k(A^dagger), drawn summand by summand in the
/// faithful representation (the scalar summand included).
inline UnitizedElement random_unitized_projection(const AlgebraModel& model, std::size_t level, Rng& rng) {
  const UnitizedElement shape = UnitizedElement::identity(model, level);
  const std::vector<int> labels = shape.representation().block_tags();
  const ComplexMatrix m = detail::scatter_blocks(labels, [&](int, Eigen::Index d) {
    return random_projection_matrix(d, std::uniform_int_distribution<Eigen::Index>(0, d)(rng), rng);
  });
  return UnitizedElement::from_representation(model, level, MatrixElement(m, labels));
}

/// exp(i angle H) for a random Hermitian H of M_k(A^dagger); close to 1 for a
/// small angle.
inline UnitizedElement random_unitized_unitary(const AlgebraModel& model, std::size_t level, Rng& rng, double angle) {
  const UnitizedElement shape = UnitizedElement::identity(model, level);
  const std::vector<int> labels = shape.representation().block_tags();
  const ComplexMatrix h = detail::scatter_blocks(labels, [&](int, Eigen::Index d) { return random_hermitian(d, rng); });
  const HermitianSpectrum s = hermitian_spectrum(MatrixElement(h));
  Eigen::VectorXcd phases(static_cast<Eigen::Index>(s.eigenvalues.size()));
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
    phases(static_cast<Eigen::Index>(i)) = std::polar(1.0, angle * s.eigenvalues[i]);
  const ComplexMatrix w = s.frame * phases.asDiagonal() * s.frame.adjoint();
  return UnitizedElement::from_representation(model, level, MatrixElement(w, labels));
}

}  // namespace ktrace
