#pragma once

#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "ktrace/algebra_model.hpp"
#include "ktrace/matrix_core.hpp"

namespace ktrace {

/// v with v v* = left and v* v = right.
struct EquivalenceWitness {
  MatrixElement v;
  MatrixElement left;
  MatrixElement right;

  double left_residual() const { return detail::spectral_norm((v * v.adjoint() - left).entries()); }
  double right_residual() const { return detail::spectral_norm((v.adjoint() * v - right).entries()); }
};

/// u invertible with u from_proj u^-1 = to_proj.
struct SimilarityWitness {
  MatrixElement u;
  MatrixElement u_inv;
  MatrixElement from_proj;
  MatrixElement to_proj;
  double distance = 0.0;       // ||to - from||
  double half_defect = 0.0;    // ||1 - u/2||
  double conjugation_residual = 0.0;
};

struct RoundedProjection {
  MatrixElement projection;
  double distance_to_target = 0.0;  // ||f(a) - e||, at most 2 delta
  double weight_bound = 1.0;        // psi(f(a)) <= weight_bound * psi(a)
};

/// Round a near-projection 0 <= a <= 1 with spectrum avoiding (delta, 1-delta)
/// to the projection f(a), f the delta gap ramp.
inline RoundedProjection round_to_projection(const MatrixElement& a, const MatrixElement& e, double delta) {
  require(delta > 0.0 && delta < 0.5, ErrorCode::InvalidArgument, "delta must lie in (0, 1/2)");
  require(a.dim() == e.dim(), ErrorCode::InvalidArgument, "a and e differ in dimension");
  require(is_projection(e), ErrorCode::NotProjection, "target e is not a projection");

  const HermitianSpectrum spectrum = hermitian_spectrum(a);
  const double slack = tol::symmetric(a.dim());
  for (double t : spectrum.eigenvalues) {
    const bool low = t >= -slack && t <= delta + slack;
    const bool high = t >= 1.0 - delta - slack && t <= 1.0 + slack;
    if (!low && !high) {
      throw Error(ErrorCode::SpectralGapViolation, "eigenvalue " + std::to_string(t) + " lies in the gap or outside [0,1]");
    }
  }
  const double distance = operator_norm(a - e);
  if (distance > delta + slack) {
    throw Error(ErrorCode::NotNearProjection, "||a - e|| = " + std::to_string(distance) + " exceeds delta");
  }

  RoundedProjection out;
  out.projection = apply_function(spectrum, PiecewiseLinearRamp::gap_ramp(delta), a.block_tags());
  out.distance_to_target = operator_norm(out.projection - e);
  out.weight_bound = 1.0 / (1.0 - delta);
  return out;
}

/// u = (2e' - 1)(2e - 1) + 1, which conjugates e onto e' once ||e - e'|| < 1.
inline SimilarityWitness similarity(const MatrixElement& e, const MatrixElement& e_prime) {
  require(e.dim() == e_prime.dim(), ErrorCode::InvalidArgument, "projections differ in dimension");
  require(is_projection(e) && is_projection(e_prime), ErrorCode::NotProjection, "similarity needs two projections");
  const std::size_t n = e.dim();
  const MatrixElement one = MatrixElement::identity(n);

  SimilarityWitness w{one, one, e, e_prime};
  w.distance = operator_norm(e_prime - e);
  if (w.distance >= 1.0) {
    throw Error(ErrorCode::TooFarApart, "||e - e'|| = " + std::to_string(w.distance) + " >= 1");
  }
  w.u = (2.0 * e_prime - one) * (2.0 * e - one) + one;
  Eigen::FullPivLU<ComplexMatrix> lu(w.u.entries());
  if (!lu.isInvertible()) throw Error(ErrorCode::NumericalFailure, "u is numerically singular");
  w.u_inv = MatrixElement(lu.inverse(), e.block_tags());
  w.half_defect = operator_norm(one - 0.5 * w.u);
  w.conjugation_residual = operator_norm(w.u * e * w.u_inv - e_prime);
  if (w.conjugation_residual > tol::projection) {
    throw Error(ErrorCode::NumericalFailure, "conjugation residual " + std::to_string(w.conjugation_residual));
  }
  return w;
}

/// w = y (y*y)^(-1/2), the inverse square root taken in the corner f' M f'.
inline EquivalenceWitness polar_partial_isometry(const MatrixElement& y, const MatrixElement& e_prime,
                                                 const MatrixElement& f_prime) {
  require(y.dim() == e_prime.dim() && y.dim() == f_prime.dim(), ErrorCode::InvalidArgument, "dimension mismatch");
  require(is_projection(e_prime) && is_projection(f_prime), ErrorCode::NotProjection, "e' and f' must be projections");
  const double scale = std::max(1.0, operator_norm(y));
  require(detail::norm_at_most((e_prime * y - y).entries(), tol::projection * scale) &&
              detail::norm_at_most((y * f_prime - y).entries(), tol::projection * scale),
          ErrorCode::InvalidArgument, "y must satisfy e'y = y = yf'");

  const std::size_t n = y.dim();
  // y*y + (1 - f') is invertible exactly when y*y is invertible in the corner.
  const MatrixElement padded = y.adjoint() * y + (MatrixElement::identity(n) - f_prime);
  const HermitianSpectrum spectrum = hermitian_spectrum(padded);
  if (spectrum.eigenvalues.front() < tol::inverse) {
    throw Error(ErrorCode::CornerNotInvertible,
                "corner spectrum of y*y reaches " + std::to_string(spectrum.eigenvalues.front()));
  }
  const MatrixElement inv_sqrt = apply_function(spectrum, [](double t) { return 1.0 / std::sqrt(t); });

  EquivalenceWitness w{y * inv_sqrt * f_prime, e_prime, f_prime};
  const double lr = w.left_residual();
  const double rr = w.right_residual();
  if (rr > tol::projection) throw Error(ErrorCode::NumericalFailure, "w*w differs from f' by " + std::to_string(rr));
  if (lr > tol::projection) throw Error(ErrorCode::RangeMismatch, "ww* differs from e' by " + std::to_string(lr));
  return w;
}

struct Orthogonalized {
  MatrixElement rotated;        // (S (x) 1)(p (+) 0)(S (x) 1)*, in M_2k(A)
  ComplexMatrix rotation;       // S in M_2k(C)
  EquivalenceWitness witness;   // rotated ~ p (+) 0
};

/// Move p (a k x k matrix over an algebra with the given inner dimension) into
/// the bottom-right k-block of M_2k, where it is orthogonal to anything in the
/// top-left block.
inline Orthogonalized orthogonalize(const MatrixElement& p, const MatrixElement& q, std::size_t inner_dim = 1) {
  require(p.dim() == q.dim(), ErrorCode::InvalidArgument, "p and q differ in dimension");
  require(inner_dim >= 1 && p.dim() % inner_dim == 0, ErrorCode::InvalidArgument, "inner dimension must divide dim");
  require(is_projection(p) && is_projection(q), ErrorCode::NotProjection, "orthogonalize takes projections");
  const auto k = static_cast<Eigen::Index>(p.dim() / inner_dim);

  ComplexMatrix swap = ComplexMatrix::Zero(2 * k, 2 * k);
  swap.topRightCorner(k, k) = ComplexMatrix::Identity(k, k);
  swap.bottomLeftCorner(k, k) = ComplexMatrix::Identity(k, k);
  const MatrixElement s(kron(swap, ComplexMatrix::Identity(static_cast<Eigen::Index>(inner_dim),
                                                           static_cast<Eigen::Index>(inner_dim))));
  const MatrixElement padded = direct_sum(p, MatrixElement::zero(p.dim()));
  const MatrixElement v = s * padded;
  const MatrixElement rotated = v * s.adjoint();
  return Orthogonalized{rotated, swap, EquivalenceWitness{v, rotated, padded}};
}

namespace detail {

inline std::map<int, std::vector<Eigen::Index>> index_blocks(const MatrixElement& x) {
  std::map<int, std::vector<Eigen::Index>> blocks;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    const int label = x.has_blocks() ? x.block_tags()[i] : 0;
    blocks[label].push_back(static_cast<Eigen::Index>(i));
  }
  return blocks;
}

inline ComplexMatrix compress(const ComplexMatrix& m, const std::vector<Eigen::Index>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  ComplexMatrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = m(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  return out;
}

/// Orthonormal basis (columns) of the range of a projection.
inline ComplexMatrix range_frame(const ComplexMatrix& projection) {
  const HermitianSpectrum s = hermitian_spectrum(MatrixElement(projection));
  Eigen::Index rank = 0;
  for (double t : s.eigenvalues) rank += t > 0.5 ? 1 : 0;
  return s.frame.rightCols(rank).eval();
}

}  // namespace detail

/// Per-summand ranks of a projection (one entry per block label, ascending label).
inline std::map<int, std::size_t> block_ranks(const MatrixElement& e) {
  std::map<int, std::size_t> ranks;
  for (const auto& [label, idx] : detail::index_blocks(e)) {
    ranks[label] = static_cast<std::size_t>(detail::range_frame(detail::compress(e.entries(), idx)).cols());
  }
  return ranks;
}

/// Murray-von Neumann equivalence over a (block) matrix algebra: equivalent iff
/// the per-block ranks agree. The witness maps matched eigenvector frames.
inline std::optional<EquivalenceWitness> mvn_equivalent(const MatrixElement& e, const MatrixElement& f) {
  require(e.dim() == f.dim(), ErrorCode::InvalidArgument, "projections differ in dimension");
  require(e.block_tags() == f.block_tags() || !e.has_blocks() || !f.has_blocks(), ErrorCode::InvalidArgument,
          "projections live in different block algebras");
  require(is_projection(e) && is_projection(f), ErrorCode::NotProjection, "mvn_equivalent takes projections");

  const MatrixElement& tagged = e.has_blocks() ? e : f;
  ComplexMatrix v = ComplexMatrix::Zero(static_cast<Eigen::Index>(e.dim()), static_cast<Eigen::Index>(e.dim()));
  for (const auto& [label, idx] : detail::index_blocks(tagged)) {
    const ComplexMatrix ue = detail::range_frame(detail::compress(e.entries(), idx));
    const ComplexMatrix uf = detail::range_frame(detail::compress(f.entries(), idx));
    if (ue.cols() != uf.cols()) return std::nullopt;
    const ComplexMatrix block = ue * uf.adjoint();
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < idx.size(); ++j)
        v(idx[i], idx[j]) = block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return EquivalenceWitness{MatrixElement(std::move(v), tagged.block_tags()), e, f};
}

struct PolarizationResiduals {
  double product_ab = 0.0;
  double product_ba = 0.0;
};

/// Residuals of ab = 1/4 sum_k i^k (b + i^k a*)*(b + i^k a*) and
/// ba = 1/4 sum_k i^k (b + i^k a*)(b + i^k a*)*.
inline PolarizationResiduals polarization_check(const MatrixElement& a, const MatrixElement& b) {
  require(a.dim() == b.dim(), ErrorCode::InvalidArgument, "a and b differ in dimension");
  const ComplexMatrix& am = a.entries();
  const ComplexMatrix& bm = b.entries();
  const ComplexMatrix a_star = am.adjoint();
  ComplexMatrix left = ComplexMatrix::Zero(am.rows(), am.cols());
  ComplexMatrix right = ComplexMatrix::Zero(am.rows(), am.cols());
  Complex ik(1.0, 0.0);
  for (int k = 1; k <= 4; ++k) {
    ik *= Complex(0.0, 1.0);
    const ComplexMatrix c = bm + ik * a_star;
    left += ik * (c.adjoint() * c);
    right += ik * (c * c.adjoint());
  }
  return {detail::spectral_norm(am * bm - 0.25 * left), detail::spectral_norm(bm * am - 0.25 * right)};
}

struct IdealInverseCheck {
  bool formula_holds = false;
  bool in_ideal = false;
  double formula_residual = 0.0;
  std::optional<UnitizedElement> inverse;

  explicit operator bool() const { return formula_holds && in_ideal; }
};

/// Inverts x = (a, k) in M_n(A^dagger) and confirms that the algebra part b of
/// x^-1 = (b, m) satisfies b = k^-1(-am - ab) and lies in the ideal.
inline IdealInverseCheck inverse_in_ideal_check(const UnitizedElement& x,
                                                const std::function<bool(const ModelElement&)>& ideal_member) {
  const ComplexMatrix& k = x.scalar_part();
  Eigen::FullPivLU<ComplexMatrix> klu(k);
  if (!klu.isInvertible()) throw Error(ErrorCode::NotInvertible, "scalar part is singular, so x is not invertible");

  IdealInverseCheck check;
  check.inverse = x.inverse();
  const ModelElement& a = x.algebra_part();
  const ModelElement& b = check.inverse->algebra_part();
  const ComplexMatrix& m = check.inverse->scalar_part();

  const auto n = static_cast<Eigen::Index>(a.inner_dim());
  const ComplexMatrix one = ComplexMatrix::Identity(n, n);
  const ComplexMatrix rhs = -(a.matrix().entries() * kron(m, one)) - a.matrix().entries() * b.matrix().entries();
  const ComplexMatrix b_formula = kron(klu.inverse(), one) * rhs;
  check.formula_residual = detail::spectral_norm(b.matrix().entries() - b_formula);
  check.formula_holds = check.formula_residual <= 1e-9 * std::max(1.0, detail::spectral_norm(b.matrix().entries()));
  check.in_ideal = ideal_member(b);
  return check;
}

/// Membership in the ideal of M_n(A) supported on the given summands of a
/// block algebra.
inline std::function<bool(const ModelElement&)> block_ideal(std::vector<int> allowed_blocks, double tolerance = 1e-9) {
  return [allowed = std::move(allowed_blocks), tolerance](const ModelElement& x) {
    const std::vector<int> labels = x.model().labels(x.level());
    const ComplexMatrix& m = x.matrix().entries();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const int label = labels[static_cast<std::size_t>(i)];
      if (std::find(allowed.begin(), allowed.end(), label) != allowed.end()) continue;
      if (m.row(i).cwiseAbs().maxCoeff() > tolerance || m.col(i).cwiseAbs().maxCoeff() > tolerance) return false;
    }
    return true;
  };
}

}  // namespace ktrace
