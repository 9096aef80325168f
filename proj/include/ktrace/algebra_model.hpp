#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ktrace/matrix_core.hpp"

namespace ktrace {

enum class ModelKind { finite_blocks, compact };

/// The concrete C*-algebras everything is evaluated on: a finite direct sum
/// M_{n_1} (+) ... (+) M_{n_r}, or the compact operators viewed through a
/// finite corner of size m (elements are m x m matrices in that corner).
class AlgebraModel {
 public:
  static AlgebraModel finite_blocks(std::vector<std::size_t> dims) {
    require(!dims.empty(), ErrorCode::InvalidArgument, "block algebra needs at least one block");
    for (std::size_t d : dims) require(d >= 1, ErrorCode::InvalidArgument, "block dimensions must be >= 1");
    AlgebraModel m;
    m.kind_ = ModelKind::finite_blocks;
    m.blocks_ = std::move(dims);
    return m;
  }

  static AlgebraModel compact(std::size_t corner) {
    require(corner >= 1, ErrorCode::InvalidArgument, "corner size must be >= 1");
    AlgebraModel m;
    m.kind_ = ModelKind::compact;
    m.blocks_ = {corner};
    return m;
  }

  ModelKind kind() const { return kind_; }
  bool is_compact() const { return kind_ == ModelKind::compact; }
  const std::vector<std::size_t>& blocks() const { return blocks_; }
  std::size_t block_count() const { return blocks_.size(); }
  std::size_t corner() const { return inner_dim(); }
  std::size_t inner_dim() const { return std::accumulate(blocks_.begin(), blocks_.end(), std::size_t{0}); }

  AlgebraModel with_corner(std::size_t m) const {
    require(is_compact(), ErrorCode::InvalidArgument, "only the compact model has corners");
    return compact(m);
  }

  std::vector<int> inner_labels() const {
    std::vector<int> labels;
    labels.reserve(inner_dim());
    for (std::size_t b = 0; b < blocks_.size(); ++b) labels.insert(labels.end(), blocks_[b], static_cast<int>(b));
    return labels;
  }

  std::vector<int> labels(std::size_t level) const {
    const std::vector<int> inner = inner_labels();
    std::vector<int> out;
    out.reserve(level * inner.size());
    for (std::size_t i = 0; i < level; ++i) out.insert(out.end(), inner.begin(), inner.end());
    return out;
  }

  friend bool operator==(const AlgebraModel& x, const AlgebraModel& y) {
    return x.kind_ == y.kind_ && x.blocks_ == y.blocks_;
  }

 private:
  AlgebraModel() = default;
  ModelKind kind_ = ModelKind::finite_blocks;
  std::vector<std::size_t> blocks_;
};

/// An element of M_k(A) for a model A. Index (i, s) of the matrix is i*inner + s.
///
/// On the compact model an element may also carry a formal infinite-rank
/// component t (x) D, where t is a k x k scalar matrix and D a fixed positive
/// infinite-rank compact operator orthogonal to every corner. It only exists to
/// exercise the infinite branches of weights; products of the corner part with
/// the formal part vanish.
class ModelElement {
 public:
  ModelElement(AlgebraModel model, std::size_t level, MatrixElement matrix, ComplexMatrix tail = ComplexMatrix())
      : model_(std::move(model)), level_(level), matrix_(std::move(matrix)), tail_(std::move(tail)) {
    require(level_ >= 1, ErrorCode::InvalidArgument, "matrix level must be >= 1");
    require(matrix_.dim() == level_ * model_.inner_dim(), ErrorCode::InvalidArgument,
            "element dim " + std::to_string(matrix_.dim()) + " does not match level * inner dim");
    if (tail_.size() == 0) tail_ = ComplexMatrix::Zero(idx(level_), idx(level_));
    require(tail_.rows() == idx(level_) && tail_.cols() == idx(level_), ErrorCode::InvalidArgument,
            "formal tail must be level x level");
    require(tail_.allFinite(), ErrorCode::InvalidArgument, "formal tail must be finite");
    require(model_.is_compact() || tail_.isZero(0.0), ErrorCode::InvalidArgument,
            "finite block algebras carry no formal infinite-rank part");
    project_onto_blocks();
  }

  static ModelElement zero(const AlgebraModel& model, std::size_t level) {
    return ModelElement(model, level, MatrixElement::zero(level * model.inner_dim()));
  }

  /// kron(s, a): the simple tensor a (x) s with s in M_k(C) and a in A.
  static ModelElement simple_tensor(const ComplexMatrix& s, const ModelElement& a) {
    require(a.level() == 1, ErrorCode::InvalidArgument, "simple tensors take an element of A");
    require(s.rows() == s.cols(), ErrorCode::InvalidArgument, "scalar factor must be square");
    return ModelElement(a.model(), static_cast<std::size_t>(s.rows()), MatrixElement(kron(s, a.matrix().entries())),
                        s * a.tail_(0, 0));
  }

  const AlgebraModel& model() const { return model_; }
  std::size_t level() const { return level_; }
  std::size_t inner_dim() const { return model_.inner_dim(); }
  const MatrixElement& matrix() const { return matrix_; }
  const ComplexMatrix& tail() const { return tail_; }
  bool has_tail(double tolerance = 0.0) const { return !tail_.isZero(0.0) && tail_.cwiseAbs().maxCoeff() > tolerance; }

  /// The (i, j) matrix entry x_ij as an element of A.
  ModelElement entry(std::size_t i, std::size_t j) const {
    require(i < level_ && j < level_, ErrorCode::InvalidArgument, "entry index out of range");
    const auto n = idx(inner_dim());
    ComplexMatrix block = matrix_.entries().block(idx(i) * n, idx(j) * n, n, n);
    ComplexMatrix t(1, 1);
    t(0, 0) = tail_(idx(i), idx(j));
    return ModelElement(model_, 1, MatrixElement(std::move(block)), std::move(t));
  }

  ModelElement adjoint() const { return ModelElement(model_, level_, matrix_.adjoint(), tail_.adjoint()); }

  /// Zero padding M_k(A) -> M_{k'}(A), k' >= k.
  ModelElement embed_level(std::size_t new_level) const {
    require(new_level >= level_, ErrorCode::InvalidArgument, "cannot embed into a smaller level");
    const auto n = idx(inner_dim());
    ComplexMatrix m = ComplexMatrix::Zero(idx(new_level) * n, idx(new_level) * n);
    m.topLeftCorner(idx(level_) * n, idx(level_) * n) = matrix_.entries();
    ComplexMatrix t = ComplexMatrix::Zero(idx(new_level), idx(new_level));
    t.topLeftCorner(idx(level_), idx(level_)) = tail_;
    return ModelElement(model_, new_level, MatrixElement(std::move(m)), std::move(t));
  }

  /// Compact model only: view the element inside a larger corner.
  ModelElement embed_corner(std::size_t corner) const {
    require(model_.is_compact() && corner >= inner_dim(), ErrorCode::InvalidArgument,
            "corner embedding needs the compact model and a larger corner");
    const auto n = idx(inner_dim());
    const auto m = idx(corner);
    ComplexMatrix out = ComplexMatrix::Zero(idx(level_) * m, idx(level_) * m);
    for (Eigen::Index i = 0; i < idx(level_); ++i) {
      for (Eigen::Index j = 0; j < idx(level_); ++j) {
        out.block(i * m, j * m, n, n) = matrix_.entries().block(i * n, j * n, n, n);
      }
    }
    return ModelElement(model_.with_corner(corner), level_, MatrixElement(std::move(out)), tail_);
  }

  /// Block-diagonal sum over the matrix level: x (+) y in M_{k+l}(A).
  friend ModelElement level_sum(const ModelElement& x, const ModelElement& y) {
    require(x.model_ == y.model_, ErrorCode::InvalidArgument, "models differ");
    ComplexMatrix t = ComplexMatrix::Zero(x.tail_.rows() + y.tail_.rows(), x.tail_.cols() + y.tail_.cols());
    t.topLeftCorner(x.tail_.rows(), x.tail_.cols()) = x.tail_;
    t.bottomRightCorner(y.tail_.rows(), y.tail_.cols()) = y.tail_;
    return ModelElement(x.model_, x.level_ + y.level_,
                        MatrixElement(direct_sum(x.matrix_, y.matrix_).entries()), std::move(t));
  }

  bool is_positive(double tolerance = tol::projection) const {
    if (!ktrace::is_positive(matrix_, tolerance)) return false;
    if (!has_tail()) return true;
    return ktrace::is_positive(MatrixElement(tail_), tolerance);
  }

  bool is_projection(double tolerance = tol::projection) const {
    return !has_tail(tolerance) && ktrace::is_projection(matrix_, tolerance);
  }

  friend ModelElement operator+(const ModelElement& x, const ModelElement& y) {
    check_compatible(x, y);
    return ModelElement(x.model_, x.level_, x.matrix_ + y.matrix_, x.tail_ + y.tail_);
  }
  friend ModelElement operator-(const ModelElement& x, const ModelElement& y) {
    check_compatible(x, y);
    return ModelElement(x.model_, x.level_, x.matrix_ - y.matrix_, x.tail_ - y.tail_);
  }
  friend ModelElement operator*(const ModelElement& x, const ModelElement& y) {
    check_compatible(x, y);
    return ModelElement(x.model_, x.level_, x.matrix_ * y.matrix_, x.tail_ * y.tail_);
  }
  friend ModelElement operator*(Complex s, const ModelElement& x) {
    return ModelElement(x.model_, x.level_, s * x.matrix_, s * x.tail_);
  }

 private:
  static Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

  static void check_compatible(const ModelElement& x, const ModelElement& y) {
    require(x.model_ == y.model_ && x.level_ == y.level_, ErrorCode::InvalidArgument,
            "elements live in different matrix algebras");
  }

  // Entries linking different summands must vanish; round-off below the
  // threshold is cleared so the element stays exactly block structured.
  void project_onto_blocks() {
    std::vector<int> labels = model_.labels(level_);
    if (model_.block_count() > 1) {
      ComplexMatrix m = matrix_.entries();
      const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
          if (labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)]) continue;
          require(std::abs(m(i, j)) <= 1e-9 * scale, ErrorCode::InvalidArgument,
                  "matrix is not in the block algebra: entry links two summands");
          m(i, j) = 0.0;
        }
      }
      matrix_ = MatrixElement(std::move(m), std::move(labels));
    } else {
      matrix_ = matrix_.with_blocks(std::move(labels));
    }
  }

  AlgebraModel model_;
  std::size_t level_;
  MatrixElement matrix_;
  ComplexMatrix tail_;
};

/// Element (a, lambda) of M_n(A^dagger): a in M_n(A), lambda in M_n(C), with
/// (a,l)(b,m) = (ab + l b + m a, l m) where l b means (l (x) 1) b.
class UnitizedElement {
 public:
  UnitizedElement(ModelElement a, ComplexMatrix lambda) : a_(std::move(a)), lambda_(std::move(lambda)) {
    require(lambda_.rows() == static_cast<Eigen::Index>(a_.level()) && lambda_.cols() == lambda_.rows(),
            ErrorCode::InvalidArgument, "scalar part must be level x level");
    require(lambda_.allFinite(), ErrorCode::InvalidArgument, "scalar part must be finite");
  }

  static UnitizedElement from_algebra(ModelElement a) {
    const auto k = static_cast<Eigen::Index>(a.level());
    return UnitizedElement(std::move(a), ComplexMatrix::Zero(k, k));
  }

  static UnitizedElement scalar(const AlgebraModel& model, ComplexMatrix lambda) {
    const auto k = static_cast<std::size_t>(lambda.rows());
    return UnitizedElement(ModelElement::zero(model, k), std::move(lambda));
  }

  static UnitizedElement identity(const AlgebraModel& model, std::size_t level) {
    const auto k = static_cast<Eigen::Index>(level);
    return scalar(model, ComplexMatrix::Identity(k, k));
  }

  /// Inverse of representation(): reads lambda off the scalar summand and
  /// subtracts lambda (x) 1 from the algebra summand.
  static UnitizedElement from_representation(const AlgebraModel& model, std::size_t level, const MatrixElement& rep) {
    const auto n = static_cast<Eigen::Index>(model.inner_dim());
    const auto k = static_cast<Eigen::Index>(level);
    require(rep.dim() == static_cast<std::size_t>(k * n + k), ErrorCode::InvalidArgument,
            "representation has the wrong size");
    const ComplexMatrix& r = rep.entries();
    require(detail::frobenius(r.topRightCorner(k * n, k)) <= 1e-9 * std::max(1.0, detail::frobenius(r)) &&
                detail::frobenius(r.bottomLeftCorner(k, k * n)) <= 1e-9 * std::max(1.0, detail::frobenius(r)),
            ErrorCode::InvalidArgument, "representation mixes the algebra and scalar summands");
    ComplexMatrix lambda = r.bottomRightCorner(k, k);
    ComplexMatrix a = r.topLeftCorner(k * n, k * n) - kron(lambda, ComplexMatrix::Identity(n, n));
    return UnitizedElement(ModelElement(model, level, MatrixElement(std::move(a))), std::move(lambda));
  }

  const ModelElement& algebra_part() const { return a_; }
  const ComplexMatrix& scalar_part() const { return lambda_; }
  const AlgebraModel& model() const { return a_.model(); }
  std::size_t level() const { return a_.level(); }

  /// Faithful finite representation (a + lambda (x) 1) (+) lambda. The last
  /// summand records the character A^dagger -> C.
  MatrixElement representation() const {
    require(!a_.has_tail(), ErrorCode::InvalidArgument, "formal infinite-rank parts have no finite representation");
    const auto n = static_cast<Eigen::Index>(a_.inner_dim());
    const auto k = static_cast<Eigen::Index>(level());
    ComplexMatrix r = ComplexMatrix::Zero(k * n + k, k * n + k);
    r.topLeftCorner(k * n, k * n) = a_.matrix().entries() + kron(lambda_, ComplexMatrix::Identity(n, n));
    r.bottomRightCorner(k, k) = lambda_;
    std::vector<int> tags = a_.model().labels(level());
    tags.insert(tags.end(), static_cast<std::size_t>(k), static_cast<int>(a_.model().block_count()));
    return MatrixElement(std::move(r), std::move(tags));
  }

  UnitizedElement adjoint() const { return UnitizedElement(a_.adjoint(), lambda_.adjoint()); }

  friend UnitizedElement operator+(const UnitizedElement& x, const UnitizedElement& y) {
    return UnitizedElement(x.a_ + y.a_, x.lambda_ + y.lambda_);
  }
  friend UnitizedElement operator-(const UnitizedElement& x, const UnitizedElement& y) {
    return UnitizedElement(x.a_ - y.a_, x.lambda_ - y.lambda_);
  }
  friend UnitizedElement operator*(Complex s, const UnitizedElement& x) {
    return UnitizedElement(s * x.a_, s * x.lambda_);
  }
  friend UnitizedElement operator*(const UnitizedElement& x, const UnitizedElement& y) {
    const ModelElement lb = x.scalar_times(y.a_, /*on_left=*/true);
    const ModelElement am = y.scalar_times(x.a_, /*on_left=*/false);
    return UnitizedElement(x.a_ * y.a_ + lb + am, x.lambda_ * y.lambda_);
  }

  /// Inverse computed through the faithful representation.
  UnitizedElement inverse() const {
    const MatrixElement rep = representation();
    Eigen::FullPivLU<ComplexMatrix> lu(rep.entries());
    if (!lu.isInvertible()) throw Error(ErrorCode::NotInvertible, "element is not invertible in the unitization");
    return from_representation(model(), level(), MatrixElement(lu.inverse()));
  }

  bool is_projection(double tolerance = tol::projection) const {
    return !a_.has_tail() && ktrace::is_projection(representation(), tolerance);
  }

  friend UnitizedElement level_sum(const UnitizedElement& x, const UnitizedElement& y) {
    ComplexMatrix l = ComplexMatrix::Zero(x.lambda_.rows() + y.lambda_.rows(), x.lambda_.cols() + y.lambda_.cols());
    l.topLeftCorner(x.lambda_.rows(), x.lambda_.cols()) = x.lambda_;
    l.bottomRightCorner(y.lambda_.rows(), y.lambda_.cols()) = y.lambda_;
    return UnitizedElement(level_sum(x.a_, y.a_), std::move(l));
  }

  UnitizedElement embed_level(std::size_t new_level) const {
    const auto k = static_cast<Eigen::Index>(level());
    ComplexMatrix l = ComplexMatrix::Zero(static_cast<Eigen::Index>(new_level), static_cast<Eigen::Index>(new_level));
    l.topLeftCorner(k, k) = lambda_;
    return UnitizedElement(a_.embed_level(new_level), std::move(l));
  }

 private:
  // (lambda (x) 1) b when on_left, b (lambda (x) 1) otherwise.
  ModelElement scalar_times(const ModelElement& b, bool on_left) const {
    const auto n = static_cast<Eigen::Index>(b.inner_dim());
    const ComplexMatrix s = kron(lambda_, ComplexMatrix::Identity(n, n));
    ComplexMatrix m = on_left ? ComplexMatrix(s * b.matrix().entries()) : ComplexMatrix(b.matrix().entries() * s);
    ComplexMatrix t = on_left ? ComplexMatrix(lambda_ * b.tail()) : ComplexMatrix(b.tail() * lambda_);
    return ModelElement(b.model(), b.level(), MatrixElement(std::move(m)), std::move(t));
  }

  ModelElement a_;
  ComplexMatrix lambda_;
};

}  // namespace ktrace
