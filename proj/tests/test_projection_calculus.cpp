#include <catch_amalgamated.hpp>

#include "ktrace/projection_calculus.hpp"
#include "ktrace/random_elements.hpp"
#include "oracles.hpp"

using namespace ktrace;
using Catch::Matchers::WithinAbs;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("rounding a commuting near-projection", "[projection]") {
  const MatrixElement e = MatrixElement::diagonal({1, 1, 0});
  const MatrixElement a = MatrixElement::diagonal({0.95, 0.98, 0.03});
  const RoundedProjection r = round_to_projection(a, e, 0.1);
  CHECK(detail::frobenius(r.projection.entries() - e.entries()) < 1e-12);
  CHECK(r.distance_to_target <= 0.2);
  CHECK_THAT(r.weight_bound, WithinAbs(1.0 / 0.9, 1e-15));
}

TEST_CASE("rounding rejects gap eigenvalues and distant targets", "[projection]") {
  const MatrixElement e = MatrixElement::diagonal({1, 0});
  CHECK(code_of([&] { round_to_projection(MatrixElement::diagonal({0.5, 0.0}), e, 0.1); }) ==
        ErrorCode::SpectralGapViolation);
  CHECK(code_of([&] { round_to_projection(MatrixElement::diagonal({0.0, 1.0}), e, 0.1); }) ==
        ErrorCode::NotNearProjection);
  CHECK(code_of([&] { round_to_projection(MatrixElement::diagonal({1.0, 0.0}), MatrixElement::diagonal({0.5, 0}), 0.1); }) ==
        ErrorCode::NotProjection);
}

TEST_CASE("similarity conjugates nearby projections", "[projection]") {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 4);
    const MatrixElement e = random_projection(n, 1 + static_cast<std::size_t>(trial) % (n - 1), rng);
    const HermitianSpectrum h = hermitian_spectrum(MatrixElement(random_hermitian(static_cast<Eigen::Index>(n), rng)));
    Eigen::VectorXcd phases(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) phases(static_cast<Eigen::Index>(i)) = std::polar(1.0, 0.15 * h.eigenvalues[i]);
    const ComplexMatrix w = h.frame * phases.asDiagonal() * h.frame.adjoint();
    const MatrixElement e2(w * e.entries() * w.adjoint());
    const SimilarityWitness s = similarity(e, MatrixElement(0.5 * (e2.entries() + e2.entries().adjoint())));
    CHECK(s.half_defect <= s.distance + 1e-12);
    CHECK(s.conjugation_residual <= 1e-8);
    CHECK(detail::frobenius((s.u * s.u_inv).entries() - ComplexMatrix::Identity(s.u.entries().rows(), s.u.entries().cols())) < 1e-9);
  }
}

TEST_CASE("similarity rejects projections at distance one", "[projection]") {
  CHECK(code_of([] { similarity(MatrixElement::diagonal({1, 0}), MatrixElement::diagonal({0, 1})); }) ==
        ErrorCode::TooFarApart);
}

TEST_CASE("polar part of e'gf' is a partial isometry", "[projection]") {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(trial % 3);
    const MatrixElement ep = random_projection(n, 2, rng);
    const MatrixElement fp = random_projection(n, 2, rng);
    const MatrixElement g(random_gaussian(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), rng));
    const EquivalenceWitness w = polar_partial_isometry(ep * g * fp, ep, fp);
    CHECK(w.left_residual() <= 1e-8);
    CHECK(w.right_residual() <= 1e-8);
  }
}

TEST_CASE("polar part with a rank-deficient y", "[projection]") {
  const MatrixElement ep = MatrixElement::diagonal({1, 1, 0});
  const MatrixElement fp = MatrixElement::diagonal({1, 1, 0});
  CHECK(code_of([&] { polar_partial_isometry(MatrixElement::diagonal({1, 0, 0}), ep, fp); }) ==
        ErrorCode::CornerNotInvertible);
  // range of y is smaller than e'
  const MatrixElement small_f = MatrixElement::diagonal({1, 0, 0});
  CHECK(code_of([&] { polar_partial_isometry(MatrixElement::diagonal({1, 0, 0}), ep, small_f); }) ==
        ErrorCode::RangeMismatch);
}

TEST_CASE("orthogonalize moves p to the lower block", "[projection]") {
  Rng rng(2);
  const MatrixElement p = random_projection(3, 2, rng);
  const MatrixElement q = random_projection(3, 1, rng);
  const Orthogonalized o = orthogonalize(p, q);
  const MatrixElement q_pad = direct_sum(q, MatrixElement::zero(3));
  CHECK(operator_norm(o.rotated * q_pad) < 1e-12);
  CHECK(o.witness.left_residual() < 1e-12);
  CHECK(o.witness.right_residual() < 1e-12);
  CHECK(projection_rank(o.rotated) == 2);
}

TEST_CASE("Murray-von Neumann equivalence by block ranks", "[projection]") {
  const std::vector<int> tags{0, 0, 1, 1, 1};
  Rng rng(13);
  const ComplexMatrix u = random_unitary(2, rng);
  ComplexMatrix e = ComplexMatrix::Zero(5, 5);
  ComplexMatrix f = ComplexMatrix::Zero(5, 5);
  e.topLeftCorner(2, 2) = u.leftCols(1) * u.leftCols(1).adjoint();
  e(2, 2) = 1;
  f(1, 1) = 1;
  f(4, 4) = 1;
  const MatrixElement me(e, tags);
  const MatrixElement mf(f, tags);
  CHECK(block_ranks(me) == std::map<int, std::size_t>{{0, 1}, {1, 1}});
  const auto w = mvn_equivalent(me, mf);
  REQUIRE(w.has_value());
  CHECK(w->left_residual() < 1e-10);
  CHECK(w->right_residual() < 1e-10);

  ComplexMatrix g = ComplexMatrix::Zero(5, 5);
  g(2, 2) = 1;
  g(3, 3) = 1;
  CHECK_FALSE(mvn_equivalent(me, MatrixElement(g, tags)).has_value());
}

TEST_CASE("polarization identities", "[projection]") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = static_cast<Eigen::Index>(1 + trial % 5);
    const PolarizationResiduals r =
        polarization_check(MatrixElement(random_gaussian(n, n, rng)), MatrixElement(random_gaussian(n, n, rng)));
    CHECK(r.product_ab <= 1e-10);
    CHECK(r.product_ba <= 1e-10);
  }
}

TEST_CASE("inverse of 1 + ideal element stays in the ideal", "[projection]") {
  const AlgebraModel model = AlgebraModel::finite_blocks({2, 1});
  Rng rng(6);
  // algebra part supported on block 0 only
  ComplexMatrix a = ComplexMatrix::Zero(3, 3);
  a.topLeftCorner(2, 2) = 0.3 * random_gaussian(2, 2, rng);
  const UnitizedElement x(ModelElement(model, 1, MatrixElement(a)), ComplexMatrix::Identity(1, 1) * 2.0);
  const IdealInverseCheck check = inverse_in_ideal_check(x, block_ideal({0}));
  CHECK(check.formula_holds);
  CHECK(check.in_ideal);
  CHECK(static_cast<bool>(check));

  const UnitizedElement singular(ModelElement(model, 1, MatrixElement(a)), ComplexMatrix::Zero(1, 1));
  CHECK(code_of([&] { inverse_in_ideal_check(singular, block_ideal({0})); }) == ErrorCode::NotInvertible);
}
