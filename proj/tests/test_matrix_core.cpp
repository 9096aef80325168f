#include <catch_amalgamated.hpp>

#include "ktrace/algebra_model.hpp"
#include "ktrace/matrix_core.hpp"
#include "ktrace/random_elements.hpp"
#include "oracles.hpp"

using namespace ktrace;
using Catch::Matchers::WithinAbs;

TEST_CASE("spectrum agrees with the inertia-count oracle", "[matrix]") {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = static_cast<Eigen::Index>(1 + trial % 7);
    const MatrixElement a(random_hermitian(n, rng));
    const HermitianSpectrum s = hermitian_spectrum(a);
    const std::vector<double> expected = oracle::eigenvalues(a.entries());
    REQUIRE(s.eigenvalues.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK_THAT(s.eigenvalues[i], WithinAbs(expected[i], 1e-9));
    CHECK(detail::frobenius(s.reconstruct().entries() - a.entries()) < 1e-10);
    const ComplexMatrix gram = s.frame.adjoint() * s.frame;
    CHECK(detail::frobenius(gram - ComplexMatrix::Identity(n, n)) < 1e-10);
  }
}

TEST_CASE("spectrum of small matrices", "[matrix]") {
  const HermitianSpectrum s = hermitian_spectrum(MatrixElement::diagonal({1, 0, 1}));
  CHECK(s.eigenvalues == std::vector<double>{0, 1, 1});

  ComplexMatrix m(2, 2);
  m << 1, Complex(0, 1), Complex(0, -1), 1;  // eigenvalues 0 and 2
  const HermitianSpectrum t = hermitian_spectrum(MatrixElement(m));
  CHECK_THAT(t.eigenvalues[0], WithinAbs(0.0, 1e-14));
  CHECK_THAT(t.eigenvalues[1], WithinAbs(2.0, 1e-14));
}

TEST_CASE("non-self-adjoint input is rejected", "[matrix]") {
  ComplexMatrix m(2, 2);
  m << 0, 1, 0, 0;
  const auto code = [&] {
    try {
      hermitian_spectrum(MatrixElement(m));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  }();
  CHECK(code == ErrorCode::NotSelfAdjoint);
  CHECK_THROWS_AS(MatrixElement(ComplexMatrix::Zero(2, 3)), Error);
}

TEST_CASE("operator norm matches the oracle", "[matrix]") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = static_cast<Eigen::Index>(1 + trial % 5);
    const MatrixElement a(random_gaussian(n, n, rng));
    CHECK_THAT(operator_norm(a), WithinAbs(oracle::operator_norm(a.entries()), 1e-9));
  }
}

TEST_CASE("gap ramp rounds a near-projection", "[matrix]") {
  const PiecewiseLinearRamp f = PiecewiseLinearRamp::gap_ramp(0.1);
  CHECK(f(0.05) == 0.0);
  CHECK(f(0.95) == 1.0);
  CHECK_THAT(f(0.5), WithinAbs(0.5, 1e-15));
  const MatrixElement r = functional_calculus(f, MatrixElement::diagonal({0.97, 0.02, 1.0}));
  CHECK(is_projection(r));
  CHECK(projection_rank(r) == 2);
  CHECK_THROWS_AS(functional_calculus(f, MatrixElement::diagonal({-0.5, 1.0})), Error);
}

TEST_CASE("unit ladder ramps nest", "[matrix]") {
  for (std::size_t n = 1; n < 50; ++n) {
    const PiecewiseLinearRamp fn = PiecewiseLinearRamp::unit_ladder(n);
    const PiecewiseLinearRamp fm = PiecewiseLinearRamp::unit_ladder(n + 1);
    for (double t = 0.0; t <= 1.0; t += 1.0 / 997.0) {
      CHECK(fn(t) * fm(t) == fn(t));
    }
  }
}

TEST_CASE("classification", "[matrix]") {
  CHECK(classify(MatrixElement::diagonal({1, 0})) == Classification::projection);
  CHECK(classify(MatrixElement::diagonal({0.5, 0})) == Classification::positive);
  CHECK(classify(MatrixElement::diagonal({-0.5, 1})) == Classification::self_adjoint);
  ComplexMatrix m(2, 2);
  m << 0, 1, 0, 0;
  CHECK(classify(MatrixElement(m)) == Classification::general);
  CHECK(projection_rank(MatrixElement::diagonal({1, 1, 0, 1})) == 3);
}

TEST_CASE("kron and direct sum agree with schoolbook loops", "[matrix]") {
  Rng rng(5);
  const ComplexMatrix a = random_gaussian(2, 2, rng);
  const ComplexMatrix b = random_gaussian(3, 3, rng);
  CHECK(detail::frobenius(kron(a, b) - oracle::kron(a, b)) < 1e-14);
  const MatrixElement s = direct_sum(MatrixElement(a), MatrixElement(b));
  CHECK(detail::frobenius(s.entries() - oracle::direct_sum(a, b)) < 1e-14);
}

TEST_CASE("block algebra elements stay block diagonal", "[model]") {
  const AlgebraModel model = AlgebraModel::finite_blocks({2, 3});
  CHECK(model.inner_dim() == 5);
  CHECK(model.labels(2).size() == 10);
  Rng rng(8);
  const ModelElement x = random_model_element(model, 2, rng);
  const ModelElement y = random_model_element(model, 2, rng);
  const ModelElement z = x * y;
  const std::vector<int> labels = model.labels(2);
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = 0; j < labels.size(); ++j)
      if (labels[i] != labels[j]) CHECK(std::abs(z.matrix()(i, j)) == 0.0);
  CHECK_THROWS_AS(ModelElement(model, 1, MatrixElement(random_gaussian(5, 5, rng))), Error);
}

TEST_CASE("unitized products match the representation", "[model]") {
  const AlgebraModel model = AlgebraModel::finite_blocks({1, 2});
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t k = 1 + static_cast<std::size_t>(trial % 2);
    const auto kk = static_cast<Eigen::Index>(k);
    const UnitizedElement x(random_model_element(model, k, rng), random_gaussian(kk, kk, rng));
    const UnitizedElement y(random_model_element(model, k, rng), random_gaussian(kk, kk, rng));
    const ComplexMatrix lhs = (x * y).representation().entries();
    const ComplexMatrix rhs = x.representation().entries() * y.representation().entries();
    CHECK(detail::frobenius(lhs - rhs) < 1e-10);

    const UnitizedElement inv = x.inverse();
    const ComplexMatrix one = (x * inv).representation().entries();
    CHECK(detail::frobenius(one - ComplexMatrix::Identity(one.rows(), one.cols())) < 1e-8);
  }
}

TEST_CASE("level sum and embedding", "[model]") {
  const AlgebraModel model = AlgebraModel::compact(2);
  const ModelElement e(model, 1, MatrixElement::diagonal({1, 0}));
  const ModelElement f(model, 1, MatrixElement::diagonal({0, 1}));
  const ModelElement s = level_sum(e, f);
  CHECK(s.level() == 2);
  CHECK(s.is_projection());
  CHECK(projection_rank(s.matrix()) == 2);
  const ModelElement up = e.embed_level(3);
  CHECK(up.level() == 3);
  CHECK(projection_rank(up.matrix()) == 1);
  const ModelElement wide = e.embed_corner(5);
  CHECK(wide.inner_dim() == 5);
  CHECK(standard_trace(wide.matrix()) == Complex(1, 0));
}
