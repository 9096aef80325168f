#include <catch_amalgamated.hpp>

#include "ktrace/random_elements.hpp"
#include "ktrace/weight_pairing.hpp"
#include "oracles.hpp"

using namespace ktrace;
using Catch::Matchers::WithinAbs;

namespace {

WeightSpec example_h() { return WeightSpec::diagonal_h(DiagonalSequence{{3.0, 2.0}, 0.5, 0.0, 1.0}); }

ModelElement corner_projection(std::size_t m, std::size_t r, std::size_t offset = 0) {
  std::vector<double> d(m, 0.0);
  for (std::size_t i = offset; i < offset + r; ++i) d[i] = 1.0;
  return ModelElement(AlgebraModel::compact(m), 1, MatrixElement::diagonal(d));
}

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

TEST_CASE("stand-in weights on finite-rank positives", "[weight]") {
  CHECK(evaluate_weight(WeightSpec::finite_rank_trace(), MatrixElement::diagonal({1, 1, 0})).value() == 2.0);
  CHECK(evaluate_weight(WeightSpec::zero_on_finite_rank(), MatrixElement::diagonal({1, 1, 0})).value() == 0.0);
}

TEST_CASE("formal infinite-rank tails", "[weight]") {
  const AlgebraModel model = AlgebraModel::compact(2);
  ComplexMatrix tail(1, 1);
  tail(0, 0) = 1.0;
  const ModelElement x(model, 1, MatrixElement::diagonal({1, 0}), tail);
  CHECK_FALSE(evaluate_weight(WeightSpec::finite_rank_trace(), x).is_finite());
  CHECK_FALSE(evaluate_weight(WeightSpec::zero_on_finite_rank(), x).is_finite());
  CHECK_FALSE(evaluate_weight(WeightSpec::diagonal_h(DiagonalSequence::constant(0.5)), x).is_finite());
  CHECK(evaluate_weight(WeightSpec::diagonal_h(DiagonalSequence::constant(0.0)), x).value() == 0.0);
  // summable h leaves the tail undetermined
  CHECK(code_of([&] { evaluate_weight(WeightSpec::diagonal_h(DiagonalSequence{{}, 0.0, 1.0, 2.0}), x); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("weights reject non-positive input", "[weight]") {
  CHECK(code_of([] { evaluate_weight(WeightSpec::finite_rank_trace(), MatrixElement::diagonal({1, -1})); }) ==
        ErrorCode::NotPositive);
}

TEST_CASE("diagonal weight sums h_s x_ss", "[weight]") {
  Rng rng(1);
  const WeightSpec psi = example_h();
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixElement a(random_positive_contraction(4, rng));
    const double expected = 3.0 * a(0, 0).real() + 2.0 * a(1, 1).real() + 0.5 * (a(2, 2).real() + a(3, 3).real());
    CHECK_THAT(evaluate_weight(psi, a).value(), WithinAbs(expected, 1e-12));
  }
}

TEST_CASE("amplified weight is psi tensor trace", "[weight]") {
  const AlgebraModel model = AlgebraModel::compact(3);
  Rng rng(2);
  const ModelElement a = random_model_positive(model, 1, rng);
  ComplexMatrix s = ComplexMatrix::Zero(2, 2);
  s(0, 0) = 2.0;
  s(1, 1) = 0.5;
  const ModelElement x = ModelElement::simple_tensor(s, a);
  const AmplifiedWeight psi2 = amplify_weight(example_h(), 2);
  CHECK_THAT(psi2(x).value(), WithinAbs(2.5 * evaluate_weight(example_h(), a).value(), 1e-12));
}

TEST_CASE("linear extension through the standard decomposition", "[weight]") {
  const AlgebraModel model = AlgebraModel::finite_blocks({2, 2});
  const WeightSpec tau = WeightSpec::block_trace({1.0, 0.25});
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const ModelElement x = random_model_element(model, 1, rng);
    const auto parts = standard_decomposition(x);
    ModelElement sum = ModelElement::zero(model, 1);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(parts[i].is_positive());
      sum = sum + standard_coefficients[i] * parts[i];
    }
    CHECK(detail::frobenius((sum - x).matrix().entries()) < 1e-10);
    const ComplexMatrix& m = x.matrix().entries();
    const Complex expected = m(0, 0) + m(1, 1) + 0.25 * (m(2, 2) + m(3, 3));
    CHECK(std::abs(linear_extension(tau, x) - expected) < 1e-10);
  }
}

TEST_CASE("ideal membership labels", "[weight]") {
  const AlgebraModel model = AlgebraModel::compact(2);
  ComplexMatrix tail(1, 1);
  tail(0, 0) = 1.0;
  const WeightSpec tau = WeightSpec::finite_rank_trace();
  CHECK(ideal_membership(tau, ModelElement(model, 1, MatrixElement::diagonal({1, 0}))).label == MembershipLabel::in_M_plus);
  CHECK(ideal_membership(tau, ModelElement(model, 1, MatrixElement::diagonal({1, -1}))).label == MembershipLabel::in_M);
  CHECK(ideal_membership(tau, ModelElement(model, 1, MatrixElement::diagonal({1, 0}), tail)).label ==
        MembershipLabel::outside);
}

TEST_CASE("underline-psi on the compact model", "[pairing]") {
  CHECK(underline_psi(example_h(), corner_projection(4, 1)).value == 0.5);
  for (std::size_t r : {1, 2, 5}) {
    const LimitReport rep = underline_psi(example_h(), corner_projection(8, r));
    CHECK(rep.converged());
    CHECK(rep.value == 0.5 * static_cast<double>(r));
  }
  const WeightSpec slow = WeightSpec::diagonal_h(DiagonalSequence{{}, 1.0, 1.0, 1.0});
  const LimitReport rep = underline_psi(slow, corner_projection(4, 2));
  CHECK(rep.n_used == 4096);
  CHECK_THAT(rep.value, WithinAbs(2.0 * (1.0 + 1.0 / 4096.0), 1e-15));
  CHECK(rep.hi - rep.lo <= 1e-2);
  CHECK(code_of([] {
          underline_psi(WeightSpec::diagonal_h(DiagonalSequence{{2.0}, 1.0, 0.0, 1.0}), corner_projection(40, 30),
                        {16});
        }) == ErrorCode::RankExceedsCorner);
}

TEST_CASE("underline-psi is a lower bound: Ky Fan and amplified samples", "[pairing]") {
  Rng rng(99);
  std::uniform_real_distribution<double> hv(0.1, 4.0);
  std::vector<double> h(16);
  for (double& x : h) x = hv(rng);
  const WeightSpec psi = WeightSpec::diagonal_h(DiagonalSequence{h, 1.0, 0.0, 1.0});
  const double min_h = *std::min_element(h.begin(), h.end());
  const AlgebraModel model = AlgebraModel::compact(16);
  for (int trial = 0; trial < 2000; ++trial) {
    const ModelElement f(model, 1, random_projection(16, 2, rng));
    const double v = evaluate_weight(psi, f).value();
    CHECK(v >= oracle::ky_fan_minimum(h, 2) - 1e-10);
    CHECK(v >= underline_psi(psi, f).value - 1e-10);

    const std::size_t r = 1 + static_cast<std::size_t>(trial % 5);
    const ModelElement g(model, 2, random_projection(32, r, rng));
    CHECK(evaluate_weight(psi, g).value() >= static_cast<double>(r) * min_h - 1e-10);
  }
  // the bound is attained at level r: r copies of the minimizing basis vector
  const auto at = static_cast<std::size_t>(std::min_element(h.begin(), h.end()) - h.begin());
  ComplexMatrix e = ComplexMatrix::Zero(48, 48);
  for (std::size_t copy = 0; copy < 3; ++copy) e(static_cast<Eigen::Index>(copy * 16 + at), static_cast<Eigen::Index>(copy * 16 + at)) = 1.0;
  const ModelElement attained(model, 3, MatrixElement(e));
  CHECK_THAT(evaluate_weight(psi, attained).value(), WithinAbs(3.0 * min_h, 1e-14));
  CHECK_THAT(underline_psi(psi, corner_projection(16, 3)).value, WithinAbs(3.0 * min_h, 1e-14));
}

TEST_CASE("underline-psi on finite blocks", "[pairing]") {
  const AlgebraModel model = AlgebraModel::finite_blocks({2, 3});
  const WeightSpec psi = WeightSpec::diagonal_h(DiagonalSequence{{2.0, 0.7, 1.5, 0.9, 3.0}, 1.0, 0.0, 1.0});
  // rank 1 in block 0 and rank 2 in block 1: 0.7 + 2 * 0.9
  const ModelElement e(model, 1, MatrixElement::diagonal({1, 0, 1, 0, 1}));
  CHECK_THAT(underline_psi(psi, e).value, WithinAbs(0.7 + 1.8, 1e-15));
  const ModelElement t(model, 1, MatrixElement::diagonal({1, 1, 1, 0, 0}));
  CHECK_THAT(underline_psi(WeightSpec::block_trace({1.0, 0.25}), t).value, WithinAbs(2.25, 1e-15));
}

TEST_CASE("K_00 pairing is lambda times rank", "[pairing]") {
  const ModelElement e = corner_projection(6, 3);
  const LimitReport r = k00_pairing(example_h(), KClass::k00(e, ModelElement::zero(e.model(), 1)));
  CHECK(r.value == 1.5);
  const LimitReport d = k00_pairing(example_h(), KClass::k00(corner_projection(6, 1), corner_projection(6, 3)));
  CHECK(d.value == -1.0);
}

TEST_CASE("K_0 pairing over the unitization", "[pairing]") {
  const AlgebraModel model = AlgebraModel::finite_blocks({1, 1});
  const WeightSpec tau = WeightSpec::block_trace({1.0, 0.5});
  ComplexMatrix one(1, 1);
  one(0, 0) = 1.0;
  // (1 - e_2) and 1 differ by the class of e_2 in block 1
  const UnitizedElement p(ModelElement(model, 1, MatrixElement::diagonal({0, -1})), one);
  const UnitizedElement q = UnitizedElement::identity(model, 1);
  CHECK_THAT(k0_pairing(tau, KClass::k0(p, q), true), WithinAbs(-0.5, 1e-15));
  CHECK(code_of([&] { k0_pairing(tau, KClass::k0(p, UnitizedElement::from_algebra(ModelElement::zero(model, 1))), true); }) ==
        ErrorCode::NotInKernel);
  ComplexMatrix tail(1, 1);
  tail(0, 0) = 1.0;
  const UnitizedElement with_tail(ModelElement(AlgebraModel::compact(1), 1, MatrixElement::diagonal({0}), tail),
                                  ComplexMatrix::Zero(1, 1));
  CHECK(code_of([&] { unitized_trace(WeightSpec::finite_rank_trace(), with_tail); }) == ErrorCode::OutsideIdeal);
}

TEST_CASE("well-definedness and positivity of the trace pairing", "[pairing]") {
  const AlgebraModel model = AlgebraModel::finite_blocks({2, 3});
  const WeightSpec tau = WeightSpec::block_trace({1.0, 0.5});
  Rng rng(31);
  for (int i = 0; i < 4; ++i) {
    const std::size_t level = 1 + static_cast<std::size_t>(i % 2);
    const KClass c = KClass::k0(random_unitized_projection(model, level, rng), random_unitized_projection(model, level, rng));
    CHECK(k0_welldefinedness_drift(tau, c, 20, 100 + static_cast<std::uint64_t>(i)).max() <= 1e-8);
  }
  CHECK(positivity_audit(tau, model, 200, 5).passed);
  CHECK(tensor_identity_check(tau, model, 2, 50, 6) <= 1e-9);
}
