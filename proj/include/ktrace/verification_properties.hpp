#pragma once

// Property-based cases. Included from verification_cases.hpp.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ktrace/dimension_group.hpp"
#include "ktrace/json_io.hpp"
#include "ktrace/projection_calculus.hpp"
#include "ktrace/random_elements.hpp"
#include "ktrace/regularization.hpp"
#include "ktrace/singular_traces.hpp"
#include "ktrace/verification.hpp"
#include "ktrace/weight_pairing.hpp"

namespace ktrace {

namespace cases {

inline std::size_t draw(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// exp(i angle H) for a random Hermitian H.
inline MatrixElement random_near_unitary(std::size_t n, double angle, Rng& rng) {
  const HermitianSpectrum s = hermitian_spectrum(MatrixElement(random_hermitian(static_cast<Eigen::Index>(n), rng)));
  Eigen::VectorXcd phases(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) phases(static_cast<Eigen::Index>(i)) = std::polar(1.0, angle * s.eigenvalues[i]);
  return MatrixElement(s.frame * phases.asDiagonal() * s.frame.adjoint());
}

/// Orthogonal projections e, f of M_k(A): both diagonal in one random frame
/// per summand, with disjoint sets of frame vectors.
inline std::pair<ModelElement, ModelElement> random_orthogonal_pair(const AlgebraModel& model, std::size_t level,
                                                                    Rng& rng) {
  const std::vector<int> labels = model.labels(level);
  const auto n = static_cast<Eigen::Index>(labels.size());
  ComplexMatrix e = ComplexMatrix::Zero(n, n);
  ComplexMatrix f = ComplexMatrix::Zero(n, n);
  for (const auto& [label, idx] : detail::label_groups(labels)) {
    const auto d = static_cast<Eigen::Index>(idx.size());
    const ComplexMatrix u = random_unitary(d, rng);
    const auto r1 = static_cast<Eigen::Index>(draw(rng, 0, idx.size()));
    const auto r2 = static_cast<Eigen::Index>(draw(rng, 0, idx.size() - static_cast<std::size_t>(r1)));
    const ComplexMatrix be = u.leftCols(r1) * u.leftCols(r1).adjoint();
    const ComplexMatrix bf = u.middleCols(r1, r2) * u.middleCols(r1, r2).adjoint();
    for (std::size_t i = 0; i < idx.size(); ++i) {
      for (std::size_t j = 0; j < idx.size(); ++j) {
        e(idx[i], idx[j]) = be(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        f(idx[i], idx[j]) = bf(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  return {ModelElement(model, level, MatrixElement(e)), ModelElement(model, level, MatrixElement(f))};
}

inline CaseResult worst_at_most(double worst, double bound, std::string detail = {}) {
  return holds(worst <= bound, number_json(worst), std::move(detail));
}

}  // namespace cases

inline std::vector<VerificationCase> property_cases() {
  using namespace cases;
  std::vector<VerificationCase> v;

  // Near-projections and the three rounding conclusions.
  v.push_back({"round-to-projection", "f(a) is a projection, ||f(a) - e|| <= 2 delta, psi(f(a)) <= psi(a)/(1-delta)",
               Provenance::derived, "all hold", 1e-8, [](const CaseContext& ctx) {
                 Rng rng = ctx.rng();
                 const double delta = 0.1;
                 const WeightSpec psi = example_h();
                 double worst = 0.0;
                 bool ok = true;
                 for (std::size_t i = 0; i < ctx.samples; ++i) {
                   const std::size_t n = draw(rng, 2, 6);
                   const MatrixElement e = random_projection(n, draw(rng, 0, n), rng);
                   // e + h with ||h|| <= delta/4, eigenvalues clipped to [0, 1]
                   ComplexMatrix h = random_hermitian(static_cast<Eigen::Index>(n), rng);
                   h *= 0.25 * delta / std::max(1e-300, detail::spectral_norm(h));
                   const MatrixElement a = apply_function(hermitian_spectrum(e + MatrixElement(h)),
                                                          [](double t) { return std::clamp(t, 0.0, 1.0); });
                   const RoundedProjection r = round_to_projection(a, e, delta);
                   const double proj_res = operator_norm(r.projection * r.projection - r.projection);
                   const double fa = evaluate_weight(psi, r.projection).value();
                   const double pa = evaluate_weight(psi, a).value();
                   ok = ok && proj_res <= 1e-8 && r.distance_to_target <= 2.0 * delta + 1e-12 &&
                        fa <= r.weight_bound * pa + 1e-10;
                   worst = std::max(worst, proj_res);
                 }
                 return holds(ok, number_json(worst), "largest ||f(a)^2 - f(a)||");
               }});

  v.push_back({"similarity-bound", "||1 - u/2|| <= ||e' - e|| and ||u e u^-1 - e'|| <= 1e-8", Provenance::derived,
               "all hold", 1e-8, [](const CaseContext& ctx) {
                 Rng rng = ctx.rng();
                 double worst = 0.0;
                 bool ok = true;
                 std::size_t done = 0;
                 while (done < ctx.samples) {
                   const std::size_t n = draw(rng, 2, 6);
                   const MatrixElement e = random_projection(n, draw(rng, 0, n), rng);
                   const MatrixElement w = random_near_unitary(n, 0.2, rng);
                   const MatrixElement e2 = w * e * w.adjoint();
                   if (operator_norm(e2 - e) >= 0.95) continue;
                   const SimilarityWitness s = similarity(e, e2);
                   ok = ok && s.half_defect <= s.distance + 1e-12 && s.conjugation_residual <= 1e-8;
                   worst = std::max(worst, s.conjugation_residual);
                   ++done;
                 }
                 return holds(ok, number_json(worst), "largest conjugation residual");
               }});

  v.push_back({"polar-isometry", "w = y|y|^-1 satisfies ww* = e', w*w = f' for y = e' g f'", Provenance::derived, 1e-8,
               1e-8, [](const CaseContext& ctx) {
                 Rng rng = ctx.rng();
                 double worst = 0.0;
                 for (std::size_t i = 0; i < ctx.samples; ++i) {
                   const std::size_t n = draw(rng, 2, 6);
                   const std::size_t r = draw(rng, 1, n);
                   const MatrixElement ep = random_projection(n, r, rng);
                   const MatrixElement fp = random_projection(n, r, rng);
                   const MatrixElement g(random_gaussian(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), rng));
                   const EquivalenceWitness w = polar_partial_isometry(ep * g * fp, ep, fp);
                   worst = std::max({worst, w.left_residual(), w.right_residual()});
                 }
                 return worst_at_most(worst, 1e-8);
               }});

  v.push_back({"polarization", "ab and ba from the four-term polarization identities", Provenance::derived, 1e-10, 1e-10,
               [](const CaseContext& ctx) {
                 Rng rng = ctx.rng();
                 double worst = 0.0;
                 for (std::size_t i = 0; i < ctx.samples; ++i) {
                   const auto n = static_cast<Eigen::Index>(draw(rng, 1, 6));
                   const MatrixElement a(random_gaussian(n, n, rng));
                   const MatrixElement b(random_gaussian(n, n, rng));
                   const PolarizationResiduals p = polarization_check(a, b);
                   worst = std::max({worst, p.product_ab, p.product_ba});
                 }
                 return worst_at_most(worst, 1e-10);
               }});

  v.push_back({"ladder-law", "d_n d_{n+1} = d_n for diagonal and matrix generators", Provenance::derived, 1e-12, 1e-12,
               [](const CaseContext& ctx) {
                 Rng rng = ctx.rng();
                 double worst = 0.0;
                 for (std::size_t i = 0; i < ctx.samples; ++i) {
                   const std::size_t n = draw(rng, 1, 64);
                   const std::size_t corner = draw(rng, 1, 32);
                   switch (i % 3) {
                     case 0: worst = std::max(worst, ApproximateUnit::dyadic().ladder_residual(n, corner)); break;
                     case 1: worst = std::max(worst, ApproximateUnit::harmonic().ladder_residual(n, corner)); break;
                     default: {
                       const auto d = static_cast<Eigen::Index>(draw(rng, 1, 6));
                       const MatrixElement a0 = make_strictly_positive(
                           {MatrixElement(random_positive_contraction(d, rng)), MatrixElement::identity(static_cast<std::size_t>(d))});
                       worst = std::max(worst, approximate_unit(a0).ladder_residual(n, corner));
                     }
                   }
                 }
                 return worst_at_most(worst, 1e-12);
               }});

  v.push_back({"underline-psi-additivity", "underline-psi(e + f) = underline-psi(e) + underline-psi(f) for ef = 0",
               Provenance::derived, 1e-8, 1e-8, [](const CaseContext& ctx) {
                 Rng rng = ctx.rng();
                 const std::vector<std::pair<WeightSpec, AlgebraModel>> setups{
                     {example_h(), AlgebraModel::compact(6)},
                     {one_plus_inverse_n(), AlgebraModel::compact(5)},
                     {WeightSpec::diagonal_h(DiagonalSequence{{2.0, 0.7, 1.5, 0.9, 3.0}, 1.0, 0.0, 1.0}),
                      AlgebraModel::finite_blocks({2, 3})},
                     {WeightSpec::block_trace({1.0, 0.25}), AlgebraModel::finite_blocks({2, 2})},
                     {WeightSpec::finite_rank_trace(), AlgebraModel::compact(4)}};
                 double worst = 0.0;
                 for (std::size_t i = 0; i < ctx.samples; ++i) {
                   const auto& [psi, model] = setups[i % setups.size()];
                   const auto [e, f] = random_orthogonal_pair(model, draw(rng, 1, 2), rng);
                   const double sum = underline_psi(psi, e + f).value;
                   const double parts = underline_psi(psi, e).value + underline_psi(psi, f).value;
                   worst = std::max(worst, std::abs(sum - parts));
                 }
                 return worst_at_most(worst, 1e-8);
               }});

  v.push_back({"k0-welldefinedness", "tau-dagger pairing unchanged under similarity, stabilization, unitary equivalence",
               Provenance::derived, 1e-8, 1e-8, [](const CaseContext& ctx) {
                 Rng rng = ctx.rng();
                 const std::vector<std::pair<WeightSpec, AlgebraModel>> setups{
                     {WeightSpec::block_trace({1.0, 0.5}), AlgebraModel::finite_blocks({2, 3})},
                     {WeightSpec::finite_rank_trace(), AlgebraModel::compact(3)}};
                 const std::size_t classes = 10;
                 const std::size_t trials = std::max<std::size_t>(1, ctx.samples / classes);
                 double worst = 0.0;
                 for (std::size_t i = 0; i < classes; ++i) {
                   const auto& [tau, model] = setups[i % setups.size()];
                   const std::size_t level = 1 + i % 2;
                   const KClass c = KClass::k0(random_unitized_projection(model, level, rng),
                                               random_unitized_projection(model, level, rng));
                   worst = std::max(worst, k0_welldefinedness_drift(tau, c, trials, rng()).max());
                 }
                 return worst_at_most(worst, 1e-8);
               }});

  v.push_back({"positivity-audit", "tau_*([e] - [0]) >= 0 on random projections", Provenance::derived, "passed", 1e-9,
               [](const CaseContext& ctx) {
                 const PositivityAudit a =
                     positivity_audit(WeightSpec::block_trace({1.0, 0.3}), AlgebraModel::finite_blocks({2, 3}),
                                      ctx.samples / 2 + 1, ctx.seed);
                 const PositivityAudit b = positivity_audit(WeightSpec::finite_rank_trace(), AlgebraModel::compact(4),
                                                            ctx.samples / 2 + 1, ctx.seed + 1);
                 return holds(a.passed && b.passed, number_json(std::min(a.min_value, b.min_value)), "smallest pairing");
               }});

  // Non-lower-semicontinuity gap at further truncation points.
  for (std::size_t m : {1, 5, 20}) {
    v.push_back({"lsc-gap-m" + std::to_string(m), "gap witness with exact head sum for M = " + std::to_string(m),
                 Provenance::derived, ">= 0.498", 2e-3, [m](const CaseContext& ctx) {
                   const GapWitness w = lsc_gap_witness(m, ctx.singular);
                   Rational head = 0;
                   for (std::size_t j = 1; j <= m; ++j) head += rational(1, static_cast<std::int64_t>(j * j));
                   const double gap = w.full.value - w.partial.value;
                   return holds(w.certified && gap >= 0.5 - 2e-3 && w.partial_exact == head &&
                                    std::abs(w.partial.value - to_double(head)) <= 1e-12,
                                number_json(gap), "head " + rational_string(head));
                 }});
  }

  v.push_back({"gap-monotone-in-m", "partial values increase with M and every gap stays >= 1/2", Provenance::derived,
               "monotone", 2e-3, [](const CaseContext& ctx) {
                 const LimitReport full = singular_tau(FormalPositiveSeries::zeta(), 2.0, ctx.singular);
                 double previous = 0.0;
                 bool ok = true;
                 double smallest_gap = full.value;
                 for (std::size_t m = 1; m <= 20; ++m) {
                   const double partial = singular_tau(FormalPositiveSeries::zeta(m), 2.0, ctx.singular).value;
                   ok = ok && partial > previous;
                   previous = partial;
                   smallest_gap = std::min(smallest_gap, full.value - partial);
                 }
                 return holds(ok && smallest_gap >= 0.5 - 2e-3, number_json(smallest_gap), "smallest gap");
               }});

  v.push_back({"tau-epsilon-projections", "singular_tau_on_projection(p_j, 3/2) = 0 for j <= 20, numerically within 1e-3",
               Provenance::derived, 0.0, 1e-3, [](const CaseContext& ctx) {
                 double worst = 0.0;
                 bool exact = true;
                 for (std::size_t j = 1; j <= 20; ++j) {
                   exact = exact && singular_tau_on_projection(projection_p(j), 1.5) == 0;
                   worst = std::max(worst, std::abs(singular_tau(projection_p(j), 1.5, ctx.singular).value));
                 }
                 return holds(exact && worst <= 1e-3, number_json(worst));
               }});

  v.push_back({"projection-pairing-random", "tau(g) = q exactly and numerically on 100 random scale elements",
               Provenance::derived, 0.0, 1e-6, [](const CaseContext& ctx) {
                 Rng rng = ctx.rng();
                 double worst = 0.0;
                 bool exact = true;
                 for (std::size_t i = 0; i < 100; ++i) {
                   const DimensionGroupElement g = random_scale_element(rng);
                   exact = exact && singular_tau_on_projection(g, 2.0) == g.tail_q();
                   worst = std::max(worst, std::abs(singular_tau(g, 2.0, ctx.singular).value - to_double(g.tail_q())));
                 }
                 return holds(exact && worst <= 1e-6, number_json(worst));
               }});

  v.push_back({"k00-compact-rank-r", "h = (3,2,0.5,...): rank-r class pairs to 0.5 r at corner 512", Provenance::derived,
               "0.5 r", 1e-6, [](const CaseContext&) {
                 std::vector<std::size_t> schedule;
                 for (std::size_t m = 16; m <= 512; m *= 2) schedule.push_back(m);
                 double worst = 0.0;
                 for (std::size_t r : {1, 2, 5}) {
                   const ModelElement e = corner_projection(8, r);
                   const LimitReport p = k00_pairing(example_h(), KClass::k00(e, ModelElement::zero(e.model(), 1)), schedule);
                   worst = std::max(worst, std::abs(p.value - 0.5 * static_cast<double>(r)));
                 }
                 return worst_at_most(worst, 1e-6);
               }});

  v.push_back({"k00-compact-slow-h", "h_n = 1 + 1/n: rank-r class approaches r with bracket width <= 1e-2 at 4096",
               Provenance::derived, "r", 1e-2, [](const CaseContext&) {
                 bool ok = true;
                 double widest = 0.0;
                 for (std::size_t r : {1, 2, 5}) {
                   const ModelElement e = corner_projection(8, r, 1);
                   const LimitReport p = k00_pairing(one_plus_inverse_n(), KClass::k00(e, ModelElement::zero(e.model(), 1)));
                   widest = std::max(widest, p.hi - p.lo);
                   ok = ok && p.n_used == 4096 && p.hi - p.lo <= 1e-2 && std::abs(p.value - static_cast<double>(r)) <= 1e-2 &&
                        p.lo <= p.value && p.value <= p.hi;
                 }
                 return holds(ok, number_json(widest), "widest bracket");
               }});

  v.push_back({"regularize-dichotomy", "usual trace and zero trace on 100 random finite-rank positives",
               Provenance::derived, "Tr(a) / 0", 0.0, [](const CaseContext& ctx) {
                 Rng rng = ctx.rng();
                 bool ok = true;
                 for (std::size_t i = 0; i < 100; ++i) {
                   const ModelElement a = random_finite_rank_positive(rng);
                   const ApproximateUnit unit = i % 2 ? ApproximateUnit::dyadic() : ApproximateUnit::harmonic();
                   const RegularizationRun usual = regularize_trace(WeightSpec::finite_rank_trace(), unit, a);
                   const RegularizationRun zero = regularize_trace(WeightSpec::zero_on_finite_rank(), unit, a);
                   const double tr = evaluate_weight(WeightSpec::finite_rank_trace(), a).value();
                   ok = ok && usual.report.converged() && usual.report.value == tr && zero.report.converged() &&
                        zero.report.value == 0.0;
                 }
                 return holds(ok, ok ? "all exact" : "mismatch");
               }});

  v.push_back({"generator-independence", "the regularization does not depend on the approximate unit",
               Provenance::derived, 0.0, 1e-12, [](const CaseContext& ctx) {
                 Rng rng = ctx.rng();
                 double worst = 0.0;
                 const AlgebraModel blocks = AlgebraModel::finite_blocks({2, 3});
                 const WeightSpec bt = WeightSpec::block_trace({1.0, 0.4});
                 for (std::size_t i = 0; i < 50; ++i) {
                   const ModelElement a = random_finite_rank_positive(rng);
                   const double dy = regularize_trace(WeightSpec::finite_rank_trace(), ApproximateUnit::dyadic(), a).report.value;
                   const double ha = regularize_trace(WeightSpec::finite_rank_trace(), ApproximateUnit::harmonic(), a).report.value;
                   worst = std::max(worst, std::abs(dy - ha));

                   const ModelElement b = random_model_positive(blocks, 1, rng);
                   const MatrixElement one = MatrixElement::identity(blocks.inner_dim());
                   const MatrixElement a0 = make_strictly_positive({random_model_positive(blocks, 1, rng).matrix(), one});
                   const MatrixElement a1 = make_strictly_positive({one, random_model_positive(blocks, 1, rng).matrix()});
                   const double u0 = regularize_trace(bt, approximate_unit(a0), b).report.value;
                   const double u1 = regularize_trace(bt, approximate_unit(a1), b).report.value;
                   worst = std::max(worst, std::abs(u0 - u1));
                 }
                 return worst_at_most(worst, 1e-12);
               }});

  v.push_back({"domination", "phi <= tau implies phi <= tilde-tau", Provenance::derived, "holds", 1e-8,
               [](const CaseContext& ctx) {
                 Rng rng = ctx.rng();
                 std::vector<ModelElement> compact;
                 for (std::size_t i = 0; i < 50; ++i) compact.push_back(random_finite_rank_positive(rng));
                 const bool a = domination_check(WeightSpec::zero_on_finite_rank(), WeightSpec::finite_rank_trace(),
                                                 ApproximateUnit::harmonic(), compact);
                 const bool b = domination_check(WeightSpec::diagonal_h(DiagonalSequence::constant(0.5)),
                                                 WeightSpec::finite_rank_trace(), ApproximateUnit::dyadic(), compact);
                 return holds(a && b, a && b);
               }});

  v.push_back({"tensor-identity", "psi_k(sum a_l (x) s_l) = sum psi(a_l) Tr(s_l)", Provenance::derived, 1e-9, 1e-9,
               [](const CaseContext& ctx) {
                 const std::size_t n = std::max<std::size_t>(1, ctx.samples / 10);
                 double worst = 0.0;
                 for (std::size_t k = 1; k <= 3; ++k) {
                   worst = std::max(worst, tensor_identity_check(WeightSpec::block_trace({1.0, 0.5}),
                                                                 AlgebraModel::finite_blocks({2, 3}), k, n, ctx.seed + k));
                   worst = std::max(worst, tensor_identity_check(example_h(), AlgebraModel::compact(4), k, n, ctx.seed + 7 * k));
                 }
                 return worst_at_most(worst, 1e-9);
               }});

  v.push_back({"unitized-trace-ignores-scalars", "tau-dagger(a + lambda 1) = tau(a)", Provenance::derived, 0.0, 1e-12,
               [](const CaseContext& ctx) {
                 Rng rng = ctx.rng();
                 const AlgebraModel model = AlgebraModel::finite_blocks({2, 3});
                 const WeightSpec tau = WeightSpec::block_trace({1.0, 0.5});
                 double worst = 0.0;
                 for (std::size_t i = 0; i < 100; ++i) {
                   const std::size_t k = draw(rng, 1, 3);
                   const ModelElement a = random_model_element(model, k, rng);
                   const auto kk = static_cast<Eigen::Index>(k);
                   const UnitizedElement x(a, random_gaussian(kk, kk, rng));
                   worst = std::max(worst, std::abs(unitized_trace(tau, x) - linear_extension(tau, a)));
                 }
                 return worst_at_most(worst, 1e-12);
               }});

  v.push_back({"canonical-agreement", "tau_* on K_00 agrees with tau-dagger_* after the canonical map",
               Provenance::derived, 0.0, 1e-9, [](const CaseContext& ctx) {
                 Rng rng = ctx.rng();
                 const AlgebraModel model = AlgebraModel::finite_blocks({2, 3});
                 const WeightSpec tau = WeightSpec::block_trace({1.0, 0.5});
                 double worst = 0.0;
                 for (std::size_t i = 0; i < 100; ++i) {
                   const KClass c = KClass::k00(random_model_projection(model, draw(rng, 1, 2), rng),
                                                random_model_projection(model, draw(rng, 1, 2), rng));
                   worst = std::max(worst, std::abs(k00_pairing(tau, c).value - k0_pairing(tau, canonical_k00_to_k0(c), true)));
                 }
                 return worst_at_most(worst, 1e-9);
               }});

  v.push_back({"ky-fan-brute-force", "random rank-r projections never beat underline-psi", Provenance::derived, ">= 0",
               1e-10, [](const CaseContext& ctx) {
                 Rng rng = ctx.rng();
                 std::uniform_real_distribution<double> hv(0.2, 3.0);
                 std::vector<double> prefix(16);
                 for (double& x : prefix) x = hv(rng);
                 const WeightSpec psi = WeightSpec::diagonal_h(DiagonalSequence{prefix, 1.0, 0.0, 1.0});
                 std::vector<double> sorted = prefix;
                 std::sort(sorted.begin(), sorted.end());
                 const AlgebraModel model = AlgebraModel::compact(16);
                 double slack = std::numeric_limits<double>::infinity();
                 const std::size_t count = 10 * ctx.samples;
                 for (std::size_t i = 0; i < count; ++i) {
                   const std::size_t level = 1 + i % 2;
                   const std::size_t r = level == 1 ? 2 : draw(rng, 1, 6);
                   const ModelElement f(model, level, random_projection(16 * level, r, rng));
                   const double value = evaluate_weight(psi, f).value();
                   const double floor = level == 1 ? sorted[0] + sorted[1] : static_cast<double>(r) * sorted[0];
                   slack = std::min(slack, value - floor);
                   slack = std::min(slack, value - underline_psi(psi, f).value);
                 }
                 return holds(slack >= -1e-10, number_json(slack), "smallest psi(f) - bound");
               }});

  v.push_back({"dimension-group-laws", "G is an ordered abelian group under the canonical form", Provenance::derived,
               "holds", 0.0, [](const CaseContext& ctx) {
                 Rng rng = ctx.rng();
                 bool ok = true;
                 for (std::size_t i = 0; i < 200; ++i) {
                   const DimensionGroupElement x = random_group_element(rng);
                   const DimensionGroupElement y = random_group_element(rng);
                   const DimensionGroupElement z = random_group_element(rng);
                   const Rational t = rational(static_cast<std::int64_t>(draw(rng, 1, 9)), static_cast<std::int64_t>(draw(rng, 1, 9)));
                   const DimensionGroupElement p = random_scale_element(rng);
                   ok = ok && (x + y) - y == x && x + y == y + x && (x + y) + z == x + (y + z) &&
                        t * (x + y) == t * x + t * y && (x - x).is_zero() && x <= x + p && !(x + p <= x);
                 }
                 return holds(ok, ok);
               }});

  v.push_back({"scale-membership", "catalog projections and random draws lie in the scale; 2 p_1 does not",
               Provenance::derived, "holds", 0.0, [](const CaseContext& ctx) {
                 Rng rng = ctx.rng();
                 bool ok = !(Rational(2) * projection_p(1)).in_scale();
                 for (std::size_t j = 1; j <= 20; ++j) ok = ok && projection_p(j).in_scale();
                 for (std::size_t i = 0; i < 200; ++i) ok = ok && random_scale_element(rng).in_scale();
                 return holds(ok, ok);
               }});

  v.push_back({"singular-tau-linearity", "tau(x + y) = tau(x) + tau(y) and tau(t x) = t tau(x) on finite sums",
               Provenance::derived, 0.0, 1e-6, [](const CaseContext& ctx) {
                 Rng rng = ctx.rng();
                 double worst = 0.0;
                 for (std::size_t i = 0; i < 20; ++i) {
                   const DimensionGroupElement x = random_scale_element(rng);
                   const DimensionGroupElement y = random_scale_element(rng);
                   const Rational t = rational(static_cast<std::int64_t>(draw(rng, 1, 7)), 3);
                   const double tx = singular_tau(x, 2.0, ctx.singular).value;
                   const double ty = singular_tau(y, 2.0, ctx.singular).value;
                   const double sum =
                       singular_tau(FormalPositiveSeries::finite_sum({{1, x}, {1, y}}), 2.0, ctx.singular).value;
                   const double scaled = singular_tau(FormalPositiveSeries::single(t, x), 2.0, ctx.singular).value;
                   worst = std::max({worst, std::abs(sum - tx - ty), std::abs(scaled - to_double(t) * tx)});
                 }
                 return worst_at_most(worst, 1e-6);
               }});

  v.push_back({"cesaro-examples", "limits, brackets and divergence on sequences with known behavior",
               Provenance::derived, "holds", 1e-5, [](const CaseContext&) {
                 const CesaroOptions opt;
                 const LimitReport alternating =
                     cesaro_limit([](std::int64_t k) { return k % 2 ? 1.0 : -1.0; }, 100000, opt);
                 const LimitReport slow = cesaro_limit([](std::int64_t k) { return 3.0 + 1.0 / static_cast<double>(k); },
                                                       100000, opt);
                 const LimitReport rising = cesaro_limit([](std::int64_t k) { return static_cast<double>(k); }, 100000, opt);
                 // 1 on [4^m, 2 * 4^m), 0 on [2 * 4^m, 4^(m+1)): averages oscillate in [1/3, 2/3]
                 const LimitReport blocks = cesaro_limit(
                     [](std::int64_t k) {
                       std::int64_t p = 1;
                       while (p * 4 <= k) p *= 4;
                       return k < 2 * p ? 1.0 : 0.0;
                     },
                     100000, opt);
                 const bool ok = alternating.converged() && std::abs(alternating.value) <= 1e-5 && slow.lo <= 3.0 &&
                                 3.0 <= slow.hi && std::abs(slow.value - 3.0) <= 1e-3 && rising.unbounded() &&
                                 blocks.status == LimitStatus::bracketed && blocks.lo <= 0.34 && blocks.hi >= 0.66;
                 return holds(ok, json{{"alternating", to_json(alternating)},
                                       {"three_plus_inverse", to_json(slow)},
                                       {"rising", to_json(rising)},
                                       {"blocks", to_json(blocks)}});
               }});

  v.push_back({"mu-unbounded", "constant samples with t_n = n give an infinite mu", Provenance::derived, "inf", 0.0,
               [](const CaseContext& ctx) {
                 const LimitReport r = mu_function_trace(SampledFunctionTrace::constant_samples(1.0), ctx.singular.n_max);
                 return holds(r.unbounded(), to_json(r));
               }});

  return v;
}

}  // namespace ktrace
