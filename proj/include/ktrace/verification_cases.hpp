#pragma once

#include <cmath>
#include <numbers>
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

inline WeightSpec example_h() { return WeightSpec::diagonal_h(DiagonalSequence{{3.0, 2.0}, 0.5, 0.0, 1.0}); }

inline WeightSpec one_plus_inverse_n() { return WeightSpec::diagonal_h(DiagonalSequence{{}, 1.0, 1.0, 1.0}); }

/// Diagonal rank-r projection in the m-corner of the compact model.
inline ModelElement corner_projection(std::size_t m, std::size_t r, std::size_t offset = 0) {
  std::vector<double> d(m, 0.0);
  for (std::size_t i = offset; i < offset + r; ++i) d[i] = 1.0;
  return ModelElement(AlgebraModel::compact(m), 1, MatrixElement::diagonal(d));
}

/// Random positive of rank <= m in the m-corner: sum of rank-one terms.
inline ModelElement random_finite_rank_positive(Rng& rng, std::size_t max_corner = 6) {
  const std::size_t m = std::uniform_int_distribution<std::size_t>(1, max_corner)(rng);
  const std::size_t r = std::uniform_int_distribution<std::size_t>(1, m)(rng);
  const ComplexMatrix g = random_gaussian(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(r), rng);
  const ComplexMatrix a = g * g.adjoint();
  return ModelElement(AlgebraModel::compact(m), 1, MatrixElement(0.5 * (a + a.adjoint())));
}

inline Rational random_unit_rational(Rng& rng) {
  const std::int64_t den = std::uniform_int_distribution<std::int64_t>(2, 60)(rng);
  const std::int64_t num = std::uniform_int_distribution<std::int64_t>(1, den - 1)(rng);
  return rational(num, den);
}

/// Random element of the scale: prefix in (0,1), tail coefficient in (0, N^2).
inline DimensionGroupElement random_scale_element(Rng& rng) {
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
  std::vector<Rational> prefix;
  for (std::size_t i = 1; i < n; ++i) prefix.push_back(random_unit_rational(rng));
  const Rational q = random_unit_rational(rng) * Rational(n * n);
  return DimensionGroupElement(std::move(prefix), q, n);
}

/// Random element of G (any signs).
inline DimensionGroupElement random_group_element(Rng& rng) {
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
  std::uniform_int_distribution<std::int64_t> num(-20, 20);
  std::uniform_int_distribution<std::int64_t> den(1, 12);
  std::vector<Rational> prefix;
  for (std::size_t i = 1; i < n; ++i) prefix.push_back(rational(num(rng), den(rng)));
  return DimensionGroupElement(std::move(prefix), rational(num(rng), den(rng)), n);
}

inline std::size_t capped(const CaseContext& ctx, std::size_t cap) { return std::min(ctx.samples, cap); }

}  // namespace cases

/// Reference values with known closed forms, one case each.
inline std::vector<VerificationCase> paper_value_cases() {
  using namespace cases;
  std::vector<VerificationCase> v;
  const double zeta_value = 0.5 + std::numbers::pi * std::numbers::pi / 6.0;

  v.push_back({"weight-finite-rank-tr", "finite_rank_tr_else_inf on diag(1,1,0) is the usual trace", Provenance::paper,
               2.0, 0.0, [](const CaseContext&) {
                 return within(evaluate_weight(WeightSpec::finite_rank_trace(), MatrixElement::diagonal({1, 1, 0})).value(),
                               2.0, 0.0);
               }});
  v.push_back({"weight-zero-on-finite-rank", "the stand-in vanishes on finite-rank positives", Provenance::paper, 0.0,
               0.0, [](const CaseContext& ctx) {
                 Rng rng = ctx.rng();
                 double worst = 0.0;
                 for (std::size_t i = 0; i < 20; ++i) {
                   worst = std::max(worst, evaluate_weight(WeightSpec::zero_on_finite_rank(),
                                                           random_finite_rank_positive(rng)).value());
                 }
                 return within(worst, 0.0, 0.0);
               }});
  v.push_back({"underline-psi-min-spectrum", "h = (3,2,0.5,0.5,...): underline-psi of a rank-one projection is min h",
               Provenance::paper, 0.5, 1e-12, [](const CaseContext&) {
                 return within(underline_psi(example_h(), corner_projection(4, 1)).value, 0.5, 1e-12);
               }});
  v.push_back({"k00-lambda-z", "psi_*([rank-3 e] - [0]) = 3 lambda with lambda = min h = 0.5", Provenance::paper, 1.5,
               1e-12, [](const CaseContext&) {
                 const ModelElement e = corner_projection(6, 3);
                 const LimitReport r = k00_pairing(example_h(), KClass::k00(e, ModelElement::zero(e.model(), 1)));
                 return within(r.value, 1.5, 1e-12);
               }});
  v.push_back({"regularize-usual-trace", "regularizing finite_rank_tr_else_inf gives the usual trace",
               Provenance::paper, "Tr(a)", 0.0, [](const CaseContext& ctx) {
                 Rng rng = ctx.rng();
                 const ModelElement a = random_finite_rank_positive(rng);
                 const WeightSpec tau = WeightSpec::finite_rank_trace();
                 const RegularizationRun run = regularize_trace(tau, ApproximateUnit::harmonic(), a);
                 const double tr = a.matrix().entries().trace().real();
                 return holds(run.report.converged() && run.report.value == evaluate_weight(tau, a).value() &&
                                  std::abs(run.report.value - tr) <= 1e-12,
                              run.report.value, "Tr(a) = " + std::to_string(tr));
               }});
  v.push_back({"regularize-zero-trace", "regularizing the vanishing-on-finite-rank stand-in gives zero",
               Provenance::paper, 0.0, 0.0, [](const CaseContext& ctx) {
                 Rng rng = ctx.rng();
                 const RegularizationRun run = regularize_trace(WeightSpec::zero_on_finite_rank(), ApproximateUnit::dyadic(),
                                                                random_finite_rank_positive(rng));
                 return holds(run.report.converged() && run.report.value == 0.0, run.report.value);
               }});
  const auto tau_k_case = [&](const char* id, std::size_t k, Rational expected) {
    v.push_back({id, "tau_" + std::to_string(k) + "(p_3)", Provenance::paper, rational_string(expected), 0.0,
                 [k, expected](const CaseContext&) {
                   const Rational got = tau_k(projection_p(3), k);
                   return holds(got == expected, rational_string(got));
                 }});
  };
  tau_k_case("tau-k-p3-k1", 1, rational(1, 8));
  tau_k_case("tau-k-p3-k3", 3, rational(1, 2));
  tau_k_case("tau-k-p3-k5", 5, rational(1, 25));
  v.push_back({"projection-p1", "p_1 = prefix (1/2), tail 1/k^2 from k = 2", Provenance::paper,
               json{{"prefix", {"1/2"}}, {"q", "1"}, {"N", 2}}, 0.0, [](const CaseContext&) {
                 const json got = to_json(projection_p(1));
                 return holds(got == json{{"prefix", {"1/2"}}, {"q", "1"}, {"N", 2}}, got);
               }});
  v.push_back({"k0-exact-pj", "tau(p_j) = q = 1 for j = 1..20", Provenance::paper, "1", 0.0, [](const CaseContext&) {
                 bool ok = true;
                 for (std::size_t j = 1; j <= 20; ++j) ok = ok && k0_pairing_exact(projection_p(j)) == 1;
                 return holds(ok, "1");
               }});
  v.push_back({"tau-zeta", "tau(sum_j p_j/j^2) = 1/2 + pi^2/6", Provenance::paper, zeta_value, 1e-3,
               [zeta_value](const CaseContext& ctx) {
                 const LimitReport r = singular_tau(FormalPositiveSeries::zeta(), 2.0, ctx.singular);
                 CaseResult res = within(r.value, zeta_value, 1e-3);
                 res.passed = res.passed && r.converged();
                 res.detail += ", error bound " + std::to_string(r.error_bound);
                 return res;
               }});
  v.push_back({"tau-zeta-truncated", "tau(sum_{j<=10} p_j/j^2) = sum_{j<=10} 1/j^2", Provenance::paper,
               "1968329/1270080", 1e-12, [](const CaseContext& ctx) {
                 const LimitReport r = singular_tau(FormalPositiveSeries::zeta(10), 2.0, ctx.singular);
                 const FormalPositiveSeries truncated = FormalPositiveSeries::zeta(10);
                 Rational head = 0;
                 for (std::size_t j = 1; j <= 10; ++j) head += truncated.exact_coefficient(j);
                 const bool exact = head == rational(1968329, 1270080);
                 return holds(exact && r.converged() && std::abs(r.value - to_double(head)) <= 1e-12,
                              json{{"value", r.value}, {"head", rational_string(head)}});
               }});
  v.push_back({"tau-epsilon", "tau_eps(sum_j j^-(1+eps) p_j) = 1/2 for eps = 1/2", Provenance::paper, 0.5, 1e-2,
               [](const CaseContext& ctx) {
                 const LimitReport r = singular_tau(FormalPositiveSeries::power(1.5), 1.5, ctx.singular);
                 CaseResult res = within(r.value, 0.5, 1e-2);
                 res.passed = res.passed && r.converged();
                 return res;
               }});
  v.push_back({"tau-on-projection-p5", "tau(p_5) = q = 1", Provenance::paper, "1", 1e-6, [](const CaseContext& ctx) {
                 const Rational exact = singular_tau_on_projection(projection_p(5), 2.0);
                 const LimitReport r = singular_tau(projection_p(5), 2.0, ctx.singular);
                 return holds(exact == 1 && std::abs(r.value - 1.0) <= 1e-6,
                              json{{"exact", rational_string(exact)}, {"numeric", r.value}});
               }});
  v.push_back({"tau-epsilon-on-projection-p5", "tau_eps(p_5) = 0", Provenance::paper, "0", 1e-3,
               [](const CaseContext& ctx) {
                 const Rational exact = singular_tau_on_projection(projection_p(5), 1.5);
                 const LimitReport r = singular_tau(projection_p(5), 1.5, ctx.singular);
                 return holds(exact == 0 && std::abs(r.value) <= 1e-3,
                              json{{"exact", rational_string(exact)}, {"numeric", r.value}});
               }});
  v.push_back({"lsc-gap-m10", "tau(sum_{j<=10} p_j/j^2) <= tau(sum_j p_j/j^2) - 1/2", Provenance::paper, ">= 0.498",
               2e-3, [](const CaseContext& ctx) {
                 const GapWitness w = lsc_gap_witness(10, ctx.singular);
                 const double gap = w.full.value - w.partial.value;
                 return holds(w.certified && gap >= 0.5 - 2e-3, gap,
                              "certified lower bound " + std::to_string(w.gap_lower_bound));
               }});
  v.push_back({"mu-g", "mu(sum_n t_n^-1 f_n (x) a) = tau(a) = 1", Provenance::paper, 1.0, 1e-3,
               [](const CaseContext& ctx) {
                 const LimitReport r = mu_function_trace(SampledFunctionTrace::g_pattern(1.0), ctx.singular.n_max);
                 CaseResult res = within(r.value, 1.0, 1e-3);
                 res.passed = res.passed && r.converged();
                 return res;
               }});
  v.push_back({"mu-truncation", "mu(sum_{n<=L} t_n^-1 f_n (x) a) = 0", Provenance::paper, 0.0, 0.0,
               [](const CaseContext& ctx) {
                 const LimitReport r = mu_function_trace(SampledFunctionTrace::truncated(50, 1.0), ctx.singular.n_max);
                 return holds(r.converged() && r.value == 0.0, r.value);
               }});
  return v;
}

}  // namespace ktrace

#include "ktrace/verification_properties.hpp"

namespace ktrace {

inline std::vector<VerificationCase> suite_cases(std::string_view name) {
  if (name == "paper-values") return paper_value_cases();
  if (name == "property") return property_cases();
  if (name == "all") {
    std::vector<VerificationCase> all = paper_value_cases();
    for (VerificationCase& c : property_cases()) all.push_back(std::move(c));
    return all;
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown suite \"" + std::string(name) + "\"");
}

inline json run_suite(const SuiteConfig& config) {
  config.validate();
  return run_cases(suite_cases(config.suite), config);
}

}  // namespace ktrace
