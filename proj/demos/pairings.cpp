// Walks through the main quantities: a weight on a finite-rank element, the
// K_00 pairing of a non-tracial weight, a regularization, and the singular
// trace on the dimension group with its non-lower-semicontinuity gap.

#include <iostream>

#include "ktrace/ktrace.hpp"

int main() {
  using namespace ktrace;

  const MatrixElement a = MatrixElement::diagonal({1, 1, 0});
  std::cout << "finite_rank_tr(diag(1,1,0)) = " << evaluate_weight(WeightSpec::finite_rank_trace(), a).value() << '\n';

  // h = (3, 2, 0.5, 0.5, ...); the pairing sees only the bottom of the spectrum.
  const WeightSpec psi = WeightSpec::diagonal_h(DiagonalSequence{{3.0, 2.0}, 0.5, 0.0, 1.0});
  const ModelElement e(AlgebraModel::compact(4), 1, MatrixElement::diagonal({1, 1, 1, 0}));
  std::cout << "psi(e) = " << evaluate_weight(psi, e).value()
            << ", psi_*([e]) = " << k00_pairing(psi, KClass::k00(e, ModelElement::zero(e.model(), 1))).value << '\n';

  const ModelElement x(AlgebraModel::compact(3), 1, MatrixElement::diagonal({0.5, 0.25, 2.0}));
  const RegularizationRun run = regularize_trace(WeightSpec::finite_rank_trace(), ApproximateUnit::harmonic(), x);
  std::cout << "regularized trace: " << to_json(run).dump() << '\n';

  std::cout << "tau_k(p_3), k = 1..6:";
  for (std::size_t k = 1; k <= 6; ++k) std::cout << ' ' << rational_string(tau_k(projection_p(3), k));
  std::cout << '\n';

  const GapWitness w = lsc_gap_witness(10);
  std::cout << "tau(sum_j p_j/j^2) = " << w.full.value << " +- " << w.full.error_bound / 2 << '\n'
            << "tau(sum_{j<=10} p_j/j^2) = " << rational_string(w.partial_exact) << " = " << w.partial.value << '\n'
            << "gap certified: " << std::boolalpha << w.certified << '\n';
  return 0;
}
