#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ktrace/algebra_model.hpp"
#include "ktrace/limit_report.hpp"
#include "ktrace/matrix_core.hpp"
#include "ktrace/projection_calculus.hpp"
#include "ktrace/random_elements.hpp"

namespace ktrace {

/// Bounded nonnegative sequence h_1, h_2, ...: an explicit prefix, then
/// h_n = offset + scale / n^power.
struct DiagonalSequence {
  std::vector<double> prefix;
  double offset = 0.0;
  double scale = 0.0;
  double power = 1.0;

  static DiagonalSequence constant(double c) { return DiagonalSequence{{}, c, 0.0, 1.0}; }

  void validate() const {
    for (double h : prefix) require(std::isfinite(h) && h >= 0.0, ErrorCode::InvalidArgument, "h must be nonnegative");
    require(std::isfinite(offset) && std::isfinite(scale) && offset >= 0.0, ErrorCode::InvalidArgument,
            "h tail offset must be finite and nonnegative");
    require(power > 0.0, ErrorCode::InvalidArgument, "h tail power must be positive");
    require(scale >= 0.0 || (*this)(prefix.size() + 1) >= 0.0, ErrorCode::InvalidArgument, "h must stay nonnegative");
  }

  double operator()(std::size_t n) const {
    require(n >= 1, ErrorCode::InvalidArgument, "h is indexed from 1");
    if (n <= prefix.size()) return prefix[n - 1];
    return offset + scale / std::pow(static_cast<double>(n), power);
  }

  bool is_constant() const {
    return scale == 0.0 && std::all_of(prefix.begin(), prefix.end(), [&](double h) { return h == offset; });
  }
  bool is_zero() const { return is_constant() && offset == 0.0; }
  bool summable() const { return offset == 0.0 && (scale == 0.0 || power > 1.0); }
};

enum class WeightKind { block_trace, diagonal_h, finite_rank_tr_else_inf, zero_on_finite_rank_else_inf };

constexpr std::string_view to_string(WeightKind k) {
  switch (k) {
    case WeightKind::block_trace: return "block_trace";
    case WeightKind::diagonal_h: return "diagonal_h";
    case WeightKind::finite_rank_tr_else_inf: return "finite_rank_tr_else_inf";
    case WeightKind::zero_on_finite_rank_else_inf: return "zero_on_finite_rank_else_inf";
  }
  return "block_trace";
}

/// The explicit weights the library evaluates. Each one acts on a positive
/// model element through its diagonal: psi(a) = sum_s w_s a_ss.
class WeightSpec {
 public:
  static WeightSpec block_trace(std::vector<double> weights) {
    require(!weights.empty(), ErrorCode::InvalidArgument, "block_trace needs one weight per block");
    for (double w : weights) require(std::isfinite(w) && w >= 0.0, ErrorCode::InvalidArgument, "block weights must be >= 0");
    WeightSpec s(WeightKind::block_trace);
    s.block_weights_ = std::move(weights);
    return s;
  }
  static WeightSpec diagonal_h(DiagonalSequence h) {
    h.validate();
    WeightSpec s(WeightKind::diagonal_h);
    s.h_ = std::move(h);
    return s;
  }
  static WeightSpec finite_rank_trace() { return WeightSpec(WeightKind::finite_rank_tr_else_inf); }
  static WeightSpec zero_on_finite_rank() { return WeightSpec(WeightKind::zero_on_finite_rank_else_inf); }

  WeightKind kind() const { return kind_; }
  const std::vector<double>& block_weights() const { return block_weights_; }
  const DiagonalSequence& h() const { return h_; }

  bool is_trace() const { return kind_ != WeightKind::diagonal_h || h_.is_constant(); }

  /// Diagonal weights w_s over the inner indices of the model.
  std::vector<double> index_weights(const AlgebraModel& model) const {
    std::vector<double> w(model.inner_dim());
    switch (kind_) {
      case WeightKind::block_trace: {
        require(block_weights_.size() == model.block_count(), ErrorCode::InvalidArgument,
                "block_trace has " + std::to_string(block_weights_.size()) + " weights but the model has " +
                    std::to_string(model.block_count()) + " blocks");
        const std::vector<int> labels = model.inner_labels();
        for (std::size_t s = 0; s < w.size(); ++s) w[s] = block_weights_[static_cast<std::size_t>(labels[s])];
        break;
      }
      case WeightKind::diagonal_h:
        for (std::size_t s = 0; s < w.size(); ++s) w[s] = h_(s + 1);
        break;
      case WeightKind::finite_rank_tr_else_inf: std::fill(w.begin(), w.end(), 1.0); break;
      case WeightKind::zero_on_finite_rank_else_inf: std::fill(w.begin(), w.end(), 0.0); break;
    }
    return w;
  }

  /// Value on the formal infinite-rank operator. It is chosen outside the
  /// domain of every weight whose h is not summable; for a summable h its
  /// value is not determined by the model.
  std::optional<bool> infinite_on_formal_part() const {
    switch (kind_) {
      case WeightKind::block_trace: return std::nullopt;
      case WeightKind::diagonal_h:
        if (h_.is_zero()) return false;
        if (h_.summable()) return std::nullopt;
        return true;
      default: return true;
    }
  }

 private:
  explicit WeightSpec(WeightKind k) : kind_(k) {}
  WeightKind kind_;
  std::vector<double> block_weights_;
  DiagonalSequence h_;
};

/// A value in [0, infinity].
class ExtendedValue {
 public:
  static ExtendedValue finite(double v) {
    require(std::isfinite(v) && v >= 0.0, ErrorCode::InvalidArgument, "finite weight values are nonnegative");
    return ExtendedValue(v);
  }
  static ExtendedValue infinite() { return ExtendedValue(std::nullopt); }

  bool is_finite() const { return value_.has_value(); }
  double value() const { return value_ ? *value_ : std::numeric_limits<double>::infinity(); }

  friend ExtendedValue operator+(const ExtendedValue& x, const ExtendedValue& y) {
    if (!x.is_finite() || !y.is_finite()) return infinite();
    return ExtendedValue(*x.value_ + *y.value_);
  }
  /// t * x with the convention 0 * infinity = 0.
  ExtendedValue scaled(double t) const {
    require(t >= 0.0, ErrorCode::InvalidArgument, "weights scale by nonnegative numbers");
    if (t == 0.0) return ExtendedValue(0.0);
    if (!is_finite()) return infinite();
    return ExtendedValue(t * *value_);
  }

 private:
  explicit ExtendedValue(std::optional<double> v) : value_(v) {}
  std::optional<double> value_;
};

namespace detail {

inline bool formal_part_infinite(const WeightSpec& psi, const ModelElement& x) {
  for (Eigen::Index i = 0; i < x.tail().rows(); ++i) {
    if (x.tail()(i, i).real() <= 1e-12) continue;
    const std::optional<bool> inf = psi.infinite_on_formal_part();
    if (!inf) {
      throw Error(ErrorCode::InvalidArgument, "the formal infinite-rank part has no value under this weight");
    }
    if (*inf) return true;
  }
  return false;
}

/// sum_{i,s} w_s x_{(i,s),(i,s)} over the finite part.
inline Complex diagonal_pairing(const WeightSpec& psi, const ModelElement& x) {
  const std::vector<double> w = psi.index_weights(x.model());
  const ComplexMatrix& m = x.matrix().entries();
  const std::size_t n = w.size();
  Complex sum = 0.0;
  for (std::size_t i = 0; i < x.level(); ++i)
    for (std::size_t s = 0; s < n; ++s) {
      const auto d = static_cast<Eigen::Index>(i * n + s);
      sum += w[s] * m(d, d);
    }
  return sum;
}

inline ModelElement positive_part(const ModelElement& h) {
  const auto pos = [](double t) { return std::max(t, 0.0); };
  const MatrixElement m = apply_function(hermitian_spectrum(h.matrix()), pos);
  ComplexMatrix t = h.tail();
  if (h.has_tail()) t = apply_function(hermitian_spectrum(MatrixElement(h.tail())), pos).entries();
  return ModelElement(h.model(), h.level(), MatrixElement(m.entries()), std::move(t));
}

}  // namespace detail

/// psi_k(x) = sum_i psi(x_ii) for positive x in M_k(A); k = x.level().
inline ExtendedValue evaluate_weight(const WeightSpec& psi, const ModelElement& x) {
  require(x.is_positive(), ErrorCode::NotPositive, "weights are evaluated on positive elements");
  if (detail::formal_part_infinite(psi, x)) return ExtendedValue::infinite();
  const double v = detail::diagonal_pairing(psi, x).real();
  return ExtendedValue::finite(std::max(0.0, v));
}

/// Plain matrix input: evaluated in the compact model's corner, or in the
/// block algebra described by the matrix's block tags.
inline ExtendedValue evaluate_weight(const WeightSpec& psi, const MatrixElement& a) {
  if (a.has_blocks()) {
    std::vector<std::size_t> dims;
    for (std::size_t i = 0; i < a.dim(); ++i) {
      const auto label = static_cast<std::size_t>(a.block_tags()[i]);
      require(label == dims.size() || label + 1 == dims.size(), ErrorCode::InvalidArgument,
              "block tags must be contiguous and ascending");
      if (label == dims.size()) dims.push_back(0);
      ++dims[label];
    }
    return evaluate_weight(psi, ModelElement(AlgebraModel::finite_blocks(dims), 1, a));
  }
  const AlgebraModel model = psi.kind() == WeightKind::block_trace ? AlgebraModel::finite_blocks({a.dim()})
                                                                   : AlgebraModel::compact(a.dim());
  return evaluate_weight(psi, ModelElement(model, 1, a));
}

/// psi_k on M_k(A): the amplified weight sum_i psi(x_ii).
struct AmplifiedWeight {
  WeightSpec psi;
  std::size_t k = 1;

  /// Elements of a smaller level are embedded by zero padding.
  ExtendedValue operator()(const ModelElement& x) const {
    require(x.level() <= k, ErrorCode::InvalidArgument, "element level exceeds the amplification");
    return evaluate_weight(psi, x.level() == k ? x : x.embed_level(k));
  }
};

inline AmplifiedWeight amplify_weight(const WeightSpec& psi, std::size_t k) {
  require(k >= 1, ErrorCode::InvalidArgument, "amplification level must be >= 1");
  return AmplifiedWeight{psi, k};
}

/// x = sum_j c_j p_j with p_j >= 0 and c = (1, -1, i, -i): positive and
/// negative parts of Re x, then of Im x.
inline std::array<ModelElement, 4> standard_decomposition(const ModelElement& x) {
  const Complex half(0.5, 0.0);
  const ModelElement re = half * (x + x.adjoint());
  const ModelElement im = Complex(0.0, -0.5) * (x - x.adjoint());
  return {detail::positive_part(re), detail::positive_part(Complex(-1.0) * re), detail::positive_part(im),
          detail::positive_part(Complex(-1.0) * im)};
}

inline constexpr std::array<Complex, 4> standard_coefficients{Complex(1, 0), Complex(-1, 0), Complex(0, 1),
                                                              Complex(0, -1)};

/// Linear extension of psi_k to M_psi_k, computed through the standard
/// decomposition. Throws OutsideIdeal when a part has infinite weight.
inline Complex linear_extension(const WeightSpec& psi, const ModelElement& x) {
  const auto parts = standard_decomposition(x);
  Complex sum = 0.0;
  for (std::size_t j = 0; j < parts.size(); ++j) {
    const ExtendedValue v = evaluate_weight(psi, parts[j]);
    require(v.is_finite(), ErrorCode::OutsideIdeal, "element is outside the domain ideal of the weight");
    sum += standard_coefficients[j] * v.value();
  }
  return sum;
}

enum class MembershipLabel { in_M_plus, in_M, in_N, outside };

constexpr std::string_view to_string(MembershipLabel l) {
  switch (l) {
    case MembershipLabel::in_M_plus: return "in_M_plus";
    case MembershipLabel::in_M: return "in_M";
    case MembershipLabel::in_N: return "in_N";
    case MembershipLabel::outside: return "outside";
  }
  return "outside";
}

struct Membership {
  bool in_M_plus = false;  // positive with finite weight
  bool in_M = false;       // all four standard parts have finite weight
  bool in_N = false;       // psi(x*x) finite
  MembershipLabel label = MembershipLabel::outside;
};

/// M_psi is contained in N_psi, so the labels are ranked
/// in_M_plus > in_M > in_N > outside.
inline Membership ideal_membership(const WeightSpec& psi, const ModelElement& x) {
  Membership m;
  m.in_N = evaluate_weight(psi, x.adjoint() * x).is_finite();
  bool all_finite = true;
  for (const ModelElement& part : standard_decomposition(x)) all_finite = all_finite && evaluate_weight(psi, part).is_finite();
  m.in_M = all_finite;
  m.in_M_plus = x.is_positive() && evaluate_weight(psi, x).is_finite();
  if (m.in_M_plus) {
    m.label = MembershipLabel::in_M_plus;
  } else if (m.in_M) {
    m.label = MembershipLabel::in_M;
  } else if (m.in_N) {
    m.label = MembershipLabel::in_N;
  }
  return m;
}

namespace detail {

inline std::vector<std::size_t> default_corner_schedule() {
  std::vector<std::size_t> s;
  for (std::size_t m = 16; m <= 4096; m *= 2) s.push_back(m);
  return s;
}

inline std::size_t total_rank(const ModelElement& e) { return projection_rank(e.matrix()); }

}  // namespace detail

/// The infimum of psi_infinity over projections equivalent to e.
///
/// Traces give psi_k(e) exactly. A non-constant h on the compact model is
/// minimized per corner size m: any projection of rank r in M_j of the
/// m-corner has weight at least r * min(h_1..h_m), attained by r copies of
/// the minimizing basis projection. The report is the last schedule value with
/// the final increment as the error bound.
inline LimitReport underline_psi(const WeightSpec& psi, const ModelElement& e,
                                 std::vector<std::size_t> schedule = detail::default_corner_schedule()) {
  require(e.is_projection(), ErrorCode::NotProjection, "underline psi is defined on projections");
  const auto n_used = static_cast<std::int64_t>(e.matrix().dim());

  if (psi.is_trace()) {
    // sum_b w_b rank_b(e), with integer ranks
    if (psi.kind() == WeightKind::zero_on_finite_rank_else_inf) return LimitReport::exact(0.0, n_used);
    const std::vector<double> w = psi.index_weights(e.model());
    const std::vector<int> inner = e.model().inner_labels();
    std::vector<double> block_w(e.model().block_count(), 0.0);
    for (std::size_t s = 0; s < inner.size(); ++s) block_w[static_cast<std::size_t>(inner[s])] = w[s];
    double value = 0.0;
    for (const auto& [label, rank] : block_ranks(e.matrix())) {
      value += block_w[static_cast<std::size_t>(label)] * static_cast<double>(rank);
    }
    return LimitReport::exact(value, n_used);
  }

  const DiagonalSequence& h = psi.h();
  if (!e.model().is_compact()) {
    // Equivalent projections keep their per-block ranks; the infimum is
    // sum_b rank_b * min over block b of h, attained.
    const std::vector<int> inner = e.model().inner_labels();
    std::vector<double> block_min(e.model().block_count(), std::numeric_limits<double>::infinity());
    for (std::size_t s = 0; s < inner.size(); ++s) {
      double& slot = block_min[static_cast<std::size_t>(inner[s])];
      slot = std::min(slot, h(s + 1));
    }
    double value = 0.0;
    for (const auto& [label, rank] : block_ranks(e.matrix())) {
      if (rank > 0) value += static_cast<double>(rank) * block_min[static_cast<std::size_t>(label)];
    }
    return LimitReport::exact(value, n_used);
  }

  const std::size_t r = detail::total_rank(e);
  if (r == 0) return LimitReport::exact(0.0, n_used);
  std::sort(schedule.begin(), schedule.end());
  schedule.erase(std::unique(schedule.begin(), schedule.end()), schedule.end());
  std::vector<std::size_t> usable;
  for (std::size_t m : schedule)
    if (m >= r) usable.push_back(m);
  if (usable.empty()) {
    throw Error(ErrorCode::RankExceedsCorner, "rank " + std::to_string(r) + " exceeds every scheduled corner size");
  }

  std::vector<double> values;
  double running_min = std::numeric_limits<double>::infinity();
  std::size_t scanned = 0;
  for (std::size_t m : usable) {
    for (; scanned < m; ++scanned) running_min = std::min(running_min, h(scanned + 1));
    values.push_back(static_cast<double>(r) * running_min);
  }
  const double last = values.back();
  const auto n_last = static_cast<std::int64_t>(usable.back());
  if (values.size() == 1) return LimitReport::bracket(0.0, last, n_last);
  const double inc = values[values.size() - 2] - last;
  const double prev_inc = values.size() >= 3 ? values[values.size() - 3] - values[values.size() - 2] : inc;
  LimitReport rep{LimitStatus::converged, last, last - inc, last, inc, n_last};
  if (inc > 0.0 && inc > prev_inc) rep.status = LimitStatus::bracketed;
  return rep;
}

/// [plus] - [minus]. Over A both scalar parts vanish; a class over the
/// unitization carries arbitrary projections of M_n(A^dagger).
struct KClass {
  UnitizedElement plus;
  UnitizedElement minus;
  bool over_unitization = false;

  std::size_t level() const { return plus.level(); }

  static KClass k00(const ModelElement& plus, const ModelElement& minus) {
    const std::size_t k = std::max(plus.level(), minus.level());
    KClass c{UnitizedElement::from_algebra(plus.embed_level(k)), UnitizedElement::from_algebra(minus.embed_level(k)),
             false};
    require(plus.is_projection() && minus.is_projection(), ErrorCode::NotProjection,
            "class representatives must be projections");
    return c;
  }

  static KClass k0(const UnitizedElement& plus, const UnitizedElement& minus) {
    const std::size_t k = std::max(plus.level(), minus.level());
    KClass c{plus.embed_level(k), minus.embed_level(k), true};
    require(c.plus.is_projection() && c.minus.is_projection(), ErrorCode::NotProjection,
            "class representatives must be projections");
    return c;
  }
};

/// psi_*([e] - [f]) = underline-psi(e) - underline-psi(f).
inline LimitReport k00_pairing(const WeightSpec& psi, const KClass& c,
                               const std::vector<std::size_t>& schedule = detail::default_corner_schedule()) {
  require(c.plus.scalar_part().isZero(0.0) && c.minus.scalar_part().isZero(0.0), ErrorCode::InvalidArgument,
          "K_00 classes have representatives over A");
  return underline_psi(psi, c.plus.algebra_part(), schedule) - underline_psi(psi, c.minus.algebra_part(), schedule);
}

/// tau^dagger (x) Tr_n: the linear extension of tau on the algebra part,
/// scalar part ignored.
inline Complex unitized_trace(const WeightSpec& tau, const UnitizedElement& x) {
  require(tau.is_trace(), ErrorCode::InvalidArgument, "unitized_trace needs a trace");
  const ModelElement& a = x.algebra_part();
  if (a.has_tail(1e-12)) {
    throw Error(ErrorCode::OutsideIdeal, "algebra part has a formal infinite-rank component");
  }
  return detail::diagonal_pairing(tau, a);
}

/// tau^dagger_*([e] - [f]). With restrict_to_k0 the class must lie in the
/// kernel of K_0(A^dagger) -> K_0(C), decided by the integer ranks of the
/// scalar parts.
inline double k0_pairing(const WeightSpec& tau, const KClass& c, bool restrict_to_k0 = false) {
  if (restrict_to_k0) {
    const std::size_t rp = projection_rank(MatrixElement(c.plus.scalar_part()));
    const std::size_t rm = projection_rank(MatrixElement(c.minus.scalar_part()));
    if (rp != rm) {
      throw Error(ErrorCode::NotInKernel, "scalar parts have ranks " + std::to_string(rp) + " and " + std::to_string(rm));
    }
  }
  return (unitized_trace(tau, c.plus) - unitized_trace(tau, c.minus)).real();
}

inline KClass canonical_k00_to_k0(const KClass& c) {
  require(c.plus.scalar_part().isZero(0.0) && c.minus.scalar_part().isZero(0.0), ErrorCode::InvalidArgument,
          "the canonical map starts from a class over A");
  KClass out = c;
  out.over_unitization = true;
  return out;
}

/// Largest |psi_2k(x) - (psi (x) Tr_2k)(x)| over random sums of simple tensors
/// x = sum_l a_l (x) s_l. The left side uses the standard decomposition of x,
/// the right side psi(a_l) Tr(s_l).
inline double tensor_identity_check(const WeightSpec& psi, const AlgebraModel& model, std::size_t k,
                                    std::size_t samples, std::uint64_t seed) {
  require(k >= 1, ErrorCode::InvalidArgument, "k must be >= 1");
  Rng rng(seed);
  std::uniform_int_distribution<int> terms(1, 3);
  const auto dim = static_cast<Eigen::Index>(2 * k);
  double worst = 0.0;
  for (std::size_t sample = 0; sample < samples; ++sample) {
    ModelElement x = ModelElement::zero(model, 2 * k);
    Complex rhs = 0.0;
    const int count = terms(rng);
    for (int l = 0; l < count; ++l) {
      const ModelElement a = random_model_element(model, 1, rng);
      const ComplexMatrix s = random_gaussian(dim, dim, rng);
      x = x + ModelElement::simple_tensor(s, a);
      rhs += linear_extension(psi, a) * s.trace();
    }
    worst = std::max(worst, std::abs(linear_extension(psi, x) - rhs));
  }
  return worst;
}

struct WellDefinednessProbe {
  double conjugation = 0.0;    // e -> u e u^-1 with u from similarity()
  double stabilization = 0.0;  // [e (+) r] - [f (+) r]
  double equivalence = 0.0;    // e -> W e W* for a unitary W
  double max() const { return std::max({conjugation, stabilization, equivalence}); }
};

/// Recomputes tau^dagger_*(c) after changing representatives in the three ways
/// that leave the class fixed and reports the largest drift of each kind.
inline WellDefinednessProbe k0_welldefinedness_drift(const WeightSpec& tau, const KClass& c, std::size_t trials,
                                                     std::uint64_t seed) {
  Rng rng(seed);
  const AlgebraModel& model = c.plus.model();
  const std::size_t k = c.level();
  const double base = k0_pairing(tau, c);
  WellDefinednessProbe probe;

  const auto conjugate = [&](const UnitizedElement& p, const UnitizedElement& near) {
    const SimilarityWitness w = similarity(p.representation(), near.representation());
    return UnitizedElement::from_representation(model, k, w.u * p.representation() * w.u_inv);
  };
  const auto rotate = [&](const UnitizedElement& p, const UnitizedElement& w) { return w * p * w.adjoint(); };

  for (std::size_t t = 0; t < trials; ++t) {
    const UnitizedElement small = random_unitized_unitary(model, k, rng, 0.05);
    const KClass near_plus{rotate(c.plus, small), rotate(c.minus, small), true};
    const KClass conj{conjugate(c.plus, near_plus.plus), conjugate(c.minus, near_plus.minus), true};
    probe.conjugation = std::max(probe.conjugation, std::abs(k0_pairing(tau, conj) - base));

    const UnitizedElement r = random_unitized_projection(model, 1 + t % 2, rng);
    const KClass stab{level_sum(c.plus, r), level_sum(c.minus, r), true};
    probe.stabilization = std::max(probe.stabilization, std::abs(k0_pairing(tau, stab) - base));

    const UnitizedElement wide = random_unitized_unitary(model, k, rng, 3.0);
    const KClass eq{rotate(c.plus, wide), rotate(c.minus, wide), true};
    probe.equivalence = std::max(probe.equivalence, std::abs(k0_pairing(tau, eq) - base));
  }
  return probe;
}

struct PositivityAudit {
  bool passed = true;
  double min_value = std::numeric_limits<double>::infinity();
  std::size_t samples = 0;
  explicit operator bool() const { return passed; }
};

/// tau_*([e] - [0]) >= 0 on random projections e of M_k(A), k = 1..max_level.
inline PositivityAudit positivity_audit(const WeightSpec& tau, const AlgebraModel& model, std::size_t sample_count,
                                        std::uint64_t seed, std::size_t max_level = 3) {
  Rng rng(seed);
  PositivityAudit audit;
  for (std::size_t i = 0; i < sample_count; ++i) {
    const std::size_t k = 1 + i % max_level;
    const ModelElement e = random_model_projection(model, k, rng);
    const double v = k0_pairing(tau, KClass::k00(e, ModelElement::zero(model, k)));
    audit.min_value = std::min(audit.min_value, v);
    audit.passed = audit.passed && v >= -1e-9;
    ++audit.samples;
  }
  return audit;
}

}  // namespace ktrace
