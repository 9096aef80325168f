// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <string>

#include "ktrace/ktrace.hpp"

#ifndef KTRACE_CLI_PATH
#error "KTRACE_CLI_PATH must name the ktrace executable"
#endif

namespace {

using namespace ktrace;
using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int index, bool ok, const std::string& summary) {
  std::cout << "AC" << index << ' ' << (ok ? "PASS" : "FAIL") << "  " << summary << '\n';
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

// Each criterion runs inside a guard so one exception does not hide the rest.
template <typename F>
void criterion(int index, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(index, false, std::string("exception: ") + e.what());
  }
}

std::string run_cli(const std::string& args, int& status) {
  const std::string cmd = std::string("\"") + KTRACE_CLI_PATH + "\" " + args;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    status = -1;
    return {};
  }
  std::string out;
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) out.append(buf, n);
  status = pclose(pipe);
  return out;
}

}  // namespace

int main() {
  const double zeta_truth = 0.5 + std::numbers::pi * std::numbers::pi / 6.0;
  const SingularTauOptions opt{100000, 60, {}};

  criterion(1, [&] {
    const auto start = Clock::now();
    const LimitReport r = singular_tau(FormalPositiveSeries::zeta(), 2.0, opt);
    const double t = seconds_since(start);
    const double err = std::abs(r.value - zeta_truth);
    report(1, r.converged() && err <= 1e-3 && t < 5.0,
           "zeta value " + fmt(r.value) + ", |err| " + fmt(err) + " <= 1e-3, " + fmt(t) + " s < 5 s");
  });

  criterion(2, [&] {
    bool ok = true;
    double smallest = 1.0;
    for (std::size_t m : {1, 5, 10, 20}) {
      const GapWitness w = lsc_gap_witness(m, opt);
      Rational head = 0;
      for (std::size_t j = 1; j <= m; ++j) head += Rational(1) / (Rational(j) * Rational(j));
      const double gap = w.full.value - w.partial.value;
      smallest = std::min(smallest, gap);
      ok = ok && w.certified && gap >= 0.5 - 2e-3 && w.partial_exact == head;
    }
    report(2, ok, "gap certified for M in {1,5,10,20}, smallest " + fmt(smallest) + " >= 0.498, exact heads");
  });

  criterion(3, [&] {
    const LimitReport r = singular_tau(FormalPositiveSeries::power(1.5), 1.5, opt);
    bool proj = true;
    double worst = 0.0;
    for (std::size_t j = 1; j <= 20; ++j) {
      proj = proj && singular_tau_on_projection(projection_p(j), 1.5) == 0;
      worst = std::max(worst, std::abs(singular_tau(projection_p(j), 1.5, opt).value));
    }
    const double err = std::abs(r.value - 0.5);
    report(3, r.converged() && err <= 1e-2 && proj && worst <= 1e-3,
           "tau_eps = " + fmt(r.value) + " (|err| " + fmt(err) + " <= 1e-2); tau_eps(p_j) = 0 exactly, numeric max " +
               fmt(worst) + " <= 1e-3");
  });

  criterion(4, [&] {
    Rng rng(2024);
    bool exact = true;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const DimensionGroupElement g = cases::random_scale_element(rng);
      exact = exact && singular_tau_on_projection(g, 2.0) == g.tail_q();
      worst = std::max(worst, std::abs(singular_tau(g, 2.0, opt).value - to_double(g.tail_q())));
    }
    report(4, exact && worst <= 1e-6, "100 scale elements: exact q, numeric max |err| " + fmt(worst) + " <= 1e-6");
  });

  criterion(5, [&] {
    std::vector<std::size_t> to512;
    for (std::size_t m = 16; m <= 512; m *= 2) to512.push_back(m);
    bool ok = true;
    double worst = 0.0;
    double widest = 0.0;
    for (std::size_t r : {1, 2, 5}) {
      const ModelElement e = cases::corner_projection(8, r);
      const KClass c = KClass::k00(e, ModelElement::zero(e.model(), 1));
      const LimitReport a = k00_pairing(cases::example_h(), c, to512);
      worst = std::max(worst, std::abs(a.value - 0.5 * static_cast<double>(r)));
      const LimitReport b = k00_pairing(cases::one_plus_inverse_n(), c);
      widest = std::max(widest, b.hi - b.lo);
      ok = ok && b.n_used == 4096 && b.lo <= b.value && b.hi - b.lo <= 1e-2 &&
           std::abs(b.value - static_cast<double>(r)) <= 1e-2;
    }
    report(5, ok && worst <= 1e-6,
           "0.5 r at corner 512 (max |err| " + fmt(worst) + " <= 1e-6); 1 + 1/n bracket width " + fmt(widest) +
               " <= 1e-2 at 4096");
  });

  criterion(6, [&] {
    const LimitReport g = mu_function_trace(SampledFunctionTrace::g_pattern(1.0), 100000);
    const LimitReport cut = mu_function_trace(SampledFunctionTrace::truncated(50, 1.0), 100000);
    report(6, g.converged() && std::abs(g.value - 1.0) <= 1e-3 && cut.converged() && cut.value == 0.0,
           "mu(g) = " + fmt(g.value) + " (tau(a) = 1, tol 1e-3); mu(truncation) = " + fmt(cut.value));
  });

  criterion(7, [&] {
    Rng rng(7);
    bool ok = true;
    for (int i = 0; i < 100; ++i) {
      const ModelElement a = cases::random_finite_rank_positive(rng);
      const double tr = a.matrix().entries().trace().real();
      const RegularizationRun usual = regularize_trace(WeightSpec::finite_rank_trace(), ApproximateUnit::harmonic(), a);
      const RegularizationRun zero = regularize_trace(WeightSpec::zero_on_finite_rank(), ApproximateUnit::harmonic(), a);
      ok = ok && usual.report.converged() && usual.report.value == evaluate_weight(WeightSpec::finite_rank_trace(), a).value() &&
           std::abs(usual.report.value - tr) <= 1e-12 && zero.report.converged() && zero.report.value == 0.0;
    }
    report(7, ok, "100 finite-rank positives: regularized trace = Tr, regularized zero stand-in = 0");
  });

  criterion(8, [&] {
    const std::vector<std::string> ids{"round-to-projection", "similarity-bound",  "polar-isometry",
                                       "polarization",        "ladder-law",        "underline-psi-additivity",
                                       "k0-welldefinedness",  "positivity-audit"};
    std::vector<VerificationCase> selected;
    for (VerificationCase& c : property_cases())
      if (std::find(ids.begin(), ids.end(), c.id) != ids.end()) selected.push_back(std::move(c));
    SuiteConfig config;
    config.samples = 1000;
    const json rep = run_cases(std::move(selected), config);
    std::string failed;
    for (const json& row : rep["cases"])
      if (row["status"] != "pass") failed += " " + row["id"].get<std::string>();
    report(8, rep["cases"].size() == ids.size() && report_passed(rep),
           "8 proof-machinery properties x 1000 instances" + (failed.empty() ? std::string() : ", failing:" + failed));
  });

  criterion(9, [&] {
    const auto start = Clock::now();
    int s1 = 0;
    int s2 = 0;
    const std::string first = run_cli("verify --suite all --seed 42", s1);
    const double t1 = seconds_since(start);
    const std::string second = run_cli("verify --suite all --seed 42", s2);
    const bool same = !first.empty() && first == second;
    report(9, same && s1 == 0 && s2 == 0 && t1 < 60.0,
           std::string(same ? "byte-identical" : "reports differ") + " reports (" + std::to_string(first.size()) +
               " bytes), exit " + std::to_string(s1) + "/" + std::to_string(s2) + ", full suite " + fmt(t1) + " s < 60 s");
  });

  return failures == 0 ? 0 : 1;
}
