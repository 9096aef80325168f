// ktrace: run verification suites and evaluate single quantities.
//
//   ktrace verify [--suite S] [--config PATH] [--out PATH] [--seed N] [--jobs K] [--format json|csv]
//   ktrace eval <pair-k00|pair-k0|singular-tau|mu|regularize|underline-psi> ...
//
// Exit codes: 0 pass, 1 failing cases, 2 configuration or input errors.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ktrace/ktrace.hpp"

namespace {

using namespace ktrace;

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_config = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigInvalid, "cannot write " + path);
  out << text;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, sep);) parts.push_back(item);
  return parts;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw Error(ErrorCode::ParseError, "not a number: \"" + s + "\"");
  return v;
}

std::size_t parse_count(const std::string& s) {
  const double v = parse_double(s);
  if (v < 0 || v != std::floor(v)) throw Error(ErrorCode::ParseError, "not a nonnegative integer: \"" + s + "\"");
  return static_cast<std::size_t>(v);
}

/// A weight as JSON, or just its kind name.
WeightSpec parse_weight(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') return weight_from_json(parse_json_text(arg));
  return weight_from_json(json{{"kind", arg}});
}

/// "compact" or "blocks:d1,d2,...".
std::optional<AlgebraModel> parse_model(const std::string& arg) {
  if (arg.empty() || arg == "compact") return std::nullopt;
  if (arg.rfind("blocks:", 0) == 0) {
    std::vector<std::size_t> dims;
    for (const std::string& d : split(arg.substr(7), ',')) dims.push_back(parse_count(d));
    return AlgebraModel::finite_blocks(dims);
  }
  throw Error(ErrorCode::ParseError, "model must be \"compact\" or \"blocks:d1,d2,...\"");
}

/// "diag:x1,x2,...", "rankN" (a diagonal rank-N projection), or a JSON matrix.
MatrixElement parse_matrix(const std::string& arg, std::size_t min_dim = 1) {
  if (arg.rfind("diag:", 0) == 0) {
    std::vector<double> d;
    for (const std::string& x : split(arg.substr(5), ',')) d.push_back(parse_double(x));
    if (d.empty()) throw Error(ErrorCode::ParseError, "diag: needs at least one entry");
    return MatrixElement::diagonal(d);
  }
  if (arg.rfind("rank", 0) == 0) {
    const std::size_t r = parse_count(arg.substr(4));
    std::vector<double> d(std::max(r, min_dim), 0.0);
    std::fill(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(r), 1.0);
    return MatrixElement::diagonal(d);
  }
  return matrix_from_json(parse_json_text(arg));
}

ModelElement place(const MatrixElement& m, const std::optional<AlgebraModel>& model) {
  if (!model) return ModelElement(AlgebraModel::compact(m.dim()), 1, m);
  require(m.dim() % model->inner_dim() == 0, ErrorCode::InvalidArgument,
          "matrix size must be a multiple of the algebra dimension");
  return ModelElement(*model, m.dim() / model->inner_dim(), m);
}

/// {"algebra": matrix, "scalar": [[...]]} with real scalar entries.
UnitizedElement parse_unitized(const std::string& arg, const AlgebraModel& model) {
  const json j = parse_json_text(arg);
  const MatrixElement a = matrix_from_json(detail::field(j, "algebra"));
  const json& sj = detail::field(j, "scalar");
  if (!sj.is_array() || sj.empty()) throw Error(ErrorCode::ParseError, "\"scalar\" must be a square array");
  const auto k = static_cast<Eigen::Index>(sj.size());
  ComplexMatrix lambda(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const std::vector<double> row = detail::numbers_of(sj[static_cast<std::size_t>(i)], "scalar row");
    if (static_cast<Eigen::Index>(row.size()) != k) throw Error(ErrorCode::ParseError, "\"scalar\" must be square");
    for (Eigen::Index c = 0; c < k; ++c) lambda(i, c) = row[static_cast<std::size_t>(c)];
  }
  require(a.dim() == static_cast<std::size_t>(k) * model.inner_dim(), ErrorCode::InvalidArgument,
          "algebra part must be k * (algebra dimension) square");
  return UnitizedElement(ModelElement(model, static_cast<std::size_t>(k), a), lambda);
}

FormalPositiveSeries parse_series(const std::string& arg) {
  if (arg == "zeta2") return FormalPositiveSeries::zeta();
  if (arg.rfind("zeta2:", 0) == 0) return FormalPositiveSeries::zeta(parse_count(arg.substr(6)));
  if (arg.rfind("power:", 0) == 0) return FormalPositiveSeries::power(parse_double(arg.substr(6)));
  throw Error(ErrorCode::ParseError, "series must be zeta2, zeta2:M or power:p");
}

SampledFunctionTrace parse_pattern(const std::string& arg, double tau_a) {
  if (arg == "g") return SampledFunctionTrace::g_pattern(tau_a);
  if (arg.rfind("truncated:", 0) == 0) return SampledFunctionTrace::truncated(parse_count(arg.substr(10)), tau_a);
  if (arg.rfind("constant:", 0) == 0) return SampledFunctionTrace::constant_samples(parse_double(arg.substr(9)));
  throw Error(ErrorCode::ParseError, "pattern must be g, truncated:L or constant:c");
}

void dump_averages(const std::vector<double>& terms, const std::string& path) {
  if (path.empty()) return;
  const std::vector<double> avg = running_averages(terms);
  std::ostringstream out;
  out.precision(17);
  out << "N,A_N\n";
  for (std::size_t n = 0; n < avg.size(); ++n) out << n + 1 << ',' << avg[n] << '\n';
  write_output(out.str(), path);
}

std::string pretty(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traces, weights and K-theory pairings on matrix models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(library_version));

  // verify
  CLI::App* verify = app.add_subcommand("verify", "Run a verification suite");
  std::string suite;
  std::string config_path;
  std::string out_path;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  verify->add_option("--suite", suite, "paper-values, property or all");
  verify->add_option("--config", config_path, "JSON config file");
  verify->add_option("--out", out_path, "write the report here instead of stdout");
  verify->add_option("--seed", seed, "overrides the config seed");
  verify->add_option("--jobs", jobs, "worker threads");
  verify->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  // eval
  CLI::App* eval = app.add_subcommand("eval", "Evaluate one quantity");
  eval->require_subcommand(1);
  std::string weight_arg;
  std::string model_arg = "compact";
  std::string class_arg;
  std::string minus_arg = "rank0";
  std::string element_arg;
  std::string series_arg;
  std::string pattern_arg = "g";
  std::string generator_arg = "harmonic";
  std::string dump_path;
  double exponent = 2.0;
  double tau_a = 1.0;
  std::int64_t nmax = 100000;
  std::size_t truncation = 60;
  std::size_t reg_steps = 64;
  bool restrict_k0 = false;

  CLI::App* pair_k00 = eval->add_subcommand("pair-k00", "psi_*([e] - [f]) for projections over A");
  pair_k00->add_option("--weight", weight_arg, "weight JSON or kind name")->required();
  pair_k00->add_option("--class", class_arg, "plus representative: rankN, diag:..., or JSON matrix")->required();
  pair_k00->add_option("--minus", minus_arg, "minus representative (default rank0)");
  pair_k00->add_option("--model", model_arg, "compact or blocks:d1,d2,...");

  CLI::App* underline = eval->add_subcommand("underline-psi", "infimum of psi over projections equivalent to e");
  underline->add_option("--weight", weight_arg, "weight JSON or kind name")->required();
  underline->add_option("--element", element_arg, "rankN, diag:..., or JSON matrix")->required();
  underline->add_option("--model", model_arg, "compact or blocks:d1,d2,...");

  CLI::App* pair_k0 = eval->add_subcommand("pair-k0", "tau-dagger_*([e] - [f]) over the unitization");
  pair_k0->add_option("--trace", weight_arg, "trace JSON or kind name")->required();
  pair_k0->add_option("--model", model_arg, "blocks:d1,d2,...")->required();
  pair_k0->add_option("--plus", class_arg, R"({"algebra": matrix, "scalar": [[...]]})")->required();
  pair_k0->add_option("--minus", minus_arg, R"({"algebra": matrix, "scalar": [[...]]})")->required();
  pair_k0->add_flag("--restrict", restrict_k0, "require the class to lie in K_0(A)");

  CLI::App* sing = eval->add_subcommand("singular-tau", "Cesaro limit of k^exponent tau_k(x)");
  sing->add_option("--series", series_arg, "zeta2, zeta2:M or power:p");
  sing->add_option("--element", element_arg, R"(dimension group element {"prefix": [...], "q": "p/q", "N": n})");
  sing->add_option("--exponent", exponent, "exponent (2 for tau, 1 + eps for tau_eps)");
  sing->add_option("--nmax", nmax, "terms averaged");
  sing->add_option("--truncation", truncation, "geometric tail terms kept");
  sing->add_option("--dump", dump_path, "write (N, A_N) as CSV");

  CLI::App* mu = eval->add_subcommand("mu", "mu(b) = lim (1/N) sum t_n tau(b(x_n))");
  mu->add_option("--pattern", pattern_arg, "g, truncated:L or constant:c");
  mu->add_option("--tau-a", tau_a, "tau(a) for the g patterns");
  mu->add_option("--nmax", nmax, "terms averaged");
  mu->add_option("--dump", dump_path, "write (N, A_N) as CSV");

  CLI::App* reg = eval->add_subcommand("regularize", "tilde-tau(a) = sup tau(d_n a d_n)");
  reg->add_option("--trace", weight_arg, "trace JSON or kind name")->required();
  reg->add_option("--element", element_arg, "diag:..., rankN or JSON matrix")->required();
  reg->add_option("--generator", generator_arg, "harmonic, dyadic (compact model) or matrix:diag:... / JSON");
  reg->add_option("--model", model_arg, "compact or blocks:d1,d2,...");
  reg->add_option("--steps", reg_steps, "largest n");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? exit_pass : exit_config;
  }

  try {
    if (verify->parsed()) {
      SuiteConfig config;
      if (!config_path.empty()) config = SuiteConfig::from_json(parse_json_text(read_file(config_path)));
      if (!suite.empty()) config.suite = suite;
      if (seed) config.seed = *seed;
      if (jobs) config.jobs = *jobs;
      config.validate();
      const json report = run_suite(config);
      write_output(format == "csv" ? report_csv(report) : pretty(report), out_path);
      return report_passed(report) ? exit_pass : exit_fail;
    }

    const std::optional<AlgebraModel> model = parse_model(model_arg);
    if (pair_k00->parsed()) {
      const WeightSpec psi = parse_weight(weight_arg);
      MatrixElement plus = parse_matrix(class_arg);
      const MatrixElement minus = parse_matrix(minus_arg, plus.dim());
      if (minus.dim() > plus.dim()) plus = parse_matrix(class_arg, minus.dim());
      const LimitReport r = k00_pairing(psi, KClass::k00(place(plus, model), place(minus, model)));
      std::cout << pretty(pairing_json(r));
    } else if (underline->parsed()) {
      const LimitReport r = underline_psi(parse_weight(weight_arg), place(parse_matrix(element_arg), model));
      std::cout << pretty(to_json(r));
    } else if (pair_k0->parsed()) {
      if (!model) throw Error(ErrorCode::ParseError, "pair-k0 needs --model blocks:d1,d2,...");
      const KClass c = KClass::k0(parse_unitized(class_arg, *model), parse_unitized(minus_arg, *model));
      std::cout << pretty(json{{"value", number_json(k0_pairing(parse_weight(weight_arg), c, restrict_k0))}});
    } else if (sing->parsed()) {
      SingularTauOptions opt;
      opt.n_max = nmax;
      opt.truncation = truncation;
      if (series_arg.empty() == element_arg.empty()) {
        throw Error(ErrorCode::ParseError, "give exactly one of --series and --element");
      }
      const FormalPositiveSeries s =
          series_arg.empty()
              ? FormalPositiveSeries::single(1, dimension_group_from_json(parse_json_text(element_arg)))
              : parse_series(series_arg);
      dump_averages(singular_tau_terms(s, exponent, opt).terms, dump_path);
      std::cout << pretty(to_json(singular_tau(s, exponent, opt)));
    } else if (mu->parsed()) {
      const SampledFunctionTrace f = parse_pattern(pattern_arg, tau_a);
      if (!dump_path.empty()) {
        std::vector<double> terms;
        for (std::int64_t n = 1; n <= nmax; ++n) {
          const auto k = static_cast<std::size_t>(n);
          terms.push_back(f.weight(k) * f.sample(k));
        }
        dump_averages(terms, dump_path);
      }
      std::cout << pretty(to_json(mu_function_trace(f, nmax)));
    } else if (reg->parsed()) {
      const ModelElement a = place(parse_matrix(element_arg), model);
      const ApproximateUnit unit = generator_arg == "harmonic" ? ApproximateUnit::harmonic()
                                   : generator_arg == "dyadic" ? ApproximateUnit::dyadic()
                                   : generator_arg.rfind("matrix:", 0) == 0
                                       ? approximate_unit(parse_matrix(generator_arg.substr(7)))
                                       : throw Error(ErrorCode::ParseError, "unknown generator " + generator_arg);
      std::cout << pretty(to_json(regularize_trace(parse_weight(weight_arg), unit, a, reg_steps)));
    }
    return exit_pass;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_config;
  }
}
