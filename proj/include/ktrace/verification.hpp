#pragma once

#include <Eigen/Core>
#include <boost/version.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "ktrace/json_io.hpp"
#include "ktrace/random_elements.hpp"
#include "ktrace/singular_traces.hpp"

namespace ktrace {

inline constexpr std::string_view library_version = "0.1.0";

enum class Provenance { paper, trivial, derived };

constexpr std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::paper: return "PAPER";
    case Provenance::trivial: return "TRIVIAL";
    case Provenance::derived: return "DERIVED";
  }
  return "DERIVED";
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// Run settings. Read from a JSON config file; command-line flags override.
struct SuiteConfig {
  std::string suite = "all";
  std::uint64_t seed = 42;
  std::size_t jobs = 1;
  std::size_t samples = 1000;  // instances per property case
  SingularTauOptions singular{};

  static SuiteConfig from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, "config must be a JSON object");
    static const std::set<std::string> known{"suite", "seed", "jobs", "samples", "n_max", "truncation", "window"};
    SuiteConfig c;
    for (const auto& [key, value] : j.items()) {
      if (!known.count(key)) throw Error(ErrorCode::ConfigInvalid, "unknown config key \"" + key + "\"");
      const bool str = key == "suite";
      if (str ? !value.is_string() : !value.is_number_unsigned()) {
        throw Error(ErrorCode::ConfigInvalid, "config key \"" + key + "\" has the wrong type");
      }
    }
    if (j.contains("suite")) c.suite = j["suite"].get<std::string>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("jobs")) c.jobs = j["jobs"].get<std::size_t>();
    if (j.contains("samples")) c.samples = j["samples"].get<std::size_t>();
    if (j.contains("n_max")) c.singular.n_max = j["n_max"].get<std::int64_t>();
    if (j.contains("truncation")) c.singular.truncation = j["truncation"].get<std::size_t>();
    if (j.contains("window")) c.singular.cesaro.window = j["window"].get<std::int64_t>();
    c.validate();
    return c;
  }

  void validate() const {
    require(suite == "paper-values" || suite == "property" || suite == "all", ErrorCode::ConfigInvalid,
            "suite must be paper-values, property or all");
    require(jobs >= 1, ErrorCode::ConfigInvalid, "jobs must be >= 1");
    require(samples >= 1, ErrorCode::ConfigInvalid, "samples must be >= 1");
    require(singular.n_max >= 64, ErrorCode::ConfigInvalid, "n_max must be >= 64");
    require(singular.truncation >= 1, ErrorCode::ConfigInvalid, "truncation must be >= 1");
    require(singular.cesaro.window >= 1, ErrorCode::ConfigInvalid, "window must be >= 1");
  }

  /// Everything that influences results; jobs does not.
  json to_json() const {
    return json{{"suite", suite},
                {"seed", seed},
                {"samples", samples},
                {"n_max", singular.n_max},
                {"truncation", singular.truncation},
                {"window", singular.cesaro.window}};
  }
};

struct CaseContext {
  std::uint64_t seed = 0;  // config seed mixed with the case id
  std::size_t samples = 1000;
  SingularTauOptions singular{};

  Rng rng() const { return Rng(seed); }
};

struct CaseResult {
  bool passed = false;
  json measured;
  std::string detail;
};

struct VerificationCase {
  std::string id;
  std::string description;
  Provenance provenance = Provenance::derived;
  json expected;
  double tolerance = 0.0;
  std::function<CaseResult(const CaseContext&)> run;
};

inline CaseResult within(double measured, double expected, double tolerance) {
  const double err = std::abs(measured - expected);
  return CaseResult{err <= tolerance, number_json(measured), "abs error " + std::to_string(err)};
}

inline CaseResult holds(bool ok, json measured, std::string detail = {}) {
  return CaseResult{ok, std::move(measured), std::move(detail)};
}

/// Runs the cases on `jobs` worker threads. Each case draws its randomness
/// from seed ^ fnv1a(id), so the report depends only on the config.
inline json run_cases(std::vector<VerificationCase> cases, const SuiteConfig& config) {
  std::sort(cases.begin(), cases.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < cases.size(); ++i) {
    require(cases[i].id != cases[i - 1].id, ErrorCode::ConfigInvalid, "duplicate case id " + cases[i].id);
  }

  std::vector<json> rows(cases.size());
  std::vector<char> passed(cases.size(), 0);
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (std::size_t i = next++; i < cases.size(); i = next++) {
      const VerificationCase& c = cases[i];
      const CaseContext ctx{config.seed ^ fnv1a(c.id), config.samples, config.singular};
      json row{{"id", c.id},
               {"description", c.description},
               {"provenance", std::string(to_string(c.provenance))},
               {"expected", c.expected},
               {"tolerance", c.tolerance}};
      try {
        const CaseResult r = c.run(ctx);
        row["status"] = r.passed ? "pass" : "fail";
        row["measured"] = r.measured;
        row["detail"] = r.detail;
        passed[i] = r.passed ? 1 : 0;
      } catch (const std::exception& e) {
        row["status"] = "crashed";
        row["measured"] = nullptr;
        row["detail"] = std::string("CaseCrashed: ") + e.what();
      }
      rows[i] = std::move(row);
    }
  };
  const std::size_t jobs = std::min<std::size_t>(config.jobs, std::max<std::size_t>(1, cases.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  const auto pass = static_cast<std::size_t>(std::count(passed.begin(), passed.end(), 1));
  const json cfg = config.to_json();
  json header{{"seed", config.seed},
              {"config_hash", fnv1a(cfg.dump())},
              {"config", cfg},
              {"versions",
               {{"ktrace", std::string(library_version)},
                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION)},
                {"boost", BOOST_LIB_VERSION},
                {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                      std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                      std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}}};
  return json{{"header", std::move(header)},
              {"cases", std::move(rows)},
              {"summary", {{"pass", pass}, {"fail", cases.size() - pass}}}};
}

inline bool report_passed(const json& report) { return report.at("summary").at("fail").get<std::size_t>() == 0; }

/// One line per case: id,provenance,status,measured,expected,tolerance.
inline std::string report_csv(const json& report) {
  const auto cell = [](const json& v) {
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char ch : s) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return quoted + "\"";
    }
    return s;
  };
  std::ostringstream out;
  out << "id,provenance,status,measured,expected,tolerance\n";
  for (const json& row : report.at("cases")) {
    out << cell(row["id"]) << ',' << cell(row["provenance"]) << ',' << cell(row["status"]) << ','
        << cell(row["measured"]) << ',' << cell(row["expected"]) << ',' << cell(row["tolerance"]) << '\n';
  }
  return out.str();
}

}  // namespace ktrace
