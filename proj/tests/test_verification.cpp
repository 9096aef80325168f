#include <catch_amalgamated.hpp>

#include <set>

#include "ktrace/verification_cases.hpp"

using namespace ktrace;

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

std::vector<VerificationCase> toy_cases() {
  return {{"b-passes", "always passes", Provenance::trivial, 1.0, 0.0,
           [](const CaseContext&) { return within(1.0, 1.0, 0.0); }},
          {"a-random", "draws from the case generator", Provenance::derived, "any", 0.0,
           [](const CaseContext& ctx) {
             Rng rng = ctx.rng();
             return holds(true, std::uniform_real_distribution<double>(0, 1)(rng));
           }},
          {"c-crashes", "throws", Provenance::derived, 0.0, 0.0,
           [](const CaseContext&) -> CaseResult { throw Error(ErrorCode::NumericalFailure, "boom"); }}};
}

}  // namespace

TEST_CASE("config parsing", "[config]") {
  const SuiteConfig c = SuiteConfig::from_json(parse_json_text(R"({"suite": "property", "seed": 7, "samples": 10})"));
  CHECK(c.suite == "property");
  CHECK(c.seed == 7);
  CHECK(c.samples == 10);
  CHECK(code_of([] { SuiteConfig::from_json(json{{"colour", 1}}); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { SuiteConfig::from_json(json{{"seed", "x"}}); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { SuiteConfig::from_json(json{{"suite", "everything"}}); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { SuiteConfig::from_json(json::array()); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { suite_cases("nope"); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("JSON syntax errors carry line and column", "[config]") {
  try {
    parse_json_text("{\n  \"seed\": 4,\n  oops\n}");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("line 3, column 3") != std::string::npos);
  }
}

TEST_CASE("empty registry gives a passing empty report", "[runner]") {
  const json report = run_cases({}, SuiteConfig{});
  CHECK(report["cases"].empty());
  CHECK(report["summary"]["pass"] == 0);
  CHECK(report["summary"]["fail"] == 0);
  CHECK(report_passed(report));
}

TEST_CASE("crashing cases are reported and the run continues", "[runner]") {
  const json report = run_cases(toy_cases(), SuiteConfig{});
  REQUIRE(report["cases"].size() == 3);
  CHECK(report["cases"][0]["id"] == "a-random");
  CHECK(report["cases"][2]["status"] == "crashed");
  CHECK(report["cases"][2]["detail"].get<std::string>().rfind("CaseCrashed: ", 0) == 0);
  CHECK(report["summary"]["pass"] == 2);
  CHECK(report["summary"]["fail"] == 1);
  CHECK_FALSE(report_passed(report));
  CHECK(report["header"]["seed"] == 42);
  CHECK(report["header"].contains("config_hash"));
  CHECK(report["header"]["versions"].contains("eigen"));
}

TEST_CASE("reports depend on the seed and not on the thread count", "[runner]") {
  SuiteConfig one;
  SuiteConfig four;
  four.jobs = 4;
  CHECK(run_cases(toy_cases(), one).dump() == run_cases(toy_cases(), four).dump());
  SuiteConfig other;
  other.seed = 43;
  CHECK(run_cases(toy_cases(), one).dump() != run_cases(toy_cases(), other).dump());
  std::vector<VerificationCase> dup = toy_cases();
  dup.push_back(dup.front());
  CHECK(code_of([&] { run_cases(dup, one); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("CSV rendering", "[runner]") {
  const std::string csv = report_csv(run_cases(toy_cases(), SuiteConfig{}));
  CHECK(csv.rfind("id,provenance,status,measured,expected,tolerance\n", 0) == 0);
  CHECK(csv.find("b-passes,TRIVIAL,pass,1.0,1.0,0.0\n") != std::string::npos);
  CHECK(csv.find("c-crashes,DERIVED,crashed,null,0.0,0.0\n") != std::string::npos);
}

TEST_CASE("paper-values registry", "[registry]") {
  const std::vector<VerificationCase> cases = paper_value_cases();
  const std::set<std::string> expected{
      "weight-finite-rank-tr",   "weight-zero-on-finite-rank", "underline-psi-min-spectrum",
      "k00-lambda-z",            "regularize-usual-trace",     "regularize-zero-trace",
      "tau-k-p3-k1",             "tau-k-p3-k3",                "tau-k-p3-k5",
      "projection-p1",           "k0-exact-pj",                "tau-zeta",
      "tau-zeta-truncated",      "tau-epsilon",                "tau-on-projection-p5",
      "tau-epsilon-on-projection-p5", "lsc-gap-m10",           "mu-g",
      "mu-truncation"};
  std::set<std::string> seen;
  for (const VerificationCase& c : cases) {
    CHECK(c.provenance == Provenance::paper);
    CHECK(seen.insert(c.id).second);
  }
  CHECK(seen == expected);
  for (const VerificationCase& c : property_cases()) CHECK(c.provenance != Provenance::paper);
}

TEST_CASE("paper-values suite passes and reports tau-zeta", "[registry]") {
  SuiteConfig config;
  config.suite = "paper-values";
  const json report = run_suite(config);
  CHECK(report_passed(report));
  bool found = false;
  for (const json& row : report["cases"]) {
    if (row["id"] != "tau-zeta") continue;
    found = true;
    CHECK(row["status"] == "pass");
    CHECK(std::abs(row["measured"].get<double>() - 2.14493) < 1e-4);
  }
  CHECK(found);
}

TEST_CASE("weight JSON accepts short kind names", "[config]") {
  CHECK(weight_from_json(json{{"kind", "finite_rank_tr"}}).kind() == WeightKind::finite_rank_tr_else_inf);
  const WeightSpec h = weight_from_json(parse_json_text(R"({"kind": "diagonal_h", "params": {"prefix": [3, 2, 0.5]}})"));
  CHECK(h.h()(1) == 3.0);
  CHECK(h.h()(100) == 0.5);
  CHECK(weight_from_json(to_json(h)).h()(2) == 2.0);
  CHECK(code_of([] { weight_from_json(json{{"kind", "mystery"}}); }) == ErrorCode::ParseError);
}
