#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "ktrace/dimension_group.hpp"
#include "ktrace/limit_report.hpp"
#include "ktrace/matrix_core.hpp"
#include "ktrace/regularization.hpp"
#include "ktrace/weight_pairing.hpp"

namespace ktrace {

using json = nlohmann::json;

/// Parses text, reporting syntax errors with 1-based line and column.
inline json parse_json_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                                           e.what());
  }
}

namespace detail {

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::ParseError, std::string("missing key \"") + key + "\"");
  return j.at(key);
}

inline double number_of(const json& j, const char* what) {
  if (!j.is_number()) throw Error(ErrorCode::ParseError, std::string(what) + " must be a number");
  return j.get<double>();
}

inline std::vector<double> numbers_of(const json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, std::string(what) + " must be an array");
  std::vector<double> out;
  for (const json& x : j) out.push_back(number_of(x, what));
  return out;
}

}  // namespace detail

/// Doubles as JSON numbers; +-infinity as the strings "inf"/"-inf".
inline json number_json(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline std::string rational_string(const Rational& r) {
  const auto num = boost::multiprecision::numerator(r);
  const auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

/// "p/q", "p" or a JSON integer.
inline Rational parse_rational(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (!j.is_string()) throw Error(ErrorCode::ParseError, "rationals are written as \"p/q\" strings");
  const std::string s = j.get<std::string>();
  const auto valid_int = [](std::string_view t) {
    std::size_t i = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  const std::size_t slash = s.find('/');
  const std::string num = s.substr(0, slash);
  const std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!valid_int(num) || !valid_int(den)) throw Error(ErrorCode::ParseError, "malformed rational \"" + s + "\"");
  const boost::multiprecision::cpp_int d(den);
  if (d == 0) throw Error(ErrorCode::ParseError, "rational \"" + s + "\" has a zero denominator");
  return Rational(boost::multiprecision::cpp_int(num), d);
}

// Matrices: {"dim": n, "re": [[...]], "im": [[...]]}, im optional on input.

inline json to_json(const MatrixElement& a) {
  json re = json::array();
  json im = json::array();
  for (std::size_t i = 0; i < a.dim(); ++i) {
    json rr = json::array();
    json ir = json::array();
    for (std::size_t j = 0; j < a.dim(); ++j) {
      rr.push_back(a(i, j).real());
      ir.push_back(a(i, j).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ir));
  }
  json out{{"dim", a.dim()}, {"re", std::move(re)}, {"im", std::move(im)}};
  if (a.has_blocks()) out["blocks"] = a.block_tags();
  return out;
}

inline MatrixElement matrix_from_json(const json& j) {
  const json& re = detail::field(j, "re");
  if (!re.is_array() || re.empty()) throw Error(ErrorCode::ParseError, "\"re\" must be a non-empty array of rows");
  const std::size_t n = re.size();
  if (j.contains("dim") && (!j["dim"].is_number_unsigned() || j["dim"].get<std::size_t>() != n)) {
    throw Error(ErrorCode::ParseError, "\"dim\" disagrees with the number of rows");
  }
  const auto idx = [](std::size_t i) { return static_cast<Eigen::Index>(i); };
  ComplexMatrix m = ComplexMatrix::Zero(idx(n), idx(n));
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> row = detail::numbers_of(re[i], "matrix row");
    if (row.size() != n) throw Error(ErrorCode::ParseError, "matrix must be square");
    for (std::size_t k = 0; k < n; ++k) m(idx(i), idx(k)).real(row[k]);
  }
  if (j.contains("im")) {
    const json& im = j["im"];
    if (!im.is_array() || im.size() != n) throw Error(ErrorCode::ParseError, "\"im\" must match \"re\" in shape");
    for (std::size_t i = 0; i < n; ++i) {
      const std::vector<double> row = detail::numbers_of(im[i], "matrix row");
      if (row.size() != n) throw Error(ErrorCode::ParseError, "\"im\" must match \"re\" in shape");
      for (std::size_t k = 0; k < n; ++k) m(idx(i), idx(k)).imag(row[k]);
    }
  }
  std::vector<int> tags;
  if (j.contains("blocks")) tags = j["blocks"].get<std::vector<int>>();
  return MatrixElement(std::move(m), std::move(tags));
}

inline json to_json(const HermitianSpectrum& s) { return json{{"eigenvalues", s.eigenvalues}}; }

// Weights: {"kind": "...", "params": {...}}.

inline json to_json(const WeightSpec& w) {
  json params = json::object();
  switch (w.kind()) {
    case WeightKind::block_trace: params["weights"] = w.block_weights(); break;
    case WeightKind::diagonal_h:
      params["prefix"] = w.h().prefix;
      params["offset"] = w.h().offset;
      params["scale"] = w.h().scale;
      params["power"] = w.h().power;
      break;
    default: break;
  }
  return json{{"kind", std::string(to_string(w.kind()))}, {"params", std::move(params)}, {"is_trace", w.is_trace()}};
}

/// Accepts the kinds by name, plus the short forms finite_rank_tr and
/// zero_on_finite_rank. diagonal_h takes {"prefix", "offset", "scale", "power"};
/// without "offset" the last prefix entry repeats forever.
inline WeightSpec weight_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "a weight is a JSON object with \"kind\"");
  const json& kind_j = detail::field(j, "kind");
  if (!kind_j.is_string()) throw Error(ErrorCode::ParseError, "\"kind\" must be a string");
  const std::string kind = kind_j.get<std::string>();
  const json params = j.contains("params") ? j["params"] : json::object();
  if (kind == "block_trace") {
    const json& wj = detail::field(params, "weights");
    if (!wj.is_array()) throw Error(ErrorCode::ParseError, "\"weights\" must be an array");
    std::vector<double> weights;
    for (const json& x : wj) weights.push_back(x.is_string() ? to_double(parse_rational(x)) : detail::number_of(x, "weight"));
    return WeightSpec::block_trace(std::move(weights));
  }
  if (kind == "diagonal_h") {
    DiagonalSequence h;
    if (params.contains("prefix")) h.prefix = detail::numbers_of(params["prefix"], "\"prefix\"");
    if (params.contains("offset")) {
      h.offset = detail::number_of(params["offset"], "\"offset\"");
    } else {
      if (h.prefix.empty()) throw Error(ErrorCode::ParseError, "diagonal_h needs \"prefix\" or \"offset\"");
      h.offset = h.prefix.back();
    }
    if (params.contains("scale")) h.scale = detail::number_of(params["scale"], "\"scale\"");
    if (params.contains("power")) h.power = detail::number_of(params["power"], "\"power\"");
    return WeightSpec::diagonal_h(std::move(h));
  }
  if (kind == "finite_rank_tr_else_inf" || kind == "finite_rank_tr") return WeightSpec::finite_rank_trace();
  if (kind == "zero_on_finite_rank_else_inf" || kind == "zero_on_finite_rank") return WeightSpec::zero_on_finite_rank();
  throw Error(ErrorCode::ParseError, "unknown weight kind \"" + kind + "\"");
}

inline json to_json(const LimitReport& r) {
  return json{{"status", std::string(to_string(r.status))},
              {"value", number_json(r.value)},
              {"bracket", json::array({number_json(r.lo), number_json(r.hi)})},
              {"error_bound", number_json(r.error_bound)},
              {"n_used", r.n_used}};
}

/// Pairing results: {"value", "bracket", "converged"}.
inline json pairing_json(const LimitReport& r) {
  return json{{"value", number_json(r.value)},
              {"bracket", json::array({number_json(r.lo), number_json(r.hi)})},
              {"converged", r.converged()}};
}

inline json to_json(const DimensionGroupElement& g) {
  json prefix = json::array();
  for (const Rational& a : g.prefix()) prefix.push_back(rational_string(a));
  return json{{"prefix", std::move(prefix)}, {"q", rational_string(g.tail_q())}, {"N", g.tail_start()}};
}

inline DimensionGroupElement dimension_group_from_json(const json& j) {
  const json& pj = detail::field(j, "prefix");
  if (!pj.is_array()) throw Error(ErrorCode::ParseError, "\"prefix\" must be an array");
  std::vector<Rational> prefix;
  for (const json& x : pj) prefix.push_back(parse_rational(x));
  const std::size_t n = j.contains("N") ? j["N"].get<std::size_t>() : prefix.size() + 1;
  return DimensionGroupElement(std::move(prefix), parse_rational(detail::field(j, "q")), n);
}

/// {"series": {"1": v1, "2": v2, ...}, "report": {...}}.
inline json to_json(const RegularizationRun& run) {
  json series = json::object();
  for (std::size_t n = 0; n < run.series.size(); ++n) series[std::to_string(n + 1)] = number_json(run.series[n]);
  return json{{"series", std::move(series)}, {"report", to_json(run.report)}};
}

}  // namespace ktrace
