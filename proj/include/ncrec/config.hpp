// Run configuration: the line-oriented `key = value` grammar, strict parsing
// (unknown and duplicate keys are errors), and the normalized round-trip
// serialization.
//
// Grammar:
//   lambda.I.J = <float>     I, J in {2,3,4}   (antisymmetric completion)
//   alpha.I.J  = <float>
//   seed       = <uint64>
//   points     = <count>
//   tol.<name> = <float>     named check tolerances, see kTolNames
//   flow.method|t_end|dt|rel_tol|abs_tol
// `#` starts a comment; blank lines are ignored.
#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ncrec/core.hpp"
#include "ncrec/errors.hpp"
#include "ncrec/flow.hpp"
#include "ncrec/io.hpp"
#include "ncrec/recursion.hpp"

namespace ncrec {

struct RunConfig {
  DeformationParams params;
  std::uint64_t seed = 0;
  long points = 1000;
  VerifyTolerances tol;
  double drift_tol = 1e-10;
  int lmax = 4;
  IntegratorConfig flow;

  // Entries as given (upper triangle, i < j), kept for normalization.
  std::vector<MatrixEntry> lambda_entries;
  std::vector<MatrixEntry> alpha_entries;
};

namespace detail {

struct TolField {
  const char* name;
  double VerifyTolerances::* member;
};

inline constexpr std::array<TolField, 11> kTolFields{{
    {"primed", &VerifyTolerances::primed},
    {"theta_bracket", &VerifyTolerances::theta_bracket},
    {"canonical_torsion", &VerifyTolerances::canonical_torsion},
    {"canonical_lie", &VerifyTolerances::canonical_lie},
    {"spectrum_gap", &VerifyTolerances::spectrum_gap},
    {"roundtrip", &VerifyTolerances::roundtrip},
    {"q1_transport", &VerifyTolerances::q1_transport},
    {"trace", &VerifyTolerances::trace},
    {"pullback_match", &VerifyTolerances::pullback_match},
    {"involution", &VerifyTolerances::involution},
    {"cond2", &VerifyTolerances::cond2},
}};

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline double parse_float(std::string_view v, int line) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw Error(ErrorKind::SyntaxError,
                "line " + std::to_string(line) + ": not a float: '" + std::string(v) + "'");
  return out;
}

inline std::uint64_t parse_u64(std::string_view v, int line) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw Error(ErrorKind::SyntaxError,
                "line " + std::to_string(line) + ": not an unsigned integer: '" +
                    std::string(v) + "'");
  return out;
}

inline int parse_matrix_index(std::string_view v, int line) {
  int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw Error(ErrorKind::SyntaxError,
                "line " + std::to_string(line) + ": bad matrix index '" + std::string(v) + "'");
  return out;
}

inline IntegratorMethod parse_method(std::string_view v, int line) {
  std::string lower(v);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "adaptive-rk") return IntegratorMethod::adaptive_rk;
  if (lower == "implicit-midpoint") return IntegratorMethod::implicit_midpoint;
  throw Error(ErrorKind::SyntaxError,
              "line " + std::to_string(line) + ": unknown method '" + std::string(v) + "'");
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, int> seen;
  std::vector<MatrixEntry> lambda_entries, alpha_entries;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line(text.data() + pos,
                          (eol == std::string::npos ? text.size() : eol) - pos);
    pos = (eol == std::string::npos) ? text.size() + 1 : eol + 1;
    ++line_no;

    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::SyntaxError,
                  "line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw Error(ErrorKind::SyntaxError,
                  "line " + std::to_string(line_no) + ": empty key or value");

    if (seen.count(key))
      throw Error(ErrorKind::DuplicateKey, "key '" + key + "' already given on line " +
                                               std::to_string(seen[key]));
    seen[key] = line_no;

    if (key.rfind("lambda.", 0) == 0 || key.rfind("alpha.", 0) == 0) {
      const bool is_lambda = key[0] == 'l';
      const std::string_view rest(key.c_str() + (is_lambda ? 7 : 6));
      const std::size_t dot = rest.find('.');
      if (dot == std::string_view::npos)
        throw Error(ErrorKind::SyntaxError,
                    "line " + std::to_string(line_no) + ": expected lambda.I.J / alpha.I.J");
      MatrixEntry e;
      e.i = detail::parse_matrix_index(rest.substr(0, dot), line_no);
      e.j = detail::parse_matrix_index(rest.substr(dot + 1), line_no);
      e.value = detail::parse_float(value, line_no);
      (is_lambda ? lambda_entries : alpha_entries).push_back(e);
    } else if (key == "seed") {
      cfg.seed = detail::parse_u64(value, line_no);
    } else if (key == "points") {
      const std::uint64_t n = detail::parse_u64(value, line_no);
      if (n < 1) throw Error(ErrorKind::InvalidValue, "points must be >= 1");
      cfg.points = static_cast<long>(n);
    } else if (key == "lmax") {
      const std::uint64_t n = detail::parse_u64(value, line_no);
      if (n < 1 || n > 8) throw Error(ErrorKind::InvalidValue, "lmax must be in 1..8");
      cfg.lmax = static_cast<int>(n);
    } else if (key.rfind("tol.", 0) == 0) {
      const std::string name = key.substr(4);
      if (name == "drift") {
        cfg.drift_tol = detail::parse_float(value, line_no);
        continue;
      }
      bool found = false;
      for (const auto& f : detail::kTolFields) {
        if (name == f.name) {
          cfg.tol.*(f.member) = detail::parse_float(value, line_no);
          found = true;
          break;
        }
      }
      if (!found) throw Error(ErrorKind::UnknownKey, "unknown tolerance '" + name + "'");
    } else if (key == "flow.method") {
      cfg.flow.method = detail::parse_method(value, line_no);
    } else if (key == "flow.t_end") {
      cfg.flow.t_end = detail::parse_float(value, line_no);
    } else if (key == "flow.dt") {
      cfg.flow.dt = detail::parse_float(value, line_no);
    } else if (key == "flow.rel_tol") {
      cfg.flow.rel_tol = detail::parse_float(value, line_no);
    } else if (key == "flow.abs_tol") {
      cfg.flow.abs_tol = detail::parse_float(value, line_no);
    } else {
      throw Error(ErrorKind::UnknownKey, "unknown key '" + key + "'");
    }
  }

  cfg.params = validate_params(lambda_entries, alpha_entries);
  cfg.flow.validate();
  // Keep normalized upper-triangle entries for serialization.
  for (auto* list : {&lambda_entries, &alpha_entries})
    for (MatrixEntry& e : *list)
      if (e.i > e.j) {
        std::swap(e.i, e.j);
        e.value = -e.value;
      }
  const auto by_index = [](const MatrixEntry& a, const MatrixEntry& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  };
  std::sort(lambda_entries.begin(), lambda_entries.end(), by_index);
  std::sort(alpha_entries.begin(), alpha_entries.end(), by_index);
  cfg.lambda_entries = std::move(lambda_entries);
  cfg.alpha_entries = std::move(alpha_entries);
  return cfg;
}

// Normalized text form: parsing it reproduces the same configuration.
inline std::string normalized_text(const RunConfig& cfg) {
  std::string out;
  for (const MatrixEntry& e : cfg.lambda_entries)
    if (e.value != 0.0)
      out += "lambda." + std::to_string(e.i) + "." + std::to_string(e.j) + " = " +
             format_double(e.value) + "\n";
  for (const MatrixEntry& e : cfg.alpha_entries)
    if (e.value != 0.0)
      out += "alpha." + std::to_string(e.i) + "." + std::to_string(e.j) + " = " +
             format_double(e.value) + "\n";
  out += "seed = " + std::to_string(cfg.seed) + "\n";
  out += "points = " + std::to_string(cfg.points) + "\n";
  out += "lmax = " + std::to_string(cfg.lmax) + "\n";
  for (const auto& f : detail::kTolFields)
    out += std::string("tol.") + f.name + " = " + format_double(cfg.tol.*(f.member)) + "\n";
  out += "tol.drift = " + format_double(cfg.drift_tol) + "\n";
  out += std::string("flow.method = ") +
         (cfg.flow.method == IntegratorMethod::adaptive_rk ? "adaptive-rk"
                                                           : "implicit-midpoint") +
         "\n";
  out += "flow.t_end = " + format_double(cfg.flow.t_end) + "\n";
  out += "flow.dt = " + format_double(cfg.flow.dt) + "\n";
  out += "flow.rel_tol = " + format_double(cfg.flow.rel_tol) + "\n";
  out += "flow.abs_tol = " + format_double(cfg.flow.abs_tol) + "\n";
  return out;
}

}  // namespace ncrec
