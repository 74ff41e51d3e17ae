// Structured pass/fail record of identity checks with residual magnitudes.
// Asserted checks gate the global verdict; exploratory checks are recorded
// measurements and never affect it.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ncrec/calculus.hpp"
#include "ncrec/core.hpp"

namespace ncrec {

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool asserted = true;
  bool pass = true;
  long points_used = 0;
  long points_skipped = 0;
  std::optional<Point8> worst_point;
};

struct VerificationReport {
  int schema_version = 1;
  std::uint64_t seed = 0;
  long points = 0;
  DeformationParams params;
  ThetaVector th;
  std::vector<CheckResult> checks;

  CheckResult& add(const std::string& name, double tolerance, bool asserted) {
    checks.emplace_back();
    CheckResult& c = checks.back();
    c.name = name;
    c.tolerance = tolerance;
    c.asserted = asserted;
    return c;
  }

  const CheckResult* find(const std::string& name) const {
    for (const CheckResult& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  bool verdict() const {
    for (const CheckResult& c : checks)
      if (c.asserted && !c.pass) return false;
    return true;
  }
};

// Accumulates a max-residual over sampled points, remembering where the
// maximum occurred.
struct ResidualMax {
  double value = 0.0;
  long used = 0;
  long skipped = 0;
  std::optional<Point8> worst;

  void record(double r, const Point8& x) {
    ++used;
    if (!worst || r > value) {
      value = r;
      worst = x;
    }
  }
  void skip() { ++skipped; }

  void finish(CheckResult& c) const {
    c.residual = value;
    c.points_used = used;
    c.points_skipped = skipped;
    c.worst_point = worst;
    c.pass = value <= c.tolerance;
  }
};

inline nlohmann::ordered_json to_json(const Mat4& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < 4; ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < 4; ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline nlohmann::ordered_json to_json(const VerificationReport& rep) {
  nlohmann::ordered_json j;
  j["schema_version"] = rep.schema_version;
  j["seed"] = rep.seed;
  j["points"] = rep.points;
  j["params"] = {{"lambda", to_json(rep.params.lambda)},
                 {"alpha", to_json(rep.params.alpha)},
                 {"gamma", to_json(rep.params.gamma)},
                 {"theta", rep.th.theta}};
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const CheckResult& c : rep.checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["kind"] = c.asserted ? "asserted" : "exploratory";
    cj["residual"] = c.residual;
    cj["tolerance"] = c.tolerance;
    cj["pass"] = c.pass;
    cj["points_used"] = c.points_used;
    cj["points_skipped"] = c.points_skipped;
    if (c.worst_point)
      cj["worst_point"] = *c.worst_point;
    else
      cj["worst_point"] = nullptr;
    checks.push_back(cj);
  }
  j["checks"] = checks;
  j["verdict"] = rep.verdict() ? "pass" : "fail";
  return j;
}

}  // namespace ncrec
