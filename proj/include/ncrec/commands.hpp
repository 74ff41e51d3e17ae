// Command implementations behind the CLI: verification runs with JSON report
// emission, flow runs with CSV time series, point transforms, and the
// parameter-grid scan.  Everything returns strings/exit codes so outputs stay
// byte-reproducible and testable in-process.
//
// Exit codes: 0 all asserted checks pass, 1 at least one asserted check
// failed, 2 configuration/usage error, 3 domain violation.
#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "ncrec/config.hpp"
#include "ncrec/flow.hpp"
#include "ncrec/io.hpp"
#include "ncrec/recursion.hpp"
#include "ncrec/report.hpp"

namespace ncrec {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDomain = 3;

// -- verify -----------------------------------------------------------------

struct VerifyOutcome {
  VerificationReport report;
  std::string report_json;
  std::string summary;
  int exit_code = kExitPass;
};

// Number of sampled initial conditions used for the drift checks.
inline constexpr int kDriftTrajectories = 3;

inline VerifyOutcome run_verify(const RunConfig& cfg) {
  VerifyOutcome out;
  out.report = verify_recursion(cfg.params, cfg.seed, cfg.points, cfg.tol, cfg.lmax);
  const bool commutative = cfg.params.is_commutative();

  // Conservation drift along the integrated flow, one check per invariant.
  std::array<ResidualMax, 5> drift_acc;
  for (int k = 0; k < kDriftTrajectories; ++k) {
    const PhasePoint x0 = sample_point(cfg.seed, static_cast<std::uint64_t>(k));
    const Trajectory traj = integrate(x0, cfg.params, cfg.flow);
    const DriftReport dr = drift_report(traj);
    for (std::size_t i = 0; i < 5; ++i) drift_acc[i].record(dr.max_rel_drift[i], to_point8(x0));
  }
  for (std::size_t i = 0; i < 5; ++i) {
    CheckResult& c =
        out.report.add(std::string("drift_") + DriftReport::names[i], cfg.drift_tol, commutative);
    drift_acc[i].finish(c);
  }

  out.report_json = to_json(out.report).dump(2) + "\n";

  std::string s;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-32s %13s %13s %7s %s\n", "check", "residual", "tolerance",
                "points", "result");
  s += buf;
  for (const CheckResult& c : out.report.checks) {
    std::snprintf(buf, sizeof(buf), "%-32s %13.6e %13.6e %7ld %s%s\n", c.name.c_str(), c.residual,
                  c.tolerance, c.points_used, c.pass ? "pass" : "FAIL",
                  c.asserted ? "" : " (exploratory)");
    s += buf;
  }
  s += std::string("verdict: ") + (out.report.verdict() ? "pass" : "fail") + "\n";
  out.summary = s;
  out.exit_code = out.report.verdict() ? kExitPass : kExitCheckFailed;
  return out;
}

// -- flow ---------------------------------------------------------------------

struct FlowOutcome {
  Trajectory trajectory;
  DriftReport drift;
  std::string csv;
  std::string summary;
  int exit_code = kExitPass;
};

inline FlowOutcome run_flow(const RunConfig& cfg, const PhasePoint& x0) {
  FlowOutcome out;
  out.trajectory = integrate(x0, cfg.params, cfg.flow);
  out.drift = drift_report(out.trajectory);

  std::string csv = "t,q1,q2,q3,q4,p1,p2,p3,p4,H,c1,c2,c3,c4\n";
  for (std::size_t s = 0; s < out.trajectory.size(); ++s) {
    csv += format_double(out.trajectory.t[s]);
    const Point8 x = to_point8(out.trajectory.x[s]);
    for (double v : x) csv += "," + format_double(v);
    for (double v : out.drift.rows[s]) csv += "," + format_double(v);
    csv += "\n";
  }
  if (out.trajectory.domain_exit) {
    csv += "# DomainExit at t=" + format_double(out.trajectory.t.back()) + "\n";
    out.exit_code = kExitDomain;
  }
  out.csv = csv;

  std::string s;
  char buf[96];
  for (std::size_t i = 0; i < 5; ++i) {
    std::snprintf(buf, sizeof(buf), "drift %-2s = %.6e\n", DriftReport::names[i],
                  out.drift.max_rel_drift[i]);
    s += buf;
  }
  if (out.trajectory.domain_exit) s += "domain exit: p1 <= 0 reached, integration stopped\n";
  out.summary = s;
  return out;
}

// -- transform -----------------------------------------------------------------

struct TransformOutcome {
  std::string text;
  int exit_code = kExitPass;
};

inline TransformOutcome run_transform(const RunConfig& cfg, const std::array<double, 4>& qin,
                                      const std::array<double, 4>& pin, bool inverse) {
  TransformOutcome out;
  const auto join = [](const std::array<double, 4>& v) {
    std::string s = format_sig17(v[0]);
    for (std::size_t i = 1; i < 4; ++i) s += "," + format_sig17(v[i]);
    return s;
  };
  if (!inverse) {
    const CanonicalPoint y = to_canonical(PhasePoint{qin, pin}, cfg.params);
    out.text = "P = " + join(y.P) + "\nQ = " + join(y.Q) + "\n";
  } else {
    // Inverse direction: --q carries Q, --p carries P.
    const PhasePoint x = from_canonical(CanonicalPoint{pin, qin}, cfg.params);
    out.text = "q = " + join(x.q) + "\np = " + join(x.p) + "\n";
  }
  return out;
}

// -- scan ------------------------------------------------------------------------

inline constexpr long kDefaultMaxCells = 10000;

// Sweeps the six deformation entries over 5 values each and measures, per
// cell: theta, the block-structure residual, the torsion of the patterned
// block operator at a few sampled points, and the worst conservation drift
// over a short midpoint trajectory.
inline std::string run_scan(const RunConfig& cfg, long max_cells) {
  constexpr std::array<double, 5> grid{-0.5, -0.25, 0.0, 0.25, 0.5};
  const long cells = 5L * 5 * 5 * 5 * 5 * 5;
  if (cells > max_cells)
    throw Error(ErrorKind::InvalidValue,
                "grid has " + std::to_string(cells) + " cells, above the cap of " +
                    std::to_string(max_cells) + "; raise --max-cells");

  std::string csv =
      "lambda23,lambda24,lambda34,alpha23,alpha24,alpha34,"
      "theta2,theta3,theta4,cond2_residual,max_torsion_original,max_drift\n";

  IntegratorConfig probe;
  probe.method = IntegratorMethod::implicit_midpoint;
  probe.t_end = 1.0;
  probe.dt = 1e-2;

  constexpr int kTorsionPoints = 4;
  for (double l23 : grid)
    for (double l24 : grid)
      for (double l34 : grid)
        for (double a23 : grid)
          for (double a24 : grid)
            for (double a34 : grid) {
              const DeformationParams params = validate_params(
                  {{2, 3, l23}, {2, 4, l24}, {3, 4, l34}},
                  {{2, 3, a23}, {2, 4, a24}, {3, 4, a34}});
              const ThetaVector th = theta(params);
              const Cond2Result c2 = condition2_check(params);

              double torsion = 0.0;
              const BlockRecursionField field{params, BlockForm::patterned};
              for (int i = 0; i < kTorsionPoints; ++i) {
                const Point8 x = to_point8(sample_point(cfg.seed, static_cast<std::uint64_t>(i)));
                try {
                  torsion = std::max(torsion, nijenhuis(field, x).max_abs());
                } catch (const Error&) {
                  // p_k too close to zero for the block divisions; skip point.
                }
              }

              double drift = 0.0;
              const Trajectory traj = integrate(sample_point(cfg.seed, 0), params, probe);
              const DriftReport dr = drift_report(traj);
              for (double d : dr.max_rel_drift) drift = std::max(drift, d);

              csv += format_double(l23) + "," + format_double(l24) + "," + format_double(l34) +
                     "," + format_double(a23) + "," + format_double(a24) + "," +
                     format_double(a34) + "," + format_double(th.theta[1]) + "," +
                     format_double(th.theta[2]) + "," + format_double(th.theta[3]) + "," +
                     format_double(c2.residual) + "," + format_double(torsion) + "," +
                     format_double(drift) + "\n";
            }
  return csv;
}

}  // namespace ncrec
