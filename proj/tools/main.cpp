// ncrec command-line tool: verification runs, geodesic flow integration,
// canonical transforms, and parameter-grid scans over the deformed Minkowski
// phase space.
//
// Exit codes: 0 all asserted checks pass, 1 asserted check failed,
// 2 configuration/usage error, 3 domain violation.

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ncrec/commands.hpp"
#include "ncrec/config.hpp"

namespace {

using namespace ncrec;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidValue, "cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::array<double, 4> parse_vec4(const std::string& text, const char* what) {
  std::array<double, 4> v{};
  std::size_t pos = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    double out = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
      throw Error(ErrorKind::SyntaxError, std::string(what) + ": bad component '" + tok + "'");
    v[i] = out;
    if (i < 3) {
      if (comma == std::string::npos)
        throw Error(ErrorKind::SyntaxError, std::string(what) + ": expected 4 comma-separated values");
      pos = comma + 1;
    } else if (comma != std::string::npos) {
      throw Error(ErrorKind::SyntaxError, std::string(what) + ": expected exactly 4 values");
    }
  }
  return v;
}

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<long> points;
  std::optional<int> lmax;
  std::string out_path;
};

RunConfig load_config(const CommonFlags& flags) {
  RunConfig cfg = flags.config_path.empty() ? parse_config("") : parse_config(read_file(flags.config_path));
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.points) {
    if (*flags.points < 1) throw Error(ErrorKind::InvalidValue, "--points must be >= 1");
    cfg.points = *flags.points;
  }
  if (flags.lmax) {
    if (*flags.lmax < 1 || *flags.lmax > 8)
      throw Error(ErrorKind::InvalidValue, "--lmax must be in 1..8");
    cfg.lmax = *flags.lmax;
  }
  return cfg;
}

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "configuration file");
  cmd->add_option("--seed", flags.seed, "sampling seed");
  cmd->add_option("--points", flags.points, "number of sample points");
  cmd->add_option("--lmax", flags.lmax, "highest trace power (1..8)");
  cmd->add_option("--out", flags.out_path, "output file path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deformed Minkowski phase-space verification toolkit"};
  app.require_subcommand(1);

  CommonFlags verify_flags, flow_flags, transform_flags, scan_flags;
  std::string flow_q, flow_p, tr_q, tr_p, method_override, t_end_override, dt_override;
  bool inverse = false;
  long max_cells = kDefaultMaxCells;

  CLI::App* verify = app.add_subcommand("verify", "run the identity-check battery");
  add_common(verify, verify_flags);

  CLI::App* flow = app.add_subcommand("flow", "integrate the geodesic flow");
  add_common(flow, flow_flags);
  flow->add_option("--q", flow_q, "initial coordinates a,b,c,d")->required();
  flow->add_option("--p", flow_p, "initial momenta a,b,c,d")->required();
  flow->add_option("--method", method_override, "adaptive-rk | implicit-midpoint");
  flow->add_option("--t-end", t_end_override, "integration horizon");
  flow->add_option("--dt", dt_override, "fixed step (midpoint) / initial step (adaptive)");

  CLI::App* transform = app.add_subcommand("transform", "map a point between charts");
  add_common(transform, transform_flags);
  transform->add_option("--q", tr_q, "coordinates a,b,c,d (Q1..Q4 with --inverse)")->required();
  transform->add_option("--p", tr_p, "momenta a,b,c,d (P1..P4 with --inverse)")->required();
  transform->add_flag("--inverse", inverse, "map (P,Q) back to (q,p)");

  CLI::App* scan = app.add_subcommand("scan", "sweep the deformation-parameter grid");
  add_common(scan, scan_flags);
  scan->add_option("--max-cells", max_cells, "grid-cell cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (verify->parsed()) {
      const RunConfig cfg = load_config(verify_flags);
      const VerifyOutcome out = run_verify(cfg);
      const std::string path =
          verify_flags.out_path.empty() ? "verify_report.json" : verify_flags.out_path;
      atomic_write_file(path, out.report_json);
      std::fputs(out.summary.c_str(), stdout);
      return out.exit_code;
    }
    if (flow->parsed()) {
      RunConfig cfg = load_config(flow_flags);
      if (!method_override.empty())
        cfg.flow.method = detail::parse_method(method_override, 0);
      if (!t_end_override.empty()) cfg.flow.t_end = detail::parse_float(t_end_override, 0);
      if (!dt_override.empty()) cfg.flow.dt = detail::parse_float(dt_override, 0);
      cfg.flow.validate();
      const PhasePoint x0{parse_vec4(flow_q, "--q"), parse_vec4(flow_p, "--p")};
      const FlowOutcome out = run_flow(cfg, x0);
      const std::string path = flow_flags.out_path.empty() ? "flow.csv" : flow_flags.out_path;
      atomic_write_file(path, out.csv);
      std::fputs(out.summary.c_str(), stdout);
      return out.exit_code;
    }
    if (transform->parsed()) {
      const RunConfig cfg = load_config(transform_flags);
      const TransformOutcome out =
          run_transform(cfg, parse_vec4(tr_q, "--q"), parse_vec4(tr_p, "--p"), inverse);
      std::fputs(out.text.c_str(), stdout);
      return out.exit_code;
    }
    if (scan->parsed()) {
      const RunConfig cfg = load_config(scan_flags);
      const std::string csv = run_scan(cfg, max_cells);
      const std::string path = scan_flags.out_path.empty() ? "scan.csv" : scan_flags.out_path;
      atomic_write_file(path, csv);
      std::printf("scan written to %s\n", path.c_str());
      return kExitPass;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.kind()) {
      case ErrorKind::DomainError:
      case ErrorKind::NonpositiveP1:
      case ErrorKind::DivisionByZero:
        return kExitDomain;
      default:
        return kExitUsage;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
