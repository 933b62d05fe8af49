// Command-line front end: closed-form synthesis, first-order certification,
// dynamic-programming cross-checks, competitor comparisons, existence
// preflight, and deterministic parameter sweeps.
//
// Exit codes: 0 success/pass, 1 certification or invariant failure (and I/O
// errors), 2 usage error, 3 invalid parameters.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ocsyn/competitors.hpp"
#include "ocsyn/dp.hpp"
#include "ocsyn/params.hpp"
#include "ocsyn/pmp.hpp"
#include "ocsyn/process.hpp"
#include "ocsyn/serialize.hpp"
#include "ocsyn/synthesis.hpp"
#include "ocsyn/version.hpp"

namespace {

struct CommonOptions {
  std::string kind = "fp1";
  double lambda = 1.0;
  double a = 2.0;
  double t0 = 0.0;
  double T = 1.0;
  double x0 = 0.0;
  std::string out;
  std::string format = "json";
  int nt = 2000;
  int nx = 4001;
  double tol = ocsyn::kResidualTolerance;
  int samples = 10001;
  double step = 1e-3;
  std::optional<double> x_min;
  std::optional<double> x_max;
  std::string in;
  std::string grid_out;
  bool with_dp = false;
  bool with_cert = false;
  std::vector<std::string> ranges;

  ocsyn::Params params() const {
    ocsyn::Params p;
    p.kind = ocsyn::problem_kind_from_string(kind);
    p.lambda = lambda;
    p.a = a;
    p.t0 = t0;
    p.T = T;
    p.x0 = x0;
    return p;
  }
};

void add_param_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--kind", opt.kind, "problem kind: fp1 | fp2")
      ->check(CLI::IsMember({"fp1", "fp2"}));
  cmd->add_option("--lambda", opt.lambda, "discount rate (> 0)");
  cmd->add_option("--a", opt.a, "control gain (> lambda)");
  cmd->add_option("--t0", opt.t0, "initial time (>= 0)");
  cmd->add_option("--T", opt.T, "terminal time (> t0)");
  cmd->add_option("--x0", opt.x0, "initial state (<= 1 for fp2)");
}

void add_output_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--out", opt.out, "output path (default: stdout)");
  cmd->add_option("--format", opt.format, "output format: json | csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

void write_document(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output path: " + path);
  out << text << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

int run_synth(const CommonOptions& opt) {
  if (opt.format != "json") {
    std::cerr << "synth emits json only\n";
    return 2;
  }
  const ocsyn::SynthesisResult result = ocsyn::synthesize(opt.params());
  write_document(opt.out, ocsyn::to_json(result));
  return 0;
}

int run_certify(const CommonOptions& opt) {
  if (opt.format != "json") {
    std::cerr << "certify emits json only\n";
    return 2;
  }
  ocsyn::Process process;
  if (!opt.in.empty()) {
    std::ifstream in(opt.in);
    if (!in) throw std::runtime_error("cannot open input path: " + opt.in);
    nlohmann::json doc;
    in >> doc;
    process = ocsyn::process_from_json(doc);
  } else {
    process = ocsyn::synthesize(opt.params()).process;
  }
  const ocsyn::SynthesisResult synthesis = ocsyn::synthesize(process.params);
  const ocsyn::CertificateBuild build = ocsyn::build_certificate(
      process.params, synthesis, opt.tol, opt.samples);
  const ocsyn::CertifyReport report =
      ocsyn::certify(process, build.certificate, opt.tol, opt.samples);
  write_document(opt.out, ocsyn::to_json(synthesis.label, ocsyn::cost(process),
                                         build, report));
  return report.pass ? 0 : 1;
}

int run_dp(const CommonOptions& opt) {
  const ocsyn::Params params = opt.params();
  ocsyn::DpConfig config = ocsyn::DpConfig::cover(params, opt.nt, opt.nx);
  if (opt.x_min) config.x_min = *opt.x_min;
  if (opt.x_max) config.x_max = *opt.x_max;
  const bool want_grid = opt.format == "csv" || !opt.grid_out.empty();
  config.keep_value_grid = want_grid;
  const ocsyn::DpResult result = ocsyn::solve_dp(params, config);
  const double analytic = ocsyn::synthesize(params).cost;

  if (want_grid) {
    std::ostringstream grid;
    ocsyn::write_value_grid_csv(grid, params, result);
    const std::string& grid_path = opt.grid_out.empty() ? opt.out : opt.grid_out;
    if (grid_path.empty()) {
      std::cout << grid.str();
    } else {
      std::ofstream out(grid_path);
      if (!out) throw std::runtime_error("cannot open output path: " + grid_path);
      out << grid.str();
    }
    if (opt.format == "csv") return 0;
  }
  write_document(opt.out, ocsyn::to_json(result, analytic));
  return 0;
}

int run_compete(const CommonOptions& opt) {
  if (opt.format != "json") {
    std::cerr << "compete emits json only\n";
    return 2;
  }
  const ocsyn::CompetitorResult result =
      ocsyn::competitor_costs(opt.params(), opt.step);
  write_document(opt.out, ocsyn::to_json(result));
  return 0;
}

int run_preflight(const CommonOptions& opt) {
  if (opt.format != "json") {
    std::cerr << "preflight emits json only\n";
    return 2;
  }
  const ocsyn::ExistenceReport report =
      ocsyn::preflight_existence(opt.params(), opt.samples);
  write_document(opt.out, ocsyn::to_json(report));
  if (!report.params_ok) return 3;
  return report.pass ? 0 : 1;
}

// ---- sweep ---------------------------------------------------------------

struct AxisRange {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;

  double at(int k) const {
    if (count <= 1) return start;
    return start + (stop - start) * k / (count - 1);
  }
};

// "name=start:stop:count" -> axis index in {lambda, a, t0, T, x0} order.
void parse_range(const std::string& text, std::array<AxisRange, 5>& axes) {
  static const std::array<std::string, 5> names{"lambda", "a", "t0", "T", "x0"};
  const auto eq = text.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("range must look like name=start:stop:count");
  }
  const std::string name = text.substr(0, eq);
  const auto axis = std::find(names.begin(), names.end(), name);
  if (axis == names.end()) {
    throw std::invalid_argument("unknown sweep axis: '" + name + "'");
  }
  AxisRange range;
  char colon1 = 0, colon2 = 0;
  std::istringstream body(text.substr(eq + 1));
  body >> range.start >> colon1 >> range.stop >> colon2 >> range.count;
  if (body.fail() || colon1 != ':' || colon2 != ':' || range.count < 1) {
    throw std::invalid_argument("bad range syntax: '" + text + "'");
  }
  axes[axis - names.begin()] = range;
}

int run_sweep(const CommonOptions& opt) {
  std::array<AxisRange, 5> axes{
      AxisRange{opt.lambda, opt.lambda, 1}, AxisRange{opt.a, opt.a, 1},
      AxisRange{opt.t0, opt.t0, 1}, AxisRange{opt.T, opt.T, 1},
      AxisRange{opt.x0, opt.x0, 1}};
  for (const std::string& text : opt.ranges) parse_range(text, axes);

  std::ostringstream csv;
  csv << "# version=" << ocsyn::kVersion << '\n';
  csv << "lambda,a,t0,T,x0,kind,case,rho,tbar,alpha1,xbar0,cost_analytic,"
         "cost_dp,gap,cert_residual,status\n";

  const auto cell = [](const std::optional<double>& x) {
    return x ? ocsyn::format_number(*x) : std::string();
  };

  // Lexicographic by grid indices in canonical axis order, independent of
  // the order the ranges were given in.
  for (int i0 = 0; i0 < axes[0].count; ++i0)
    for (int i1 = 0; i1 < axes[1].count; ++i1)
      for (int i2 = 0; i2 < axes[2].count; ++i2)
        for (int i3 = 0; i3 < axes[3].count; ++i3)
          for (int i4 = 0; i4 < axes[4].count; ++i4) {
            ocsyn::Params params;
            params.kind = ocsyn::problem_kind_from_string(opt.kind);
            params.lambda = axes[0].at(i0);
            params.a = axes[1].at(i1);
            params.t0 = axes[2].at(i2);
            params.T = axes[3].at(i3);
            params.x0 = axes[4].at(i4);

            csv << ocsyn::format_number(params.lambda) << ','
                << ocsyn::format_number(params.a) << ','
                << ocsyn::format_number(params.t0) << ','
                << ocsyn::format_number(params.T) << ','
                << ocsyn::format_number(params.x0) << ','
                << ocsyn::to_string(params.kind) << ',';

            if (!params.valid()) {
              csv << ",,,,,,,,,invalid\n";
              continue;
            }
            const ocsyn::SynthesisResult synthesis = ocsyn::synthesize(params);
            std::optional<double> cost_dp;
            if (opt.with_dp) {
              const ocsyn::DpConfig config =
                  ocsyn::DpConfig::cover(params, opt.nt, opt.nx);
              cost_dp = ocsyn::solve_dp(params, config).cost;
            }
            std::optional<double> cert_residual;
            if (opt.with_cert) {
              cert_residual = ocsyn::build_certificate(params, synthesis,
                                                       opt.tol, opt.samples)
                                  .residual;
            }
            csv << ocsyn::to_string(synthesis.label) << ','
                << ocsyn::format_number(synthesis.landmarks.rho) << ','
                << ocsyn::format_number(synthesis.landmarks.tbar) << ','
                << cell(synthesis.landmarks.alpha1) << ','
                << cell(synthesis.landmarks.xbar0) << ','
                << ocsyn::format_number(synthesis.cost) << ','
                << cell(cost_dp) << ','
                << cell(cost_dp ? std::optional<double>(*cost_dp - synthesis.cost)
                                : std::nullopt)
                << ',' << cell(cert_residual) << ",ok\n";
          }

  if (opt.out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(opt.out);
    if (!out) throw std::runtime_error("cannot open output path: " + opt.out);
    out << csv.str();
    if (!out) throw std::runtime_error("write failed: " + opt.out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("ocsyn ") + ocsyn::kVersion +
               " - bang-bang synthesis, certification, and cross-checks for a "
               "capped linear control family"};
  app.set_version_flag("--version", std::string("ocsyn ") + ocsyn::kVersion);
  app.require_subcommand(1);

  CommonOptions opt;

  CLI::App* synth = app.add_subcommand("synth", "closed-form optimal synthesis");
  add_param_flags(synth, opt);
  add_output_flags(synth, opt);

  CLI::App* certify =
      app.add_subcommand("certify", "build and check first-order certificates");
  add_param_flags(certify, opt);
  add_output_flags(certify, opt);
  certify->add_option("--tol", opt.tol, "residual tolerance");
  certify->add_option("--samples", opt.samples, "sample times for the checks");
  certify->add_option("--in", opt.in, "certify a serialized process document");

  CLI::App* dp = app.add_subcommand("dp", "backward value-iteration cross-check");
  add_param_flags(dp, opt);
  add_output_flags(dp, opt);
  dp->add_option("--nt", opt.nt, "time steps");
  dp->add_option("--nx", opt.nx, "state nodes");
  const auto bind_optional = [](std::optional<double>& slot) {
    return [&slot](const std::vector<std::string>& v) {
      try {
        std::size_t used = 0;
        slot = std::stod(v.front(), &used);
        return used == v.front().size();
      } catch (const std::exception&) {
        return false;
      }
    };
  };
  dp->add_option("--x-min", bind_optional(opt.x_min),
                 "state grid lower bound (default: cover the reachable set)");
  dp->add_option("--x-max", bind_optional(opt.x_max), "state grid upper bound");
  dp->add_option("--grid-out", opt.grid_out, "write the value grid as CSV");

  CLI::App* compete =
      app.add_subcommand("compete", "exact costs of structured competitor families");
  add_param_flags(compete, opt);
  add_output_flags(compete, opt);
  compete->add_option("--step", opt.step, "switch-time grid step");

  CLI::App* preflight =
      app.add_subcommand("preflight", "existence conditions before solving");
  add_param_flags(preflight, opt);
  add_output_flags(preflight, opt);
  preflight->add_option("--samples", opt.samples, "growth-bound sample budget");

  CLI::App* sweep = app.add_subcommand("sweep", "deterministic parameter sweep (CSV)");
  add_param_flags(sweep, opt);
  sweep->add_option("--out", opt.out, "output path (default: stdout)");
  sweep->add_option("--range", opt.ranges,
                    "axis range name=start:stop:count (repeatable)");
  sweep->add_flag("--with-dp", opt.with_dp, "also run the dp cross-check per point");
  sweep->add_flag("--with-cert", opt.with_cert, "also certify per point");
  sweep->add_option("--nt", opt.nt, "dp time steps");
  sweep->add_option("--nx", opt.nx, "dp state nodes");
  sweep->add_option("--tol", opt.tol, "certificate tolerance");
  sweep->add_option("--samples", opt.samples, "certificate sample times");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(synth)) return run_synth(opt);
    if (app.got_subcommand(certify)) return run_certify(opt);
    if (app.got_subcommand(dp)) return run_dp(opt);
    if (app.got_subcommand(compete)) return run_compete(opt);
    if (app.got_subcommand(preflight)) return run_preflight(opt);
    if (app.got_subcommand(sweep)) return run_sweep(opt);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
