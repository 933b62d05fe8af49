// Acceptance suite: each numbered check prints exactly one PASS/FAIL line.
// The CLI path comes in as argv[1]; subcommand-level checks shell out to it.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ocsyn/competitors.hpp"
#include "ocsyn/dp.hpp"
#include "ocsyn/pmp.hpp"
#include "ocsyn/serialize.hpp"
#include "ocsyn/synthesis.hpp"
#include "test_support.hpp"

namespace {

using ocsyn::CaseLabel;
using ocsyn::Params;
using ocsyn::ProblemKind;
using ocsyn_test::fixture_params;
using ocsyn_test::run_cli;
using Clock = std::chrono::steady_clock;

constexpr double kLn2 = 0.6931471805599453;

int failures = 0;

void report(int number, bool pass, const std::string& description,
            const std::string& note = "") {
  std::printf("%s criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", number,
              description.c_str(), note.empty() ? "" : " -- ", note.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::vector<Params> fixture_grid(ProblemKind kind) {
  std::vector<Params> grid;
  for (double a : {1.5, 2.0, 4.0})
    for (double T : {0.5, 1.0, 2.0})
      for (double x0 : {-1.0, 0.0, 0.5})
        grid.push_back(fixture_params(kind, 1.0, a, 0.0, T, x0));
  return grid;
}

void criterion1_landmarks() {
  const Params params = fixture_params(ProblemKind::FP2, 1.0, 2.0, 0.0, 2.0, 0.0);
  ocsyn::Landmarks lm = ocsyn::landmarks(params);  // warm the code path
  double elapsed_ms = 1e9;
  for (int rep = 0; rep < 5; ++rep) {
    const auto start = Clock::now();
    lm = ocsyn::landmarks(params);
    const auto stop = Clock::now();
    elapsed_ms = std::min(
        elapsed_ms,
        std::chrono::duration<double, std::milli>(stop - start).count());
  }
  const bool values_ok = std::abs(lm.rho - kLn2) <= 1e-12 &&
                         std::abs(lm.tbar - (2.0 - kLn2)) <= 1e-12 &&
                         lm.alpha1 && *lm.alpha1 == 0.5 && lm.xbar0 &&
                         std::abs(*lm.xbar0 - (2.0 * kLn2 - 3.0)) <= 1e-12;
  std::ostringstream note;
  note << "rho=" << lm.rho << " tbar=" << lm.tbar << " alpha1=" << *lm.alpha1
       << " xbar0=" << *lm.xbar0 << " time=" << elapsed_ms << " ms";
  report(1, values_ok && elapsed_ms < 1.0,
         "landmark reproduction at (1, 2, 0, 2, 0) within 1e-12 in < 1 ms",
         note.str());
}

struct DpRun {
  Params params;
  CaseLabel label;
  double analytic = 0.0;
  double dp = 0.0;
  ocsyn::Process extracted;
};

std::vector<DpRun> run_grid_dp(ProblemKind kind) {
  std::vector<DpRun> runs;
  for (const Params& params : fixture_grid(kind)) {
    DpRun run;
    run.params = params;
    const auto synthesis = ocsyn::synthesize(params);
    run.label = synthesis.label;
    run.analytic = synthesis.cost;
    auto result = ocsyn::solve_dp(params, ocsyn::DpConfig::cover(params, 2000, 4001));
    run.dp = result.cost;
    run.extracted = std::move(result.process);
    runs.push_back(std::move(run));
  }
  return runs;
}

std::vector<DpRun> criterion2_fp1_two_sided() {
  const auto start = Clock::now();
  auto runs = run_grid_dp(ProblemKind::FP1);
  const double seconds =
      std::chrono::duration<double>(Clock::now() - start).count();
  double worst = 0.0;
  for (const auto& run : runs) {
    worst = std::max(worst, std::abs(run.dp - run.analytic));
  }
  std::ostringstream note;
  note << "27 fixtures, max |dp - analytic| = " << worst << ", " << seconds
       << " s";
  report(2, worst <= 1e-2 && seconds < 60.0,
         "two-sided dp cross-validation of the unconstrained synthesis "
         "(nt = 2000, nx = 4001, tol 1e-2, < 60 s)",
         note.str());
  return runs;
}

std::vector<DpRun> criterion3_fp2_interior_two_sided() {
  const auto start = Clock::now();
  auto runs = run_grid_dp(ProblemKind::FP2);
  const double seconds =
      std::chrono::duration<double>(Clock::now() - start).count();
  double worst = 0.0;
  int counted = 0;
  for (const auto& run : runs) {
    if (run.label != CaseLabel::FP2_a && run.label != CaseLabel::FP2_b) continue;
    ++counted;
    worst = std::max(worst, std::abs(run.dp - run.analytic));
  }
  std::ostringstream note;
  note << counted << " interior fixtures, max |dp - analytic| = " << worst
       << ", " << seconds << " s (all 27 dp runs)";
  report(3, worst <= 1e-2 && seconds < 60.0,
         "two-sided dp cross-validation of the constrained synthesis, "
         "cases a and b",
         note.str());
  return runs;
}

void criterion4_touch_case(const std::vector<DpRun>& fp2_runs,
                           const std::string& cli) {
  double worst_one_sided = -1e300;
  int touch_count = 0;
  bool compete_fields_ok = true;
  double min_gap = 1e300, max_gap = -1e300;
  for (const auto& run : fp2_runs) {
    if (run.label != CaseLabel::FP2_c) continue;
    ++touch_count;
    worst_one_sided = std::max(worst_one_sided, run.dp - run.analytic);

    std::ostringstream args;
    args << "compete --kind fp2 --lambda " << run.params.lambda << " --a "
         << run.params.a << " --t0 " << run.params.t0 << " --T "
         << run.params.T << " --x0 " << run.params.x0;
    const auto out = run_cli(cli, args.str());
    if (out.exit_code != 0) {
      compete_fields_ok = false;
      continue;
    }
    const auto doc = nlohmann::json::parse(out.stdout_text, nullptr, false);
    if (doc.is_discarded() || !doc.contains("ud_at_alpha1") ||
        !doc["ud_at_alpha1"].is_number() || !doc["ubd_min"].is_number() ||
        !doc["boundary_gap"].is_number()) {
      compete_fields_ok = false;
      continue;
    }
    const double gap = doc["boundary_gap"].get<double>();
    min_gap = std::min(min_gap, gap);
    max_gap = std::max(max_gap, gap);
  }
  std::ostringstream note;
  note << touch_count << " touch fixtures, max (dp - analytic) = "
       << worst_one_sided << "; open finding: boundary gap ubd_min - "
       << "ud(alpha1) ranges [" << min_gap << ", " << max_gap
       << "] (sign recorded, not asserted)";
  report(4,
         touch_count > 0 && worst_one_sided <= 1e-2 && compete_fields_ok,
         "one-sided dp bound for the touch case plus compete report",
         note.str());
}

void criterion5_certification() {
  bool ok = true;
  std::ostringstream note;
  for (const Params& params :
       {fixture_params(ProblemKind::FP1, 1.0, 2.0, 0.0, 0.5, 0.5),
        fixture_params(ProblemKind::FP1, 1.0, 2.0, 0.0, 1.0, 0.0),
        fixture_params(ProblemKind::FP2, 1.0, 2.0, 0.0, 0.5, 0.5),
        fixture_params(ProblemKind::FP2, 1.0, 2.0, 0.0, 1.0, 0.0)}) {
    const auto synthesis = ocsyn::synthesize(params);
    const auto build = ocsyn::build_certificate(params, synthesis, 1e-9, 10001);
    const auto rep = ocsyn::certify(synthesis.process, build.certificate, 1e-9, 10001);
    if (!rep.pass || rep.max_residual() > 1e-9) ok = false;
    note << ocsyn::to_string(synthesis.label) << "=" << rep.max_residual() << " ";
  }

  const Params fp1 = fixture_params(ProblemKind::FP1, 1.0, 2.0, 0.0, 1.0, 0.0);
  const auto synthesis = ocsyn::synthesize(fp1);
  ocsyn::Certificate zero;
  zero.adjoint.p1_segments.push_back({fp1.t0, fp1.T, 0.0, 0.0});
  const auto zero_report = ocsyn::certify(synthesis.process, zero, 1e-9, 10001);
  if (zero_report.nontrivial || zero_report.pass) ok = false;

  const double tbar = synthesis.landmarks.tbar;
  const auto flipped = ocsyn::make_process(
      fp1, ocsyn::Control{{fp1.t0, tbar / 2.0, tbar, fp1.T}, {-1.0, 1.0, 1.0}});
  const auto cert = ocsyn::build_certificate(fp1, synthesis, 1e-9, 10001).certificate;
  const auto flip_report = ocsyn::certify(flipped, cert, 1e-9, 10001);
  if (flip_report.res_maximum <= 1e-3) ok = false;
  note << "zero.nontrivial=" << zero_report.nontrivial
       << " flipped.res_maximum=" << flip_report.res_maximum;

  report(5, ok,
         "built certificates pass at 1e-9 over 10001 samples; the zero "
         "certificate and a flipped control are rejected",
         note.str());
}

void criterion6_case_boundaries() {
  double worst = 0.0;

  // Horizon boundary: T - t0 = rho, descent versus degenerate up-down.
  Params horizon = fixture_params(ProblemKind::FP2, 1.0, 2.0, 0.25, 1.0, -0.5);
  horizon.T = horizon.t0 + ocsyn::landmarks(horizon).rho;
  const auto lm_h = ocsyn::landmarks(horizon);
  const auto descent = ocsyn::synthesize(horizon).process;
  const auto up_down = ocsyn::make_process(
      horizon,
      lm_h.tbar > horizon.t0
          ? ocsyn::Control{{horizon.t0, lm_h.tbar, horizon.T}, {-1.0, 1.0}}
          : ocsyn::Control{{horizon.t0, horizon.T}, {1.0}});
  for (int i = 0; i <= 1000; ++i) {
    const double t = horizon.t0 + horizon.horizon() * i / 1000;
    worst = std::max(worst, std::abs(descent.trajectory.value_at(t) -
                                     up_down.trajectory.value_at(t)));
  }

  // Initial-state boundary: x0 = xbar0, grazing touch versus interior peak.
  Params graze = fixture_params(ProblemKind::FP2, 1.0, 2.0, 0.0, 2.0, 0.0);
  graze.x0 = *ocsyn::landmarks(graze).xbar0;
  const auto lm_g = ocsyn::landmarks(graze);
  const auto touching = ocsyn::synthesize(graze).process;
  const auto interior = ocsyn::make_process(
      graze, ocsyn::Control{{graze.t0, lm_g.tbar, graze.T}, {-1.0, 1.0}});
  for (int i = 0; i <= 1000; ++i) {
    const double t = graze.t0 + graze.horizon() * i / 1000;
    worst = std::max(worst, std::abs(touching.trajectory.value_at(t) -
                                     interior.trajectory.value_at(t)));
  }

  std::ostringstream note;
  note << "max pointwise gap = " << worst;
  report(6, worst <= 1e-12,
         "adjacent-case trajectories coincide at both case boundaries "
         "(1001 samples, 1e-12)",
         note.str());
}

void criterion7_exact_identities() {
  std::mt19937 rng(20240817);
  bool ok = true;
  double worst_mayer = 0.0, worst_split = 0.0;
  std::uniform_real_distribution<double> unit(0.15, 0.85);
  for (int trial = 0; trial < 100; ++trial) {
    const auto process = ocsyn_test::random_process(
        rng, trial % 2 == 0 ? ProblemKind::FP1 : ProblemKind::FP2);
    const double total = ocsyn::cost(process);
    const double terminal = ocsyn::augment_mayer(process).values.back();
    worst_mayer = std::max(
        worst_mayer, std::abs(total - terminal) / std::max(1.0, std::abs(total)));

    // Splitting restarts the tail problem from the split-point state, which
    // must stay a valid initial state; free-state draws keep that true for
    // arbitrary arcs.
    if (process.params.kind == ProblemKind::FP1) {
      const double tau = process.params.t0 + unit(rng) * process.params.horizon();
      const double left =
          ocsyn::cost(ocsyn_test::clip_process(process, process.params.t0, tau));
      const double right =
          ocsyn::cost(ocsyn_test::clip_process(process, tau, process.params.T));
      worst_split = std::max(worst_split, std::abs(left + right - total));
    }
  }
  ok = worst_mayer <= 1e-12 && worst_split <= 1e-12;

  // Positive homogeneity of the certificate verdicts.
  const Params params = fixture_params(ProblemKind::FP1, 1.0, 2.0, 0.0, 1.0, 0.0);
  const auto synthesis = ocsyn::synthesize(params);
  auto cert = ocsyn::build_certificate(params, synthesis).certificate;
  const bool base_pass = ocsyn::certify(synthesis.process, cert).pass;
  for (double factor : {0.5, 2.0, 10.0}) {
    ocsyn::Certificate scaled = cert;
    scaled.gamma *= factor;
    scaled.adjoint.p2 *= factor;
    for (auto& seg : scaled.adjoint.p1_segments) {
      seg.coeff_exp *= factor;
      seg.coeff_const *= factor;
    }
    if (ocsyn::certify(synthesis.process, scaled).pass != base_pass) ok = false;
  }

  std::ostringstream note;
  note << "mayer rel = " << worst_mayer << ", split = " << worst_split
       << ", homogeneity verdicts stable";
  report(7, ok,
         "cost equals the terminal running cost, splits add up (1e-12), and "
         "certificate verdicts are scale-invariant",
         note.str());
}

void criterion8_structure(const std::vector<DpRun>& fp1_runs,
                          const std::vector<DpRun>& fp2_runs) {
  bool ok = true;
  for (const auto& runs : {&fp1_runs, &fp2_runs}) {
    for (const auto& run : *runs) {
      const auto synthesis = ocsyn::synthesize(run.params);
      if (ocsyn::extract_structure(synthesis.process, 1e-9).max_turning_points > 1) {
        ok = false;
      }
    }
  }
  int worst = 0;
  for (const auto& run : fp1_runs) {
    const auto rep =
        ocsyn::extract_structure(run.extracted, 0.1 * run.params.a);
    worst = std::max(worst, rep.max_turning_points);
  }
  std::ostringstream note;
  note << "max turning points on dp-extracted arcs = " << worst;
  report(8, ok && worst <= 1,
         "at most one turning point on synthesized and dp-extracted arcs",
         note.str());
}

void criterion9_preflight(const std::string& cli) {
  bool ok = true;
  double worst_ratio = 0.0;
  for (ProblemKind kind : {ProblemKind::FP1, ProblemKind::FP2}) {
    for (const Params& params : fixture_grid(kind)) {
      const auto rep = ocsyn::preflight_existence(params, 10001);
      if (!rep.pass || rep.max_growth_ratio > params.a + 1.0 + 1e-12) ok = false;
      worst_ratio = std::max(worst_ratio, rep.max_growth_ratio - params.a - 1.0);
    }
  }
  const int gain_below_rate =
      run_cli(cli, "preflight --kind fp1 --lambda 2 --a 1 --t0 0 --T 1 --x0 0")
          .exit_code;
  const int empty_horizon =
      run_cli(cli, "preflight --kind fp1 --lambda 1 --a 2 --t0 1 --T 1 --x0 0")
          .exit_code;
  const int saturated =
      run_cli(cli, "preflight --kind fp2 --lambda 1 --a 2 --t0 0 --T 1 --x0 1.5")
          .exit_code;
  if (gain_below_rate != 3 || empty_horizon != 3 || saturated != 3) ok = false;
  std::ostringstream note;
  note << "invalid-parameter exits = (" << gain_below_rate << ", "
       << empty_horizon << ", " << saturated << "), max ratio slack = "
       << worst_ratio;
  report(9, ok,
         "existence preflight passes on valid fixtures, exits 3 on invalid "
         "parameters, growth ratio within a + 1",
         note.str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <path-to-cli>\n");
    return 2;
  }
  const std::string cli = argv[1];

  criterion1_landmarks();
  const auto fp1_runs = criterion2_fp1_two_sided();
  const auto fp2_runs = criterion3_fp2_interior_two_sided();
  criterion4_touch_case(fp2_runs, cli);
  criterion5_certification();
  criterion6_case_boundaries();
  criterion7_exact_identities();
  criterion8_structure(fp1_runs, fp2_runs);
  criterion9_preflight(cli);

  std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "OK" : "FAILED",
              failures);
  return failures == 0 ? 0 : 1;
}
