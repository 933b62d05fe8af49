#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ocsyn/minimize.hpp"
#include "ocsyn/params.hpp"
#include "ocsyn/process.hpp"
#include "ocsyn/synthesis.hpp"

namespace ocsyn {

// Structured competitor families, each evaluated with the exact cost:
//   D      pure descent, u = +1 throughout;
//   UD(s)  full ascent until s, then descent (s capped so the peak respects
//          the cap for FP2);
//   UBD(s) FP2 only: ascend to the cap, ride it until s, then descend.
struct CompetitorEntry {
  std::string family;
  double parameter = 0.0;  // switch / leave time
  double cost = 0.0;
};

struct CompetitorResult {
  std::vector<CompetitorEntry> entries;  // one minimum per family
  CompetitorEntry best;
  double analytic_cost = 0.0;
  double gap_to_analytic = 0.0;  // best.cost - analytic_cost
  // Cap-contact comparison, present when the UBD family exists: the cost of
  // leaving the cap immediately versus the best boundary interval. The sign
  // of boundary_gap is reported, never asserted.
  std::optional<double> ud_at_alpha1;
  std::optional<double> ubd_min;
  std::optional<double> ubd_argmin;
  std::optional<double> boundary_gap;
};

namespace detail {

inline Process up_down_process(const Params& params, double s) {
  // Clamp the switch into the horizon; endpoints degenerate to single arcs.
  s = std::clamp(s, params.t0, params.T);
  Control control;
  if (s <= params.t0) {
    control = Control{{params.t0, params.T}, {1.0}};
  } else if (s >= params.T) {
    control = Control{{params.t0, params.T}, {-1.0}};
  } else {
    control = Control{{params.t0, s, params.T}, {-1.0, 1.0}};
  }
  return make_process(params, std::move(control));
}

inline Process ride_then_descend_process(const Params& params, double alpha1,
                                         double s) {
  s = std::clamp(s, alpha1, params.T);
  Control control;
  control.breakpoints.push_back(params.t0);
  if (alpha1 > params.t0) {
    control.values.push_back(-1.0);
    control.breakpoints.push_back(alpha1);
  }
  if (s > control.breakpoints.back()) {
    control.values.push_back(0.0);
    control.breakpoints.push_back(s);
  }
  if (params.T > control.breakpoints.back()) {
    control.values.push_back(1.0);
    control.breakpoints.push_back(params.T);
  } else {
    control.breakpoints.back() = params.T;
  }
  return make_process(params, std::move(control));
}

// Grid scan plus golden-section refinement inside the best bracket.
template <typename CostFn>
CompetitorEntry minimize_family(const std::string& family, CostFn&& family_cost,
                                double lo, double hi, double step) {
  CompetitorEntry entry;
  entry.family = family;
  if (!(hi > lo)) {
    entry.parameter = lo;
    entry.cost = family_cost(lo);
    return entry;
  }
  const int points = std::max(2, static_cast<int>(std::ceil((hi - lo) / step)) + 1);
  double best_s = lo;
  double best_cost = family_cost(lo);
  for (int k = 1; k < points; ++k) {
    const double s = k + 1 == points ? hi : lo + k * (hi - lo) / (points - 1);
    const double c = family_cost(s);
    if (c < best_cost) {
      best_cost = c;
      best_s = s;
    }
  }
  const double bracket = (hi - lo) / (points - 1);
  const double refined = golden_section_minimize(
      family_cost, std::max(lo, best_s - bracket), std::min(hi, best_s + bracket),
      1e-10 * std::max(1.0, hi - lo), 200);
  const double refined_cost = family_cost(refined);
  if (refined_cost < best_cost) {
    best_cost = refined_cost;
    best_s = refined;
  }
  entry.parameter = best_s;
  entry.cost = best_cost;
  return entry;
}

}  // namespace detail

inline CompetitorResult competitor_costs(const Params& params,
                                         double s_grid_step = 1e-3) {
  params.ensure_valid();
  if (!(s_grid_step > 0.0)) {
    throw std::invalid_argument("competitor grid step must be positive");
  }

  CompetitorResult result;
  const SynthesisResult analytic = synthesize(params);
  result.analytic_cost = analytic.cost;

  const auto ud_cost = [&](double s) {
    return cost(detail::up_down_process(params, s));
  };

  CompetitorEntry descent;
  descent.family = "D";
  descent.parameter = params.t0;
  descent.cost = ud_cost(params.t0);
  result.entries.push_back(descent);

  // FP2 caps the ascent: the peak x0 + a (s - t0) may not pass the cap.
  double s_hi = params.T;
  std::optional<double> alpha1;
  if (params.kind == ProblemKind::FP2) {
    alpha1 = params.t0 + (1.0 - params.x0) / params.a;
    s_hi = std::min(s_hi, *alpha1);
  }
  result.entries.push_back(
      detail::minimize_family("UD", ud_cost, params.t0, s_hi, s_grid_step));

  if (alpha1 && *alpha1 < params.T) {
    const auto ubd_cost = [&](double s) {
      return cost(detail::ride_then_descend_process(params, *alpha1, s));
    };
    CompetitorEntry ubd = detail::minimize_family("UBD", ubd_cost, *alpha1,
                                                  params.T, s_grid_step);
    result.entries.push_back(ubd);
    result.ud_at_alpha1 = ud_cost(*alpha1);
    result.ubd_min = ubd.cost;
    result.ubd_argmin = ubd.parameter;
    result.boundary_gap = ubd.cost - *result.ud_at_alpha1;
  }

  result.best = *std::min_element(
      result.entries.begin(), result.entries.end(),
      [](const CompetitorEntry& a, const CompetitorEntry& b) {
        return a.cost < b.cost;
      });
  result.gap_to_analytic = result.best.cost - result.analytic_cost;
  return result;
}

// Turning-point census: merge segments with nearly equal slopes, cut the
// horizon into maximal pieces where the arc stays strictly below the cap,
// and count slope-sign reversals inside each piece.
struct StructureReport {
  int max_turning_points = 0;
  int interior_interval_count = 0;
};

inline StructureReport extract_structure(const Process& process,
                                         double merge_tolerance) {
  detail::ensure_process_shape(process);
  if (!(merge_tolerance >= 0.0)) {
    throw std::invalid_argument("merge tolerance must be nonnegative");
  }

  struct Piece {
    double t_lo, t_hi, slope;
  };
  std::vector<Piece> pieces;
  const auto& bp = process.trajectory.breakpoints;
  const auto& xv = process.trajectory.values;
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    const double slope = (xv[k + 1] - xv[k]) / (bp[k + 1] - bp[k]);
    if (!pieces.empty() && std::abs(pieces.back().slope - slope) <= merge_tolerance) {
      pieces.back().t_hi = bp[k + 1];
      pieces.back().slope = (process.trajectory.value_at(pieces.back().t_hi) -
                             process.trajectory.value_at(pieces.back().t_lo)) /
                            (pieces.back().t_hi - pieces.back().t_lo);
    } else {
      pieces.push_back({bp[k], bp[k + 1], slope});
    }
  }

  // Maximal subintervals with x < 1 - tolerance, crossing points exact.
  const double threshold = 1.0 - merge_tolerance;
  std::vector<std::pair<double, double>> interior;
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    double lo = bp[k], hi = bp[k + 1];
    const double xs = xv[k], xe = xv[k + 1];
    if (xs >= threshold && xe >= threshold) continue;
    if (xs >= threshold || xe >= threshold) {
      const double cross = lo + (threshold - xs) / (xe - xs) * (hi - lo);
      if (xs >= threshold) {
        lo = cross;
      } else {
        hi = cross;
      }
    }
    if (!interior.empty() && interior.back().second >= lo) {
      interior.back().second = hi;
    } else {
      interior.emplace_back(lo, hi);
    }
  }

  StructureReport report;
  report.interior_interval_count = static_cast<int>(interior.size());
  for (const auto& [lo, hi] : interior) {
    int reversals = 0;
    int last_sign = 0;
    for (const Piece& piece : pieces) {
      if (piece.t_hi <= lo || piece.t_lo >= hi) continue;
      const int sign = piece.slope > merge_tolerance    ? 1
                       : piece.slope < -merge_tolerance ? -1
                                                        : 0;
      if (sign == 0) continue;
      if (last_sign != 0 && sign != last_sign) ++reversals;
      last_sign = sign;
    }
    report.max_turning_points = std::max(report.max_turning_points, reversals);
  }
  return report;
}

}  // namespace ocsyn
