#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ocsyn/minimize.hpp"
#include "ocsyn/params.hpp"
#include "ocsyn/process.hpp"
#include "ocsyn/synthesis.hpp"

namespace ocsyn {

// One piece of the first adjoint component:
//   p1(t) = coeff_exp * e^{-lambda t} + coeff_const   on [t_start, t_end].
// The exponential shape is exact for this family, where p1' is proportional
// to e^{-lambda t}.
struct AdjointSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  double coeff_exp = 0.0;    // serialized as "A"
  double coeff_const = 0.0;  // serialized as "B"
};

// Absolutely continuous costate (p1, p2); p2 is constant on the horizon.
struct AdjointArc {
  double p2 = 0.0;
  std::vector<AdjointSegment> p1_segments;

  const AdjointSegment& segment_at(double t) const {
    if (p1_segments.empty()) {
      throw std::invalid_argument("adjoint arc has no segments");
    }
    for (const auto& seg : p1_segments) {
      if (t <= seg.t_end) return seg;
    }
    return p1_segments.back();
  }

  double p1(double t, double lambda) const {
    const AdjointSegment& seg = segment_at(t);
    return seg.coeff_exp * std::exp(-lambda * t) + seg.coeff_const;
  }

  // Closed-form derivative of p1 (no finite differences).
  double p1_derivative(double t, double lambda) const {
    const AdjointSegment& seg = segment_at(t);
    return -lambda * seg.coeff_exp * std::exp(-lambda * t);
  }

  double sup_abs(double lambda) const {
    double sup = std::abs(p2);
    for (const auto& seg : p1_segments) {
      // |p1| on a segment peaks at an endpoint: p1 is monotone in t.
      sup = std::max(sup, std::abs(seg.coeff_exp * std::exp(-lambda * seg.t_start) +
                                   seg.coeff_const));
      sup = std::max(sup, std::abs(seg.coeff_exp * std::exp(-lambda * seg.t_end) +
                                   seg.coeff_const));
    }
    return sup;
  }
};

// Nonnegative measure attached to the state constraint, represented as
// atoms plus a piecewise-constant density. Each support element carries its
// own selection vector (the Borel selection nu), defaulting to (1, 0).
struct MeasureAtom {
  double time = 0.0;
  double weight = 0.0;
  std::array<double, 2> selection{1.0, 0.0};
};

struct DensityPiece {
  double t_start = 0.0;
  double t_end = 0.0;
  double rate = 0.0;
  std::array<double, 2> selection{1.0, 0.0};
};

struct Measure {
  std::vector<MeasureAtom> atoms;
  std::vector<DensityPiece> density_pieces;

  double mass() const {
    double total = 0.0;
    for (const auto& atom : atoms) total += atom.weight;
    for (const auto& piece : density_pieces) {
      total += piece.rate * (piece.t_end - piece.t_start);
    }
    return total;
  }
};

struct Certificate {
  double gamma = 0.0;
  AdjointArc adjoint;
  Measure measure;
};

struct CertifyReport {
  double res_support = 0.0;         // measure mass off the active set
  double res_selection = 0.0;       // deviation of nu from (1, 0) on support
  double res_adjoint = 0.0;         // adjoint equation + continuity defect
  double res_transversality = 0.0;  // max(|q1(T)|, |q2(T) + gamma|)
  double res_maximum = 0.0;         // Hamiltonian maximization defect
  bool nontrivial = false;
  bool pass = false;

  double max_residual() const {
    return std::max({res_support, res_selection, res_adjoint,
                     res_transversality, res_maximum});
  }
};

struct ExistenceReport {
  bool params_ok = false;
  bool growth_ok = false;
  bool convexity_ok = false;
  bool pass = false;
  double max_growth_ratio = 0.0;  // sampled max of ||f|| / (||x|| + 1)
};

// H(t, x, p, u) = -a u p1 - e^{-lambda t} (x1 + u) p2. Affine in u with
// slope -(a p1 + e^{-lambda t} p2).
inline double hamiltonian(double t, double x1, const std::array<double, 2>& costate,
                          double u, const Params& params) {
  return -params.a * u * costate[0] -
         std::exp(-params.lambda * t) * (x1 + u) * costate[1];
}

// Partial hybrid subdifferential of the cap constraint h(t, x) = x1 - 1:
// empty below the cap, the singleton {(1, 0)} at and above it.
inline std::vector<std::array<double, 2>> partial_hybrid_subdiff(double x1) {
  if (!std::isfinite(x1)) {
    throw std::invalid_argument("partial_hybrid_subdiff needs finite x1");
  }
  if (x1 < 1.0) return {};
  return {{1.0, 0.0}};
}

struct EtaQ {
  std::array<double, 2> eta{0.0, 0.0};
  std::array<double, 2> q{0.0, 0.0};
};

// Cumulative measure contribution eta and shifted costate q = p + eta.
// For t < T the accumulation runs over [t0, t); with at_terminal set (the
// t = T evaluation) it runs over the closed interval [t0, T], so an atom
// sitting at T enters only there.
inline EtaQ eta_and_q(const AdjointArc& adjoint, const Measure& measure,
                      double t, const Params& params, bool at_terminal) {
  const double slack = 1e-12 * std::max({1.0, std::abs(params.t0), std::abs(params.T)});
  if (t < params.t0 - slack || t > params.T + slack) {
    throw std::domain_error("eta_and_q: time outside the horizon");
  }
  EtaQ out;
  for (const auto& atom : measure.atoms) {
    const bool counted = at_terminal ? atom.time <= t : atom.time < t;
    if (counted) {
      out.eta[0] += atom.weight * atom.selection[0];
      out.eta[1] += atom.weight * atom.selection[1];
    }
  }
  for (const auto& piece : measure.density_pieces) {
    const double len = std::max(0.0, std::min(t, piece.t_end) - piece.t_start);
    out.eta[0] += piece.rate * len * piece.selection[0];
    out.eta[1] += piece.rate * len * piece.selection[1];
  }
  out.q[0] = adjoint.p1(t, params.lambda) + out.eta[0];
  out.q[1] = adjoint.p2 + out.eta[1];
  return out;
}

inline EtaQ eta_and_q(const AdjointArc& adjoint, const Measure& measure,
                      double t, const Params& params) {
  return eta_and_q(adjoint, measure, t, params, t >= params.T);
}

// Switching function a q1(t) + e^{-lambda t} q2(t): the coefficient of u in
// the minimized form of the Hamiltonian condition. Negative values force
// u = +1, positive values force u = -1.
inline double switching(const Certificate& certificate, const Params& params,
                        double t) {
  const EtaQ eq = eta_and_q(certificate.adjoint, certificate.measure, t, params);
  return params.a * eq.q[0] + std::exp(-params.lambda * t) * eq.q[1];
}

namespace detail {

// Length of {t in [lo, hi] : x(t) < threshold} for a piecewise-linear arc.
inline double time_below_threshold(const Trajectory& trajectory, double lo,
                                   double hi, double threshold) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < trajectory.breakpoints.size(); ++k) {
    const double s = std::max(lo, trajectory.breakpoints[k]);
    const double e = std::min(hi, trajectory.breakpoints[k + 1]);
    if (!(s < e)) continue;
    const double xs = trajectory.value_at(s);
    const double xe = trajectory.value_at(e);
    if (xs < threshold && xe < threshold) {
      total += e - s;
    } else if (xs < threshold || xe < threshold) {
      const double cross = s + (threshold - xs) / (xe - xs) * (e - s);
      total += xs < threshold ? cross - s : e - cross;
    }
  }
  return total;
}

inline double selection_deviation(const std::array<double, 2>& selection) {
  return std::max(std::abs(selection[0] - 1.0), std::abs(selection[1]));
}

}  // namespace detail

// Numerical check of the four first-order conditions. All residuals are
// positively homogeneous of degree one in (p, mu, gamma), so rescaling a
// certificate rescales the report without flipping clean verdicts.
inline CertifyReport certify(const Process& process, const Certificate& certificate,
                             double tolerance = kResidualTolerance,
                             int sample_count = 10001) {
  detail::ensure_process_shape(process);
  if (sample_count < 2) {
    throw std::invalid_argument("certify needs at least two sample times");
  }
  const Params& params = process.params;
  const auto& segments = certificate.adjoint.p1_segments;
  if (segments.empty() ||
      std::abs(segments.front().t_start - params.t0) > 1e-9 ||
      std::abs(segments.back().t_end - params.T) > 1e-9) {
    throw std::domain_error("certificate adjoint arc does not tile the process horizon");
  }

  CertifyReport report;

  // (i) support and selection: mass may only sit where the arc is at the cap,
  // and there the selection must be (1, 0). Computed exactly from the
  // piecewise-linear arc, no sampling.
  const double active_threshold = 1.0 - tolerance;
  for (const auto& atom : certificate.measure.atoms) {
    if (atom.weight < 0.0) report.res_support += -atom.weight;
    if (process.trajectory.value_at(atom.time) < active_threshold) {
      report.res_support += std::abs(atom.weight);
    } else {
      report.res_selection +=
          std::abs(atom.weight) * detail::selection_deviation(atom.selection);
    }
  }
  for (const auto& piece : certificate.measure.density_pieces) {
    if (piece.rate < 0.0) {
      report.res_support += -piece.rate * (piece.t_end - piece.t_start);
    }
    const double below = detail::time_below_threshold(
        process.trajectory, piece.t_start, piece.t_end, active_threshold);
    report.res_support += std::abs(piece.rate) * below;
    const double on_cap = (piece.t_end - piece.t_start) - below;
    report.res_selection +=
        std::abs(piece.rate) * on_cap * detail::selection_deviation(piece.selection);
  }

  const double spacing = params.horizon() / (sample_count - 1);

  // (ii) adjoint equation p1' = e^{-lambda t} q2 with the closed-form
  // derivative, plus continuity across segment joins (p2' = 0 holds by
  // representation).
  for (std::size_t k = 0; k + 1 < segments.size(); ++k) {
    const double tj = segments[k].t_end;
    const double left = segments[k].coeff_exp * std::exp(-params.lambda * tj) +
                        segments[k].coeff_const;
    const double right = segments[k + 1].coeff_exp * std::exp(-params.lambda * tj) +
                         segments[k + 1].coeff_const;
    report.res_adjoint = std::max(report.res_adjoint, std::abs(left - right));
  }

  // (iv) Hamiltonian maximization, exact in u by affinity: checking the two
  // endpoints of [-1, 1] bounds the whole interval. Samples within half a
  // spacing of a control switch are skipped; the condition only holds a.e.
  const auto near_switch = [&](double t) {
    for (std::size_t k = 1; k + 1 < process.control.breakpoints.size(); ++k) {
      if (std::abs(t - process.control.breakpoints[k]) < 0.5 * spacing) return true;
    }
    return false;
  };

  for (int i = 0; i < sample_count; ++i) {
    const double t = i + 1 == sample_count ? params.T : params.t0 + i * spacing;
    const EtaQ eq = eta_and_q(certificate.adjoint, certificate.measure, t, params,
                              i + 1 == sample_count);
    const double adjoint_defect =
        std::abs(certificate.adjoint.p1_derivative(t, params.lambda) -
                 std::exp(-params.lambda * t) * eq.q[1]);
    report.res_adjoint = std::max(report.res_adjoint, adjoint_defect);

    if (near_switch(t)) continue;
    const double x1 = process.trajectory.value_at(t);
    const double u_bar = process.control.value_at(t);
    const double best = std::max(hamiltonian(t, x1, eq.q, -1.0, params),
                                 hamiltonian(t, x1, eq.q, +1.0, params));
    report.res_maximum = std::max(
        report.res_maximum, best - hamiltonian(t, x1, eq.q, u_bar, params));
  }

  // (iii) transversality at T with the closed-interval accumulation rule.
  const EtaQ terminal =
      eta_and_q(certificate.adjoint, certificate.measure, params.T, params, true);
  report.res_transversality = std::max(std::abs(terminal.q[0]),
                                       std::abs(terminal.q[1] + certificate.gamma));

  report.nontrivial = std::max({certificate.adjoint.sup_abs(params.lambda),
                                certificate.measure.mass(),
                                certificate.gamma}) > 0.0;
  report.pass = report.nontrivial && report.max_residual() <= tolerance;
  return report;
}

struct CertificateBuild {
  Certificate certificate;
  double residual = 0.0;        // max_residual of the built certificate
  bool within_tolerance = false;
};

namespace detail {

inline Certificate closed_form_certificate(const Params& params, double gamma,
                                           double atom_weight, double atom_time) {
  Certificate cert;
  cert.gamma = gamma;
  cert.adjoint.p2 = -gamma;
  // p1(T) = -atom_weight makes the shifted costate vanish at T.
  AdjointSegment seg;
  seg.t_start = params.t0;
  seg.t_end = params.T;
  seg.coeff_exp = gamma / params.lambda;
  seg.coeff_const =
      -gamma * std::exp(-params.lambda * params.T) / params.lambda - atom_weight;
  cert.adjoint.p1_segments.push_back(seg);
  if (atom_weight > 0.0) {
    cert.measure.atoms.push_back(MeasureAtom{atom_time, atom_weight, {1.0, 0.0}});
  }
  return cert;
}

}  // namespace detail

// Closed-form multipliers where they exist (interior synthesis cases), and a
// best-fit search over the admissible single-atom family for the touching
// case. The touching case has no exact multiplier set in this family when
// the cap contact happens strictly before tbar, so its residual is reported
// rather than assumed small; the flag records whether tolerance was met.
inline CertificateBuild build_certificate(const Params& params,
                                          const SynthesisResult& synthesis,
                                          double tolerance = kResidualTolerance,
                                          int sample_count = 10001) {
  params.ensure_valid();
  const bool fp1 = params.kind == ProblemKind::FP1;
  const bool fp1_label = synthesis.label == CaseLabel::FP1_A ||
                         synthesis.label == CaseLabel::FP1_B;
  if (fp1 != fp1_label) {
    throw std::invalid_argument("synthesis case does not match the problem kind");
  }

  CertificateBuild build;
  if (synthesis.label != CaseLabel::FP2_c) {
    build.certificate = detail::closed_form_certificate(params, 1.0, 0.0, 0.0);
    build.residual = certify(synthesis.process, build.certificate, tolerance,
                             sample_count)
                         .max_residual();
    build.within_tolerance = build.residual <= tolerance;
    return build;
  }

  // Touching case: the only admissible support is the contact time alpha1,
  // so search the sphere max(atom weight, gamma) = 1. The leg s in [0, 1]
  // keeps gamma = 1 and grows the atom; s in (1, 2] shrinks gamma at full
  // atom weight.
  const double alpha1 = *synthesis.landmarks.alpha1;
  const auto member = [&](double s) {
    const double weight = s <= 1.0 ? s : 1.0;
    const double gamma = s <= 1.0 ? 1.0 : 2.0 - s;
    return detail::closed_form_certificate(params, gamma, weight, alpha1);
  };
  const auto objective = [&](double s) {
    return certify(synthesis.process, member(s), tolerance, sample_count)
        .max_residual();
  };

  const int grid_points = 81;
  double best_s = 0.0;
  double best_value = objective(0.0);
  for (int i = 1; i < grid_points; ++i) {
    const double s = 2.0 * i / (grid_points - 1);
    const double value = objective(s);
    if (value < best_value) {
      best_value = value;
      best_s = s;
    }
  }
  const double step = 2.0 / (grid_points - 1);
  const double refined = golden_section_minimize(
      objective, std::max(0.0, best_s - step), std::min(2.0, best_s + step),
      1e-10, 120);
  if (objective(refined) < best_value) best_s = refined;

  build.certificate = member(best_s);
  build.residual = objective(best_s);
  build.within_tolerance = build.residual <= tolerance;
  return build;
}

// Filippov preflight: parameter validity, the sampled linear growth bound
// ||f(t, x, u)|| <= (a + 1)(||x|| + 1), and the structural convexity of the
// velocity sets (each Q(t, x) is a line segment in the plane).
inline ExistenceReport preflight_existence(const Params& params,
                                           int sample_count = 10001) {
  ExistenceReport report;
  report.params_ok = params.valid();
  report.convexity_ok = true;
  report.max_growth_ratio = std::numeric_limits<double>::quiet_NaN();

  const bool growth_computable =
      std::isfinite(params.lambda) && std::isfinite(params.a) &&
      std::isfinite(params.t0) && std::isfinite(params.T) &&
      params.lambda > 0.0 && params.a >= 0.0 && params.T > params.t0;
  if (growth_computable) {
    const int per_axis =
        std::max(2, static_cast<int>(std::cbrt(static_cast<double>(sample_count))));
    const double bound = params.a + 1.0;
    double worst = 0.0;
    for (int it = 0; it < per_axis; ++it) {
      const double t = params.t0 + params.horizon() * it / (per_axis - 1);
      const double discount = std::exp(-params.lambda * t);
      for (int ix = 0; ix < per_axis; ++ix) {
        const double x1 = -10.0 + 20.0 * ix / (per_axis - 1);
        for (int iu = 0; iu < per_axis; ++iu) {
          const double u = -1.0 + 2.0 * iu / (per_axis - 1);
          const double f1 = -params.a * u;
          const double f2 = -discount * (x1 + u);
          const double ratio = std::hypot(f1, f2) / (std::abs(x1) + 1.0);
          worst = std::max(worst, ratio);
        }
      }
    }
    report.max_growth_ratio = worst;
    report.growth_ok = worst <= bound * (1.0 + 1e-12);
  }

  report.pass = report.params_ok && report.growth_ok && report.convexity_ok;
  return report;
}

}  // namespace ocsyn
