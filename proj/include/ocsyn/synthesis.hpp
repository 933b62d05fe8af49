#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ocsyn/params.hpp"
#include "ocsyn/process.hpp"

namespace ocsyn {

// Closed-form quantities steering the synthesis:
//   rho    horizon threshold separating pure descent from up-then-down,
//   tbar   optimal switch time T - rho,
//   alpha1 (FP2) time at which full ascent from x0 reaches the cap,
//   xbar0  (FP2) initial-state threshold separating interior and touching
//          solutions.
struct Landmarks {
  double rho = 0.0;
  double tbar = 0.0;
  std::optional<double> alpha1;
  std::optional<double> xbar0;
};

enum class CaseLabel { FP1_A, FP1_B, FP2_a, FP2_b, FP2_c };

inline const char* to_string(CaseLabel label) {
  switch (label) {
    case CaseLabel::FP1_A: return "FP1_A";
    case CaseLabel::FP1_B: return "FP1_B";
    case CaseLabel::FP2_a: return "FP2_a";
    case CaseLabel::FP2_b: return "FP2_b";
    case CaseLabel::FP2_c: return "FP2_c";
  }
  return "unknown";
}

inline CaseLabel case_label_from_string(const std::string& text) {
  if (text == "FP1_A") return CaseLabel::FP1_A;
  if (text == "FP1_B") return CaseLabel::FP1_B;
  if (text == "FP2_a") return CaseLabel::FP2_a;
  if (text == "FP2_b") return CaseLabel::FP2_b;
  if (text == "FP2_c") return CaseLabel::FP2_c;
  throw std::invalid_argument("unknown case label: '" + text + "'");
}

struct SynthesisResult {
  CaseLabel label = CaseLabel::FP1_A;
  Landmarks landmarks;
  Process process;
  double cost = 0.0;
  double peak = 0.0;  // max state over the horizon (max node value)
  std::vector<double> switch_times;
};

inline Landmarks landmarks(const Params& params) {
  params.ensure_valid();
  Landmarks lm;
  lm.rho = std::log(params.a / (params.a - params.lambda)) / params.lambda;
  lm.tbar = params.T - lm.rho;
  if (params.kind == ProblemKind::FP2) {
    lm.alpha1 = params.t0 + (1.0 - params.x0) / params.a;
    lm.xbar0 = 1.0 - params.a * (lm.tbar - params.t0);
  }
  return lm;
}

// Ties resolve exactly as printed: the short horizon claims T - t0 <= rho,
// and the touching case claims x0 >= xbar0.
inline CaseLabel classify(const Params& params) {
  const Landmarks lm = landmarks(params);
  const bool short_horizon = params.horizon() <= lm.rho;
  if (params.kind == ProblemKind::FP1) {
    return short_horizon ? CaseLabel::FP1_A : CaseLabel::FP1_B;
  }
  if (short_horizon) return CaseLabel::FP2_a;
  return params.x0 >= *lm.xbar0 ? CaseLabel::FP2_c : CaseLabel::FP2_b;
}

namespace detail {

// Pure descent: u = +1 on the whole horizon.
inline Control descent_control(const Params& params) {
  return Control{{params.t0, params.T}, {1.0}};
}

// Full ascent until switch_time, then full descent. Switches at the horizon
// ends degenerate to the corresponding single arc.
inline Control up_down_control(const Params& params, double switch_time) {
  if (!(switch_time > params.t0)) return descent_control(params);
  if (!(switch_time < params.T)) return Control{{params.t0, params.T}, {-1.0}};
  return Control{{params.t0, switch_time, params.T}, {-1.0, 1.0}};
}

inline SynthesisResult finish(const Params& params, CaseLabel label,
                              Landmarks lm, Control control,
                              std::vector<double> switch_times) {
  SynthesisResult result;
  result.label = label;
  result.landmarks = lm;
  result.process = make_process(params, std::move(control));
  result.cost = cost(result.process);
  result.peak = result.process.trajectory.max_value();
  result.switch_times = std::move(switch_times);
  return result;
}

}  // namespace detail

inline SynthesisResult synthesize_fp1(const Params& params) {
  params.ensure_valid();
  if (params.kind != ProblemKind::FP1) {
    throw std::invalid_argument("synthesize_fp1 requires kind fp1");
  }
  const Landmarks lm = landmarks(params);
  if (classify(params) == CaseLabel::FP1_A) {
    return detail::finish(params, CaseLabel::FP1_A, lm,
                          detail::descent_control(params), {});
  }
  return detail::finish(params, CaseLabel::FP1_B, lm,
                        detail::up_down_control(params, lm.tbar), {lm.tbar});
}

inline SynthesisResult synthesize_fp2(const Params& params) {
  params.ensure_valid();
  if (params.kind != ProblemKind::FP2) {
    throw std::invalid_argument("synthesize_fp2 requires kind fp2");
  }
  const Landmarks lm = landmarks(params);
  switch (classify(params)) {
    case CaseLabel::FP2_a:
      return detail::finish(params, CaseLabel::FP2_a, lm,
                            detail::descent_control(params), {});
    case CaseLabel::FP2_b:
      return detail::finish(params, CaseLabel::FP2_b, lm,
                            detail::up_down_control(params, lm.tbar),
                            {lm.tbar});
    default: {
      // Ascend to the cap at alpha1, then descend. With x0 = 1 the ascent
      // leg is empty and the whole horizon descends.
      const double alpha1 = *lm.alpha1;
      std::vector<double> switches;
      if (alpha1 > params.t0) switches.push_back(alpha1);
      return detail::finish(params, CaseLabel::FP2_c, lm,
                            detail::up_down_control(params, alpha1),
                            std::move(switches));
    }
  }
}

inline SynthesisResult synthesize(const Params& params) {
  return params.kind == ProblemKind::FP1 ? synthesize_fp1(params)
                                         : synthesize_fp2(params);
}

}  // namespace ocsyn
