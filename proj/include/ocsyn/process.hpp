#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ocsyn/params.hpp"

namespace ocsyn {

inline constexpr double kResidualTolerance = 1e-9;   // default pass threshold
inline constexpr double kIdentityTolerance = 1e-12;  // exact-identity checks

// Right-continuous step control: u(t) = values[k] on [breakpoints[k],
// breakpoints[k+1]), with the last segment closed at T.
struct Control {
  std::vector<double> breakpoints;  // strictly increasing, size K+1
  std::vector<double> values;       // size K

  std::size_t segment_count() const { return values.size(); }

  // Index of the segment containing t (right-continuous; t == T maps to the
  // last segment).
  std::size_t segment_index(double t) const {
    const auto it =
        std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    const std::ptrdiff_t k = (it - breakpoints.begin()) - 1;
    return static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(values.size()) - 1));
  }

  double value_at(double t) const { return values[segment_index(t)]; }
};

// Piecewise-linear state arc on the same breakpoints as its control.
struct Trajectory {
  std::vector<double> breakpoints;  // size K+1
  std::vector<double> values;       // node values x(breakpoints[k]), size K+1

  double value_at(double t) const {
    const auto it =
        std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    const std::ptrdiff_t k = std::clamp<std::ptrdiff_t>(
        (it - breakpoints.begin()) - 1, 0,
        static_cast<std::ptrdiff_t>(breakpoints.size()) - 2);
    const double s = breakpoints[k];
    const double e = breakpoints[k + 1];
    const double w = (t - s) / (e - s);
    return values[k] + w * (values[k + 1] - values[k]);
  }

  double max_value() const {
    return *std::max_element(values.begin(), values.end());
  }
};

struct Process {
  Params params;
  Control control;
  Trajectory trajectory;
};

struct FeasibilityReport {
  double dynamics_residual = 0.0;  // max |segment slope + a u_k|
  double control_violation = 0.0;  // max distance of u_k to [-1, 1]
  double state_violation = 0.0;    // max over nodes of max(0, x - 1), FP2 only
  double initial_residual = 0.0;   // |x(t0) - x0|
  bool pass = false;
};

namespace detail {

inline void ensure_finite(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument(std::string(what) + " contains a non-finite value");
    }
  }
}

inline void ensure_control_shape(const Params& params, const Control& control) {
  ensure_finite(control.breakpoints, "control breakpoints");
  ensure_finite(control.values, "control values");
  if (control.values.empty() ||
      control.breakpoints.size() != control.values.size() + 1) {
    throw std::invalid_argument("control needs K >= 1 values and K+1 breakpoints");
  }
  for (std::size_t k = 0; k + 1 < control.breakpoints.size(); ++k) {
    if (!(control.breakpoints[k] < control.breakpoints[k + 1])) {
      throw std::invalid_argument("control breakpoints must be strictly increasing");
    }
  }
  if (control.breakpoints.front() != params.t0 ||
      control.breakpoints.back() != params.T) {
    throw std::domain_error("control breakpoints must span [t0, T] exactly");
  }
}

}  // namespace detail

// Integrals of the discount kernel over [s, s+h]:
//   a0 = integral of e^{-lambda t} dt
//   a1 = integral of (t - s) e^{-lambda t} dt
// evaluated with expm1 so short segments keep full relative accuracy.
struct DiscountWeights {
  double a0 = 0.0;
  double a1 = 0.0;
};

inline DiscountWeights discount_weights(double lambda, double s, double h) {
  const double w = std::exp(-lambda * s);
  const double z = lambda * h;
  const double em = -std::expm1(-z);  // 1 - e^{-z}
  DiscountWeights out;
  out.a0 = w * em / lambda;
  out.a1 = w * (em - z * std::exp(-z)) / (lambda * lambda);
  return out;
}

// Exact objective contribution of one segment [s, s+h] with state
// x(t) = xs - a u (t - s) and constant control u.
inline double segment_cost(const Params& params, double s, double h, double xs,
                           double u) {
  const DiscountWeights w = discount_weights(params.lambda, s, h);
  return -(xs + u) * w.a0 + params.a * u * w.a1;
}

// Integrate xdot = -a u from x(t0) = x0. Node-exact: no quadrature is
// involved anywhere in this library.
inline Trajectory integrate_control(const Params& params, const Control& control) {
  params.ensure_valid();
  detail::ensure_control_shape(params, control);
  Trajectory trajectory;
  trajectory.breakpoints = control.breakpoints;
  trajectory.values.resize(control.breakpoints.size());
  trajectory.values[0] = params.x0;
  for (std::size_t k = 0; k < control.values.size(); ++k) {
    const double dt = control.breakpoints[k + 1] - control.breakpoints[k];
    trajectory.values[k + 1] =
        trajectory.values[k] - params.a * control.values[k] * dt;
  }
  return trajectory;
}

inline Process make_process(const Params& params, Control control) {
  Process process;
  process.params = params;
  process.trajectory = integrate_control(params, control);
  process.control = std::move(control);
  return process;
}

namespace detail {

inline void ensure_process_shape(const Process& process) {
  ensure_control_shape(process.params, process.control);
  if (process.trajectory.breakpoints != process.control.breakpoints ||
      process.trajectory.values.size() != process.trajectory.breakpoints.size()) {
    throw std::invalid_argument("trajectory must share the control breakpoints");
  }
  ensure_finite(process.trajectory.values, "trajectory values");
}

}  // namespace detail

// Exact discounted cost, summed segmentwise from the antiderivative of
// e^{-lambda t}(c0 + c1 t).
inline double cost(const Process& process) {
  detail::ensure_process_shape(process);
  double total = 0.0;
  for (std::size_t k = 0; k < process.control.values.size(); ++k) {
    const double s = process.control.breakpoints[k];
    const double h = process.control.breakpoints[k + 1] - s;
    total += segment_cost(process.params, s, h, process.trajectory.values[k],
                          process.control.values[k]);
  }
  return total;
}

// Running cost x2(t) = integral from t0 to t of -e^{-lambda tau}
// (x1(tau) + u(tau)) d tau, exact at every breakpoint. x2(T) equals
// cost(process) by construction.
inline Trajectory augment_mayer(const Process& process) {
  detail::ensure_process_shape(process);
  Trajectory running;
  running.breakpoints = process.control.breakpoints;
  running.values.resize(running.breakpoints.size());
  running.values[0] = 0.0;
  for (std::size_t k = 0; k < process.control.values.size(); ++k) {
    const double s = process.control.breakpoints[k];
    const double h = process.control.breakpoints[k + 1] - s;
    running.values[k + 1] =
        running.values[k] + segment_cost(process.params, s, h,
                                         process.trajectory.values[k],
                                         process.control.values[k]);
  }
  return running;
}

inline FeasibilityReport check_feasibility(const Process& process,
                                           double tolerance = kResidualTolerance) {
  detail::ensure_process_shape(process);
  FeasibilityReport report;
  for (std::size_t k = 0; k < process.control.values.size(); ++k) {
    const double dt = process.control.breakpoints[k + 1] - process.control.breakpoints[k];
    const double slope =
        (process.trajectory.values[k + 1] - process.trajectory.values[k]) / dt;
    report.dynamics_residual =
        std::max(report.dynamics_residual,
                 std::abs(slope + process.params.a * process.control.values[k]));
    report.control_violation =
        std::max(report.control_violation,
                 std::max(0.0, std::abs(process.control.values[k]) - 1.0));
  }
  if (process.params.kind == ProblemKind::FP2) {
    for (double x : process.trajectory.values) {
      report.state_violation = std::max(report.state_violation, x - 1.0);
    }
    report.state_violation = std::max(report.state_violation, 0.0);
  }
  report.initial_residual = std::abs(process.trajectory.values.front() - process.params.x0);
  report.pass = report.dynamics_residual <= tolerance &&
                report.control_violation <= tolerance &&
                report.state_violation <= tolerance &&
                report.initial_residual <= tolerance;
  return report;
}

}  // namespace ocsyn
