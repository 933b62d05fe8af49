#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ocsyn/params.hpp"
#include "ocsyn/process.hpp"

namespace ocsyn {

// Backward value iteration on a uniform (t, x) grid. The stage cost is the
// exact segment antiderivative, so all discretization error comes from the
// control set and the state interpolation. Successors that leave the grid
// (in particular, successors above the cap for FP2) are infeasible rather
// than projected.
struct DpConfig {
  int nt = 2000;  // time steps, >= 2
  int nx = 4001;  // state nodes, >= 2
  double x_min = 0.0;
  double x_max = 0.0;
  std::vector<double> control_set{-1.0, 0.0, 1.0};
  bool keep_value_grid = false;

  // Grid covering the reachable set with a small pad; the top clips to the
  // cap for FP2.
  static DpConfig cover(const Params& params, int nt, int nx,
                        double pad_fraction = 0.05) {
    params.ensure_valid();
    const double span = params.a * params.horizon();
    double lo = params.x0 - span;
    double hi = params.x0 + span;
    if (params.kind == ProblemKind::FP2) hi = std::min(hi, 1.0);
    const double pad = pad_fraction * (hi - lo);
    lo -= pad;
    hi = params.kind == ProblemKind::FP2 ? std::min(hi + pad, 1.0) : hi + pad;
    DpConfig config;
    config.nt = nt;
    config.nx = nx;
    config.x_min = lo;
    config.x_max = hi;
    return config;
  }
};

struct DpResult {
  DpConfig config;
  double cost = 0.0;            // optimal value interpolated at (t0, x0)
  Process process;              // greedily extracted process
  double extracted_cost = 0.0;  // exact cost of the extracted process
  // Cost-to-go grid, (nt + 1) rows by nx columns, row-major; retained only
  // when config.keep_value_grid is set.
  std::vector<double> value;
};

namespace detail {

constexpr double kIndexSnap = 1e-9;

// Linear interpolation of a value row at a fractional node index. Indices
// outside [0, nx - 1] (beyond snapping slack) are infeasible.
inline double interp_row(const double* row, int nx, double index) {
  const double top = static_cast<double>(nx - 1);
  if (index < -kIndexSnap || index > top + kIndexSnap) {
    return std::numeric_limits<double>::infinity();
  }
  index = std::clamp(index, 0.0, top);
  const int k = static_cast<int>(index);
  const double frac = index - k;
  if (frac <= kIndexSnap || k + 1 >= nx) return row[k];
  if (frac >= 1.0 - kIndexSnap) return row[k + 1];
  return row[k] + frac * (row[k + 1] - row[k]);
}

inline void validate_dp_inputs(const Params& params, const DpConfig& config) {
  params.ensure_valid();
  if (config.nt < 2 || config.nx < 2) {
    throw std::invalid_argument("dp grid needs nt >= 2 and nx >= 2");
  }
  if (!(config.x_min < config.x_max)) {
    throw std::invalid_argument("dp grid needs x_min < x_max");
  }
  if (config.control_set.empty()) {
    throw std::invalid_argument("dp control set is empty");
  }
  for (double u : config.control_set) {
    if (!(u >= -1.0) || !(u <= 1.0)) {
      throw std::invalid_argument("dp control set must lie within [-1, 1]");
    }
  }
  if (params.kind == ProblemKind::FP2 && config.x_max > 1.0 + 1e-12) {
    throw std::invalid_argument("dp grid must satisfy x_max <= 1 for fp2");
  }
  const double span = params.a * params.horizon();
  double reach_hi = params.x0 + span;
  if (params.kind == ProblemKind::FP2) reach_hi = std::min(reach_hi, 1.0);
  const double slack =
      1e-9 * std::max(1.0, std::abs(reach_hi) + std::abs(params.x0));
  if (config.x_min > params.x0 - span + slack ||
      config.x_max < reach_hi - slack) {
    throw std::domain_error("dp grid does not cover the reachable set");
  }
}

}  // namespace detail

inline DpResult solve_dp(const Params& params, const DpConfig& config) {
  detail::validate_dp_inputs(params, config);

  const int nt = config.nt;
  const int nx = config.nx;
  const double dt = params.horizon() / nt;
  const double dx = (config.x_max - config.x_min) / (nx - 1);
  const std::size_t n_controls = config.control_set.size();
  const double inf = std::numeric_limits<double>::infinity();

  // Successor index shift per control; constant across the grid.
  std::vector<double> shift(n_controls);
  for (std::size_t c = 0; c < n_controls; ++c) {
    shift[c] = params.a * config.control_set[c] * dt / dx;
  }

  std::vector<double> grid(static_cast<std::size_t>(nt + 1) * nx, 0.0);
  const auto row = [&](int i) { return grid.data() + static_cast<std::size_t>(i) * nx; };

  for (int i = nt - 1; i >= 0; --i) {
    const double t = params.t0 + i * dt;
    const DiscountWeights w = discount_weights(params.lambda, t, dt);
    const double* tail_row = row(i + 1);
    double* out = row(i);
    for (std::size_t c = 0; c < n_controls; ++c) {
      const double stage_u =
          config.control_set[c] * (params.a * w.a1 - w.a0);
      const double s = shift[c];
      for (int j = 0; j < nx; ++j) {
        const double tail = detail::interp_row(tail_row, nx, j - s);
        const double candidate =
            -(config.x_min + j * dx) * w.a0 + stage_u + tail;
        if (c == 0 || candidate < out[j]) out[j] = candidate;
      }
    }
  }

  DpResult result;
  result.config = config;
  result.cost =
      detail::interp_row(row(0), nx, (params.x0 - config.x_min) / dx);

  // Greedy forward extraction with exact state propagation; ties keep the
  // lowest control in the configured order.
  std::vector<double> chosen(nt, 0.0);
  double x = params.x0;
  for (int i = 0; i < nt; ++i) {
    const double t = params.t0 + i * dt;
    const DiscountWeights w = discount_weights(params.lambda, t, dt);
    const double* tail_row = row(i + 1);
    double best = inf;
    double best_u = config.control_set.front();
    for (std::size_t c = 0; c < n_controls; ++c) {
      const double u = config.control_set[c];
      const double x_next = x - params.a * u * dt;
      const double tail =
          detail::interp_row(tail_row, nx, (x_next - config.x_min) / dx);
      const double candidate = -(x + u) * w.a0 + params.a * u * w.a1 + tail;
      if (candidate < best) {
        best = candidate;
        best_u = u;
      }
    }
    chosen[i] = best_u;
    x -= params.a * best_u * dt;
  }

  Control control;
  control.breakpoints.push_back(params.t0);
  for (int i = 0; i < nt; ++i) {
    const double t_end = i + 1 == nt ? params.T : params.t0 + (i + 1) * dt;
    if (!control.values.empty() && control.values.back() == chosen[i]) {
      control.breakpoints.back() = t_end;
    } else {
      control.values.push_back(chosen[i]);
      control.breakpoints.push_back(t_end);
    }
  }
  result.process = make_process(params, std::move(control));
  result.extracted_cost = cost(result.process);

  if (config.keep_value_grid) result.value = std::move(grid);
  return result;
}

}  // namespace ocsyn
