#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace ocsyn {

// Two members of the problem family: FP1 has a free state, FP2 caps the
// state at 1 from above.
enum class ProblemKind { FP1, FP2 };

inline const char* to_string(ProblemKind kind) {
  return kind == ProblemKind::FP1 ? "fp1" : "fp2";
}

inline ProblemKind problem_kind_from_string(const std::string& text) {
  if (text == "fp1" || text == "FP1") return ProblemKind::FP1;
  if (text == "fp2" || text == "FP2") return ProblemKind::FP2;
  throw std::invalid_argument("unknown problem kind: '" + text + "'");
}

// Five-parameter problem: minimize the discounted objective
//
//   J(x, u) = integral over [t0, T] of -e^{-lambda t} (x(t) + u(t)) dt
//
// subject to xdot = -a u, x(t0) = x0, u(t) in [-1, 1], and (FP2 only)
// x(t) <= 1 on the whole horizon.
struct Params {
  ProblemKind kind = ProblemKind::FP1;
  double lambda = 1.0;  // discount rate, > 0
  double a = 2.0;       // control gain, > lambda
  double t0 = 0.0;      // initial time, >= 0
  double T = 1.0;       // terminal time, > t0
  double x0 = 0.0;      // initial state; <= 1 required for FP2

  bool valid() const {
    if (!std::isfinite(lambda) || !std::isfinite(a) || !std::isfinite(t0) ||
        !std::isfinite(T) || !std::isfinite(x0)) {
      return false;
    }
    if (!(lambda > 0.0) || !(a > lambda)) return false;
    if (!(t0 >= 0.0) || !(T > t0)) return false;
    if (kind == ProblemKind::FP2 && !(x0 <= 1.0)) return false;
    return true;
  }

  void ensure_valid() const {
    if (valid()) return;
    throw std::invalid_argument(
        "invalid parameters: need a > lambda > 0, T > t0 >= 0, finite values" +
        std::string(kind == ProblemKind::FP2 ? ", and x0 <= 1 for fp2" : ""));
  }

  double horizon() const { return T - t0; }
};

}  // namespace ocsyn
