#pragma once

#include <cmath>

namespace ocsyn {

// Golden-section refinement of a scalar minimum. Assumes unimodality only
// inside the supplied bracket; callers scan a grid first to locate it.
template <typename F>
double golden_section_minimize(F&& f, double lo, double hi, double tol,
                               int max_iterations) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - (hi - lo) * inv_phi;
  double d = lo + (hi - lo) * inv_phi;
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iterations && (hi - lo) > tol; ++i) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - (hi - lo) * inv_phi;
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + (hi - lo) * inv_phi;
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace ocsyn
