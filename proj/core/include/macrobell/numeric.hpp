#pragma once

#include <cmath>
#include <utility>

namespace macrobell {

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
/// Returns (argmax, f(argmax)).
template <class F>
std::pair<double, double> golden_section_max(F&& f, double lo, double hi, double tol = 1e-12,
                                             int max_iter = 400) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < max_iter && (hi - lo) > tol; ++i) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    }
  }
  // The bracket ends may beat the interior when the maximum sits on a boundary.
  double best_x = f1 >= f2 ? x1 : x2;
  double best_f = f1 >= f2 ? f1 : f2;
  for (double edge : {lo, hi}) {
    const double fe = f(edge);
    if (fe > best_f) {
      best_f = fe;
      best_x = edge;
    }
  }
  return {best_x, best_f};
}

}  // namespace macrobell
