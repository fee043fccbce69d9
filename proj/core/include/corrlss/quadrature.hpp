#pragma once

#include <functional>
#include <vector>

namespace corrlss {

/// Gauss–Legendre nodes and weights on [-1, 1], ascending nodes.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int order);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

/// Globally adaptive Gauss–Kronrod (G7/K15) integration of `f` over [lo, hi].
/// Stops once the summed error estimate is below max(abs_tol, rel_tol·|I|).
/// Throws Error(NonConvergent) when `max_intervals` bisections do not suffice.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                    double abs_tol, double rel_tol, int max_intervals = 2000);

}  // namespace corrlss
