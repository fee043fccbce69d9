#pragma once

#include <complex>
#include <vector>

namespace corrlss {

using cplx = std::complex<double>;

/// Positively oriented rectangle with corners x_left ± i·height and x_right ± i·height.
struct ContourSpec {
  double x_left = 0.0;
  double x_right = 0.0;
  double height = 1.0;
  int nodes_per_side = 256;
  double refinement_tolerance = 1e-9;
};

/// Real-axis locations where Stieltjes-transform integrands may be singular: the interval
/// [lo, hi] (support or observed spectrum) and, when `zero` is set, the origin.
struct SingularSet {
  double lo = 0.0;
  double hi = 0.0;
  bool zero = true;
};

/// x_r = (1+√c)² + 1; x_l = −0.5 if c ≥ 1, else (1−√c)²/2; v0 = 1.
ContourSpec default_contour(double c);

/// Throws Error(InvalidArgument) unless the rectangle strictly encloses [lo, hi] and does
/// not cross the origin.
void check_encloses(const ContourSpec& contour, const SingularSet& singular);

/// Rectangle strictly inside `outer` and still enclosing the singular set: each abscissa moves
/// halfway toward the nearest singular point, the height is halved.
ContourSpec inner_contour(const ContourSpec& outer, const SingularSet& singular);

/// True if one rectangle lies strictly inside the other (the curves never meet).
bool strictly_nested(const ContourSpec& a, const ContourSpec& b);

struct ContourNode {
  cplx z;
  cplx weight;  // quadrature weight times dz
};

/// Composite Gauss–Legendre nodes on the rectangle. Horizontal sides use nodes_per_side
/// nodes in equal panels; vertical sides are graded geometrically toward the real axis so
/// panels near a close singular point shrink to its distance. Each refinement level bisects
/// every panel. With `upper_half_only`, only the part with Im z ≥ 0 is returned (same
/// orientation).
std::vector<ContourNode> contour_nodes(const ContourSpec& contour, const SingularSet& singular,
                                       int level, bool upper_half_only = false);

}  // namespace corrlss
