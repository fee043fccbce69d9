#include "corrlss/contour.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "corrlss/error.hpp"
#include "corrlss/quadrature.hpp"

namespace corrlss {

namespace {

constexpr int kPanelOrder = 16;

const GaussLegendreRule& panel_rule() {
  static const GaussLegendreRule rule = gauss_legendre(kPanelOrder);
  return rule;
}

// Distance from the real abscissa x to the nearest singular point.
double clearance(double x, const SingularSet& s) {
  double d = x < s.lo ? s.lo - x : (x > s.hi ? x - s.hi : 0.0);
  if (s.zero) d = std::min(d, std::abs(x));
  return d;
}

void append_segment(std::vector<ContourNode>& out, cplx from, cplx to, int pieces) {
  const auto& rule = panel_rule();
  const cplx step = (to - from) / static_cast<double>(pieces);
  for (int k = 0; k < pieces; ++k) {
    const cplx lo = from + step * static_cast<double>(k);
    const cplx mid = lo + 0.5 * step;
    const cplx half = 0.5 * step;
    for (int j = 0; j < kPanelOrder; ++j) {
      out.push_back({mid + half * rule.nodes[j], half * rule.weights[j]});
    }
  }
}

// Breakpoints in [0, h] for a vertical half-side, geometric toward 0, descending.
std::vector<double> graded_breaks(double h, double gap) {
  std::vector<double> breaks{h};
  double t = h;
  const double floor = std::max(0.5 * gap, 1e-8 * h);
  while (t > floor) {
    t *= 0.5;
    breaks.push_back(t);
  }
  breaks.push_back(0.0);
  return breaks;
}

// Vertical side at abscissa x, traversed upward (up = true) or downward, in imaginary range
// [y_lo, y_hi] ⊂ [−h, h], graded toward Im z = 0.
void append_vertical(std::vector<ContourNode>& out, double x, double h, double gap, bool up,
                     bool upper_only, int pieces) {
  const std::vector<double> breaks = graded_breaks(h, gap);
  std::vector<double> ys;  // ascending imaginary breakpoints
  if (!upper_only) {
    for (double b : breaks) ys.push_back(-b);
  }
  for (auto it = breaks.rbegin(); it != breaks.rend(); ++it) {
    if (!ys.empty() && *it == ys.back()) continue;
    ys.push_back(*it);
  }
  if (up) {
    for (std::size_t k = 0; k + 1 < ys.size(); ++k) {
      append_segment(out, {x, ys[k]}, {x, ys[k + 1]}, pieces);
    }
  } else {
    for (std::size_t k = ys.size() - 1; k > 0; --k) {
      append_segment(out, {x, ys[k]}, {x, ys[k - 1]}, pieces);
    }
  }
}

}  // namespace

ContourSpec default_contour(double c) {
  if (!(c > 0.0)) throw Error(Errc::InvalidArgument, "aspect ratio must be positive");
  const double root = std::sqrt(c);
  ContourSpec out;
  out.x_right = (1.0 + root) * (1.0 + root) + 1.0;
  out.x_left = c >= 1.0 ? -0.5 : 0.5 * (1.0 - root) * (1.0 - root);
  out.height = 1.0;
  out.nodes_per_side = 256;
  out.refinement_tolerance = 1e-9;
  return out;
}

void check_encloses(const ContourSpec& contour, const SingularSet& singular) {
  if (!(contour.height > 0.0) || !(contour.x_left < contour.x_right) ||
      contour.nodes_per_side < 1 || !(contour.refinement_tolerance > 0.0)) {
    throw Error(Errc::InvalidArgument, "malformed contour");
  }
  if (!(contour.x_left < singular.lo && contour.x_right > singular.hi)) {
    throw Error(Errc::InvalidArgument,
                "contour [" + std::to_string(contour.x_left) + ", " +
                    std::to_string(contour.x_right) + "] does not enclose the spectrum [" +
                    std::to_string(singular.lo) + ", " + std::to_string(singular.hi) + "]");
  }
  if (singular.zero && (contour.x_left == 0.0 || contour.x_right == 0.0)) {
    throw Error(Errc::InvalidArgument, "contour passes through the origin");
  }
  if (singular.zero && singular.lo > 0.0 && contour.x_left < 0.0) {
    throw Error(Errc::InvalidArgument, "contour encloses the origin outside the spectrum");
  }
}

ContourSpec inner_contour(const ContourSpec& outer, const SingularSet& singular) {
  check_encloses(outer, singular);
  double left_target = singular.lo;
  if (singular.zero && outer.x_left < 0.0) left_target = std::min(left_target, 0.0);
  double right_target = singular.hi;
  if (singular.zero && outer.x_right < 0.0) right_target = std::max(right_target, 0.0);
  ContourSpec inner = outer;
  inner.x_left = 0.5 * (outer.x_left + left_target);
  inner.x_right = 0.5 * (outer.x_right + right_target);
  inner.height = 0.5 * outer.height;
  return inner;
}

bool strictly_nested(const ContourSpec& a, const ContourSpec& b) {
  auto inside = [](const ContourSpec& in, const ContourSpec& out) {
    return out.x_left < in.x_left && in.x_right < out.x_right && in.height < out.height;
  };
  return inside(a, b) || inside(b, a);
}

std::vector<ContourNode> contour_nodes(const ContourSpec& contour, const SingularSet& singular,
                                       int level, bool upper_half_only) {
  const int pieces = 1 << level;
  const int horizontal_panels = std::max(1, contour.nodes_per_side / kPanelOrder);
  const double xl = contour.x_left;
  const double xr = contour.x_right;
  const double h = contour.height;
  std::vector<ContourNode> out;
  out.reserve(static_cast<std::size_t>(4 * contour.nodes_per_side * pieces));
  if (!upper_half_only) append_segment(out, {xl, -h}, {xr, -h}, horizontal_panels * pieces);
  append_vertical(out, xr, h, clearance(xr, singular), true, upper_half_only, pieces);
  append_segment(out, {xr, h}, {xl, h}, horizontal_panels * pieces);
  append_vertical(out, xl, h, clearance(xl, singular), false, upper_half_only, pieces);
  return out;
}

}  // namespace corrlss
