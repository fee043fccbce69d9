#include "corrlss/mp_law.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "corrlss/error.hpp"
#include "corrlss/quadrature.hpp"

namespace corrlss {

namespace {

constexpr double kQuadAbsTol = 1e-12;
constexpr double kQuadRelTol = 1e-10;
constexpr double kSupportGuard = 1e-12;

double distance_to_interval(cplx z, double lo, double hi) {
  const double dx = z.real() < lo ? lo - z.real() : (z.real() > hi ? z.real() - hi : 0.0);
  return std::hypot(dx, z.imag());
}

}  // namespace

MpModel::MpModel(double c) : c_(c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(Errc::InvalidArgument, "aspect ratio must be positive, got " + std::to_string(c));
  }
  const double root = std::sqrt(c);
  a_ = (1.0 - root) * (1.0 - root);
  b_ = (1.0 + root) * (1.0 + root);
}

double mp_density(const MpModel& model, double x) {
  const double a = model.lower_edge();
  const double b = model.upper_edge();
  if (!(x > a && x < b)) return 0.0;
  return std::sqrt((b - x) * (x - a)) / (2.0 * std::numbers::pi * x * model.c());
}

double mp_integral(const MpModel& model, const TestFunction& f) {
  const double atom = model.point_mass_at_zero();
  if (atom > 0.0 && !f.finite_at_zero()) {
    throw Error(Errc::UndefinedAtAtom, "f(0) is undefined but F_c has an atom at zero (c = " +
                                           std::to_string(model.c()) + ")");
  }
  const double a = model.lower_edge();
  const double b = model.upper_edge();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double scale = half * half / (2.0 * std::numbers::pi * model.c());
  auto integrand = [&](double theta) {
    const double s = std::sin(theta);
    const double x = mid + half * s;
    // cos²θ written as (1−s)(1+s) keeps the c = 1 endpoint (x → 0) finite.
    return f(x) * scale * (1.0 - s) * (1.0 + s) / x;
  };
  const auto result = integrate_adaptive(integrand, -0.5 * std::numbers::pi,
                                         0.5 * std::numbers::pi, kQuadAbsTol, kQuadRelTol);
  return result.value + (atom > 0.0 ? atom * f(0.0) : 0.0);
}

StieltjesPair stieltjes(const MpModel& model, cplx z) {
  const double a = model.lower_edge();
  const double b = model.upper_edge();
  const double c = model.c();
  if (z.imag() == 0.0 && z.real() > a && z.real() < b) {
    throw Error(Errc::BranchAmbiguous, "real z = " + std::to_string(z.real()) +
                                           " lies inside the support");
  }
  if (distance_to_interval(z, a, b) < kSupportGuard || std::abs(z) < kSupportGuard) {
    throw Error(Errc::OnSupport, "z is on the support of F_c or at the origin");
  }
  // sqrt(z−a)·sqrt(z−b) with principal branches has its cut exactly on [a, b] and grows
  // like z at infinity, which selects the Herglotz root. The form 2/(1−c−z−s) avoids
  // cancellation for large |z|.
  const cplx s = std::sqrt(z - a) * std::sqrt(z - b);
  StieltjesPair out;
  out.z = z;
  out.m = 2.0 / (1.0 - c - z - s);
  out.m_prime = -(c * out.m * out.m + out.m) / (2.0 * c * z * out.m + z + c - 1.0);
  out.m_under = -(1.0 - c) / z + c * out.m;
  out.m_under_prime = (1.0 - c) / (z * z) + c * out.m_prime;
  return out;
}

}  // namespace corrlss
