#pragma once

#include <complex>

#include "corrlss/test_function.hpp"

namespace corrlss {

/// Marčenko–Pastur law F_c with unit scale: density on [a, b] = [(1−√c)², (1+√c)²]
/// plus an atom of mass 1 − 1/c at zero when c > 1.
class MpModel {
 public:
  explicit MpModel(double c);

  double c() const noexcept { return c_; }
  double lower_edge() const noexcept { return a_; }
  double upper_edge() const noexcept { return b_; }
  double point_mass_at_zero() const noexcept { return c_ > 1.0 ? 1.0 - 1.0 / c_ : 0.0; }

 private:
  double c_;
  double a_;
  double b_;
};

/// m(z), m̲(z) and their derivatives at one point z.
struct StieltjesPair {
  cplx z;
  cplx m;
  cplx m_under;
  cplx m_prime;
  cplx m_under_prime;
};

double mp_density(const MpModel& model, double x);

/// ∫ f dF_c including the atom at zero. Adaptive Gauss–Kronrod after the substitution
/// x = ((a+b) + (b−a) sin θ)/2, which removes the square-root edge behaviour.
double mp_integral(const MpModel& model, const TestFunction& f);

/// Closed-form Stieltjes transform of F_c and of its companion law.
/// Root of c z m² + (z + c − 1) m + 1 = 0 on the Herglotz branch; real z outside the
/// support takes the limit from the upper half plane.
StieltjesPair stieltjes(const MpModel& model, cplx z);

}  // namespace corrlss
