#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "corrlss/contour.hpp"
#include "corrlss/matrix_core.hpp"
#include "corrlss/mp_law.hpp"
#include "corrlss/test_function.hpp"

namespace corrlss {

enum class VariableCase { Real, Complex };
enum class MomentSource { ClosedForm, PlugIn };

/// Population constants entering the CLT: κ (normalized fourth moment), ψ = E(X−EX)²/E|X−EX|².
struct MomentParams {
  double c = 1.0;
  double kappa = 3.0;
  cplx psi = 1.0;
  VariableCase var_case = VariableCase::Real;

  /// κ ≥ 1, |ψ| ≤ 1, ψ = 1 in the real case.
  void validate() const;
  double psi_abs2() const { return var_case == VariableCase::Real ? 1.0 : std::norm(psi); }
};

/// A real-valued contour result and the imaginary part left over by quadrature.
struct Estimate {
  double value = 0.0;
  double imag_residue = 0.0;
};

/// Evaluator of m(z), m̲(z), m′(z), m̲′(z): either the closed-form M-P transforms at c, or the
/// resolvent traces (1/p)tr(B_n − z)⁻¹, (1/n)tr(B̲_n − z)⁻¹ of one observed spectrum.
class StieltjesSource {
 public:
  static StieltjesSource closed_form(const MpModel& model);
  static StieltjesSource plug_in(const CorrelationSpectrum& spectrum);

  MomentSource kind() const noexcept { return kind_; }
  double c() const noexcept { return c_; }
  StieltjesPair operator()(cplx z) const;

  SingularSet singular_set() const;
  /// default_contour(c) widened where needed to enclose the singular set.
  ContourSpec fitted_contour() const;

 private:
  StieltjesSource(MomentSource kind, double c) : kind_(kind), c_(c), model_(c) {}

  MomentSource kind_;
  double c_;
  MpModel model_;
  std::vector<double> eigenvalues_;
};

enum class Symmetry {
  Full,       // integrate the whole rectangle
  UpperHalf,  // integrate Im z ≥ 0 and close with k(z̄) = conj k(z)
};

/// −(1/2πi)∮ f(z) m(z) dz, refined by node doubling until two successive levels agree.
double contour_lss_identity(const TestFunction& f, const StieltjesSource& source,
                            const ContourSpec& contour, Symmetry symmetry = Symmetry::Full);

/// The contour integrals of the asymptotic mean, each already divided by 2πi.
/// Combined with κ and ψ by value().
struct MeanTerms {
  cplx fourth_moment;     // multiplies (κ − 1)
  cplx pseudo_variance;   // multiplies −(κ − |ψ|² − 2)
  cplx companion_ratio;   // enters with a minus sign
  cplx mixed;             // 1 + z m̲ − z m m̲ − z² m m̲² term
  cplx trace;             // c m/z − c z m m̲′ term
  cplx complex_correction;  // subtracted in the complex case; zero otherwise
  double psi_abs2 = 1.0;
  VariableCase var_case = VariableCase::Real;
  int levels_used = 0;

  cplx value(double kappa) const;
};

MeanTerms mean_terms(const TestFunction& f, const StieltjesSource& source,
                     const ContourSpec& contour, double psi_abs2, VariableCase var_case,
                     Symmetry symmetry = Symmetry::Full);

/// Double-contour integrals of the asymptotic covariance (without the −1/2π², 1/4π² factors).
struct CovarianceTerms {
  cplx coupled;           // c m′(z1)m′(z2)/(1 + c(m1+m2) + c(c−1)m1m2)²
  cplx fourth_moment;     // c m̲′(z1)m̲′(z2)/((1+m̲1)²(1+m̲2)²)
  cplx pseudo_variance;   // V(c, m(z1), m(z2))
  cplx complex_coupled;   // c m′1 m′2/((1+cm1)(1+cm2) − c|ψ|² m1 m2)²; complex case only
  double psi_abs2 = 1.0;
  VariableCase var_case = VariableCase::Real;
  int levels_used = 0;

  cplx value(double kappa) const;
};

CovarianceTerms covariance_terms(const TestFunction& f_j, const TestFunction& f_r,
                                 const StieltjesSource& source, const ContourSpec& outer,
                                 const ContourSpec& inner, double psi_abs2,
                                 VariableCase var_case);

Estimate asymptotic_mean(const TestFunction& f, const StieltjesSource& source,
                         const MomentParams& params, const ContourSpec& contour,
                         Symmetry symmetry = Symmetry::Full);

/// Throws Error(ContoursIntersect) unless c1 and c2 are strictly nested.
Estimate asymptotic_covariance(const TestFunction& f_j, const TestFunction& f_r,
                               const StieltjesSource& source, const MomentParams& params,
                               const ContourSpec& c1, const ContourSpec& c2);

/// Plug-in κ̂ = (1/p)Σ_i m4_i/m2_i² clamped below at 1, with ψ = 1 and the real case.
MomentParams estimate_kappa_psi(const DataMatrix& data);

/// Asymptotic mean and variance of T_n(f).
struct CltMoments {
  double mean = 0.0;
  double variance = 0.0;
  double mean_imag = 0.0;
  double variance_imag = 0.0;
  MomentParams params;
  MomentSource source = MomentSource::ClosedForm;
  ContourSpec contour;
  ContourSpec inner_contour;
};

/// Pre-integrated terms for one (f, source); cheap to re-evaluate for any κ.
class MomentTerms {
 public:
  MomentTerms(const TestFunction& f, const StieltjesSource& source, double psi_abs2 = 1.0,
              VariableCase var_case = VariableCase::Real);

  CltMoments evaluate(const MomentParams& params) const;

  const MeanTerms& mean() const noexcept { return mean_; }
  const CovarianceTerms& covariance() const noexcept { return covariance_; }

 private:
  MomentSource source_;
  double c_;
  ContourSpec contour_;
  ContourSpec inner_;
  MeanTerms mean_;
  CovarianceTerms covariance_;
};

/// Convenience: fitted contours, mean and variance of T_n(f) for the given parameters.
CltMoments compute_moments(const TestFunction& f, const StieltjesSource& source,
                           const MomentParams& params);

}  // namespace corrlss
