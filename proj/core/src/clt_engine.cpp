#include "corrlss/clt_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "corrlss/error.hpp"

namespace corrlss {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kTwoPiI{0.0, 2.0 * std::numbers::pi};
constexpr double kMagnitudeGuard = 1e12;
constexpr int kMaxSingleLevel = 7;
constexpr int kMaxDoubleLevel = 3;
// Below this the plug-in spectrum is treated as touching zero.
constexpr double kZeroEigenvalue = 1e-10;

bool converged(cplx current, cplx previous, double tol) {
  return std::abs(current - previous) <= tol * std::max(1.0, std::abs(current));
}

void guard(cplx value, cplx z) {
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()) ||
      std::abs(value) > kMagnitudeGuard) {
    throw Error(Errc::SingularityNearContour,
                "integrand magnitude exceeds 1e12 at z = (" + std::to_string(z.real()) + ", " +
                    std::to_string(z.imag()) + ")");
  }
}

// Sums (1/2πi)∮ f(z)·kernel_k(z) dz for K kernels at once, doubling the node count until two
// successive levels agree to the contour's refinement tolerance.
template <std::size_t K, typename Kernel>
std::array<cplx, K> integrate_single(const TestFunction& f, const StieltjesSource& source,
                                     const ContourSpec& contour, Symmetry symmetry,
                                     Kernel&& kernel, int* levels_used) {
  const SingularSet singular = source.singular_set();
  check_encloses(contour, singular);
  const bool upper = symmetry == Symmetry::UpperHalf;
  std::array<cplx, K> previous{};
  for (int level = 0; level <= kMaxSingleLevel; ++level) {
    std::array<cplx, K> sums{};
    for (const ContourNode& node : contour_nodes(contour, singular, level, upper)) {
      const StieltjesPair sp = source(node.z);
      const cplx fz = f(node.z);
      const std::array<cplx, K> values = kernel(sp);
      for (std::size_t k = 0; k < K; ++k) {
        const cplx term = fz * values[k];
        guard(term, node.z);
        sums[k] += term * node.weight;
      }
    }
    for (auto& s : sums) {
      if (upper) s = s - std::conj(s);
      s /= kTwoPiI;
    }
    if (level > 0) {
      bool done = true;
      for (std::size_t k = 0; k < K; ++k) {
        done = done && converged(sums[k], previous[k], contour.refinement_tolerance);
      }
      if (done) {
        if (levels_used) *levels_used = level;
        return sums;
      }
    }
    previous = sums;
  }
  throw Error(Errc::NonConvergent, "contour quadrature did not settle after " +
                                       std::to_string(kMaxSingleLevel) + " refinements");
}

struct NodeValues {
  cplx weighted_f;  // f(z)·w
  StieltjesPair sp;
};

std::vector<NodeValues> node_values(const TestFunction& f, const StieltjesSource& source,
                                    const ContourSpec& contour, const SingularSet& singular,
                                    int level) {
  std::vector<NodeValues> out;
  for (const ContourNode& node : contour_nodes(contour, singular, level)) {
    const StieltjesPair sp = source(node.z);
    const cplx fz = f(node.z);
    guard(fz * sp.m_prime, node.z);
    guard(fz * sp.m_under_prime, node.z);
    out.push_back({fz * node.weight, sp});
  }
  return out;
}

}  // namespace

void MomentParams::validate() const {
  if (!(c > 0.0)) throw Error(Errc::InvalidArgument, "c must be positive");
  if (!(kappa >= 1.0)) {
    throw Error(Errc::InvalidArgument, "kappa must be >= 1, got " + std::to_string(kappa));
  }
  if (std::abs(psi) > 1.0 + 1e-12) throw Error(Errc::InvalidArgument, "|psi| must be <= 1");
}

// --- StieltjesSource -------------------------------------------------------------------------

StieltjesSource StieltjesSource::closed_form(const MpModel& model) {
  return StieltjesSource(MomentSource::ClosedForm, model.c());
}

StieltjesSource StieltjesSource::plug_in(const CorrelationSpectrum& spectrum) {
  if (spectrum.eigenvalues.empty() || spectrum.p < 1 || spectrum.n < 1) {
    throw Error(Errc::InvalidArgument, "plug-in source needs a computed spectrum");
  }
  StieltjesSource out(MomentSource::PlugIn, spectrum.c_n);
  out.eigenvalues_ = spectrum.eigenvalues;
  std::sort(out.eigenvalues_.begin(), out.eigenvalues_.end());
  out.singular_set();
  return out;
}

StieltjesPair StieltjesSource::operator()(cplx z) const {
  if (kind_ == MomentSource::ClosedForm) return stieltjes(model_, z);
  if (z.imag() == 0.0 && z.real() >= eigenvalues_.front() && z.real() <= eigenvalues_.back()) {
    throw Error(Errc::OnSupport, "plug-in resolvent evaluated on the observed spectrum");
  }
  cplx first{};
  cplx second{};
  for (double lambda : eigenvalues_) {
    const cplx r = 1.0 / (lambda - z);
    first += r;
    second += r * r;
  }
  const double p = static_cast<double>(eigenvalues_.size());
  StieltjesPair out;
  out.z = z;
  out.m = first / p;
  out.m_prime = second / p;
  // (1/n)tr(B̲ − z)⁻¹ = −(1 − p/n)/z + (p/n)(1/p)tr(B − z)⁻¹ exactly: B̲ = YᵀY shares the
  // nonzero spectrum of B and carries n − p extra zeros.
  out.m_under = -(1.0 - c_) / z + c_ * out.m;
  out.m_under_prime = (1.0 - c_) / (z * z) + c_ * out.m_prime;
  return out;
}

SingularSet StieltjesSource::singular_set() const {
  SingularSet s;
  s.zero = true;
  if (kind_ == MomentSource::ClosedForm) {
    s.lo = c_ >= 1.0 ? 0.0 : model_.lower_edge();
    s.hi = model_.upper_edge();
    return s;
  }
  s.lo = eigenvalues_.front();
  s.hi = eigenvalues_.back();
  if (c_ >= 1.0) {
    s.lo = std::min(s.lo, 0.0);
  } else if (s.lo <= kZeroEigenvalue) {
    throw Error(Errc::SingularityNearContour,
                "plug-in spectrum reaches zero although p < n; no contour separates it from the "
                "origin");
  }
  return s;
}

ContourSpec StieltjesSource::fitted_contour() const {
  ContourSpec contour = default_contour(c_);
  if (kind_ == MomentSource::ClosedForm) return contour;
  const SingularSet s = singular_set();
  contour.x_right = std::max(contour.x_right, s.hi + 1.0);
  if (c_ < 1.0) {
    contour.x_left = std::min(contour.x_left, 0.5 * s.lo);
  } else {
    contour.x_left = std::min(contour.x_left, s.lo - 0.5);
  }
  return contour;
}

// --- single contour --------------------------------------------------------------------------

double contour_lss_identity(const TestFunction& f, const StieltjesSource& source,
                            const ContourSpec& contour, Symmetry symmetry) {
  const auto sums = integrate_single<1>(
      f, source, contour, symmetry, [](const StieltjesPair& sp) { return std::array{sp.m}; },
      nullptr);
  return -sums[0].real();
}

cplx MeanTerms::value(double kappa) const {
  cplx out = (kappa - 1.0) * fourth_moment - (kappa - psi_abs2 - 2.0) * pseudo_variance -
             companion_ratio + mixed + trace;
  if (var_case == VariableCase::Complex) out -= complex_correction;
  return out;
}

// T_n(a0) ≡ 0, so the constant term is dropped before the mean integrals.
static TestFunction without_constant(const TestFunction& f) {
  if (!f.is_polynomial() || f.coefficients().empty() || f.coefficients()[0] == 0.0) return f;
  std::vector<double> coeffs(f.coefficients().begin(), f.coefficients().end());
  coeffs[0] = 0.0;
  return TestFunction::polynomial(std::move(coeffs));
}

MeanTerms mean_terms(const TestFunction& f_in, const StieltjesSource& source,
                     const ContourSpec& contour, double psi_abs2, VariableCase var_case,
                     Symmetry symmetry) {
  const TestFunction f = without_constant(f_in);
  const double c = source.c();
  const bool complex_case = var_case == VariableCase::Complex;
  auto kernel = [c, psi_abs2, complex_case](const StieltjesPair& sp) {
    const cplx z = sp.z;
    const cplx m = sp.m;
    const cplx mu = sp.m_under;
    const cplx mup = sp.m_under_prime;
    const cplx u = z * (1.0 + mu);
    const cplx d = (u - c) * (u - c) - c;
    const cplx w = u + 1.0 - c;
    const cplx one_cm = 1.0 + c * m;
    std::array<cplx, 6> k;
    k[0] = c * mu * w / (d * (u - c));
    k[1] = c * z * mu * m * m * (1.0 + mu) * w / (d * one_cm);
    k[2] = c * mup * w / (mu * (z + z * mu - c) * d);
    k[3] = c * (1.0 + z * mu - z * m * mu - z * z * m * mu * mu) * (1.0 + mu) * w /
           (z * one_cm * d);
    k[4] = c * m / z - c * z * m * mup;
    if (complex_case) {
      const cplx a = z * mup / ((1.0 + mu) * (z + z * mu - c));
      const cplx b = c * psi_abs2 * m * m / (one_cm * (one_cm * one_cm - c * psi_abs2 * m * m));
      const cplx lead = -c * (1.0 + mu) * w / (z * mu * d);
      k[5] = (a - b) * lead;
    } else {
      k[5] = 0.0;
    }
    return k;
  };
  MeanTerms out;
  const auto sums = integrate_single<6>(f, source, contour, symmetry, kernel, &out.levels_used);
  out.fourth_moment = sums[0];
  out.pseudo_variance = sums[1];
  out.companion_ratio = sums[2];
  out.mixed = sums[3];
  out.trace = sums[4];
  out.complex_correction = sums[5];
  out.psi_abs2 = complex_case ? psi_abs2 : 1.0;
  out.var_case = var_case;
  return out;
}

Estimate asymptotic_mean(const TestFunction& f, const StieltjesSource& source,
                         const MomentParams& params, const ContourSpec& contour,
                         Symmetry symmetry) {
  params.validate();
  if (source.kind() == MomentSource::ClosedForm || source.c() >= 1.0) {
    f.check_admissible(source.c());
  }
  const cplx value = mean_terms(f, source, contour, params.psi_abs2(), params.var_case, symmetry)
                         .value(params.kappa);
  return {value.real(), value.imag()};
}

// --- double contour --------------------------------------------------------------------------

cplx CovarianceTerms::value(double kappa) const {
  const double four_pi2 = 4.0 * kPi * kPi;
  cplx out = -coupled / (2.0 * kPi * kPi) + (kappa - 1.0) / four_pi2 * fourth_moment -
             (kappa - psi_abs2 - 2.0) / four_pi2 * pseudo_variance;
  if (var_case == VariableCase::Complex) {
    out += coupled / four_pi2 - psi_abs2 / four_pi2 * complex_coupled;
  }
  return out;
}

CovarianceTerms covariance_terms(const TestFunction& f_j, const TestFunction& f_r,
                                 const StieltjesSource& source, const ContourSpec& outer,
                                 const ContourSpec& inner, double psi_abs2,
                                 VariableCase var_case) {
  if (!strictly_nested(outer, inner)) {
    throw Error(Errc::ContoursIntersect, "covariance contours must be strictly nested");
  }
  const SingularSet singular = source.singular_set();
  check_encloses(outer, singular);
  check_encloses(inner, singular);
  const double c = source.c();
  const bool complex_case = var_case == VariableCase::Complex;
  const double tol = std::min(outer.refinement_tolerance, inner.refinement_tolerance);

  auto separable = [](const std::vector<NodeValues>& nodes) {
    cplx fourth{};
    cplx pseudo{};
    for (const auto& nv : nodes) {
      const StieltjesPair& sp = nv.sp;
      const cplx one_mu = 1.0 + sp.m_under;
      fourth += nv.weighted_f * sp.m_under_prime / (one_mu * one_mu);
      pseudo += nv.weighted_f * (sp.m * sp.m_under + sp.z * sp.m * sp.m_under_prime +
                                 sp.z * sp.m_prime * sp.m_under);
    }
    return std::pair{fourth, pseudo};
  };

  CovarianceTerms previous;
  for (int level = 0; level <= kMaxDoubleLevel; ++level) {
    const auto first = node_values(f_j, source, outer, singular, level);
    const auto second = node_values(f_r, source, inner, singular, level);
    CovarianceTerms terms;
    terms.psi_abs2 = complex_case ? psi_abs2 : 1.0;
    terms.var_case = var_case;
    terms.levels_used = level;
    cplx coupled{};
    cplx complex_coupled{};
    for (const auto& a : first) {
      const cplx m1 = a.sp.m;
      const cplx lead = a.weighted_f * c * a.sp.m_prime;
      cplx row{};
      cplx row_complex{};
      for (const auto& b : second) {
        const cplx m2 = b.sp.m;
        const cplx num = b.weighted_f * b.sp.m_prime;
        const cplx den = 1.0 + c * (m1 + m2) + c * (c - 1.0) * m1 * m2;
        row += num / (den * den);
        if (complex_case) {
          const cplx den_c = (1.0 + c * m1) * (1.0 + c * m2) - c * psi_abs2 * m1 * m2;
          row_complex += num / (den_c * den_c);
        }
      }
      coupled += lead * row;
      complex_coupled += lead * row_complex;
    }
    const auto [fourth1, pseudo1] = separable(first);
    const auto [fourth2, pseudo2] = separable(second);
    terms.coupled = coupled;
    terms.complex_coupled = complex_coupled;
    terms.fourth_moment = c * fourth1 * fourth2;
    terms.pseudo_variance = c * pseudo1 * pseudo2;
    if (level > 0 && converged(terms.coupled, previous.coupled, tol) &&
        converged(terms.complex_coupled, previous.complex_coupled, tol) &&
        converged(terms.fourth_moment, previous.fourth_moment, tol) &&
        converged(terms.pseudo_variance, previous.pseudo_variance, tol)) {
      return terms;
    }
    previous = terms;
  }
  throw Error(Errc::NonConvergent, "double contour quadrature did not settle after " +
                                       std::to_string(kMaxDoubleLevel) + " refinements");
}

Estimate asymptotic_covariance(const TestFunction& f_j, const TestFunction& f_r,
                               const StieltjesSource& source, const MomentParams& params,
                               const ContourSpec& c1, const ContourSpec& c2) {
  params.validate();
  if (source.kind() == MomentSource::ClosedForm || source.c() >= 1.0) {
    f_j.check_admissible(source.c());
    f_r.check_admissible(source.c());
  }
  const cplx value =
      covariance_terms(f_j, f_r, source, c1, c2, params.psi_abs2(), params.var_case)
          .value(params.kappa);
  return {value.real(), value.imag()};
}

// --- parameters ------------------------------------------------------------------------------

MomentParams estimate_kappa_psi(const DataMatrix& data) {
  if (data.n() < 4) throw Error(Errc::DimensionTooSmall, "kappa estimation needs n >= 4");
  const Eigen::MatrixXd& x = data.values();
  double total = 0.0;
  for (Index i = 0; i < x.rows(); ++i) {
    const Eigen::ArrayXd centred = (x.row(i).array() - x.row(i).mean()).transpose();
    const Eigen::ArrayXd sq = centred.square();
    const double m2 = sq.mean();
    if (!(m2 > 0.0)) {
      throw Error(Errc::ConstantRow, "row " + std::to_string(i) + " has zero sample variance");
    }
    total += sq.square().mean() / (m2 * m2);
  }
  MomentParams out;
  out.c = static_cast<double>(data.p()) / static_cast<double>(data.n());
  out.kappa = std::max(1.0, total / static_cast<double>(x.rows()));
  out.psi = 1.0;
  out.var_case = VariableCase::Real;
  return out;
}

// --- MomentTerms -----------------------------------------------------------------------------

MomentTerms::MomentTerms(const TestFunction& f, const StieltjesSource& source, double psi_abs2,
                         VariableCase var_case)
    : source_(source.kind()), c_(source.c()) {
  if (source.kind() == MomentSource::ClosedForm || source.c() >= 1.0) {
    f.check_admissible(source.c());
  }
  contour_ = source.fitted_contour();
  inner_ = inner_contour(contour_, source.singular_set());
  mean_ = mean_terms(f, source, contour_, psi_abs2, var_case);
  covariance_ = covariance_terms(f, f, source, contour_, inner_, psi_abs2, var_case);
}

CltMoments MomentTerms::evaluate(const MomentParams& params) const {
  params.validate();
  if (params.var_case != mean_.var_case) {
    throw Error(Errc::InvalidArgument, "moment terms were integrated for a different case");
  }
  if (params.var_case == VariableCase::Complex &&
      std::abs(params.psi_abs2() - mean_.psi_abs2) > 1e-12) {
    throw Error(Errc::InvalidArgument, "moment terms were integrated for a different |psi|");
  }
  CltMoments out;
  const cplx mean = mean_.value(params.kappa);
  const cplx variance = covariance_.value(params.kappa);
  out.mean = mean.real();
  out.mean_imag = mean.imag();
  out.variance = variance.real();
  out.variance_imag = variance.imag();
  out.params = params;
  out.params.c = c_;
  if (out.params.var_case == VariableCase::Real) out.params.psi = 1.0;
  out.source = source_;
  out.contour = contour_;
  out.inner_contour = inner_;
  return out;
}

CltMoments compute_moments(const TestFunction& f, const StieltjesSource& source,
                           const MomentParams& params) {
  return MomentTerms(f, source, params.psi_abs2(), params.var_case).evaluate(params);
}

}  // namespace corrlss
