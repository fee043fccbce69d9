#include <cmath>

#include <gtest/gtest.h>

#include "corrlss/clt_engine.hpp"
#include "corrlss/error.hpp"
#include "support.hpp"

using namespace corrlss;
using corrlss::testing::gaussian;

namespace {

StieltjesSource closed(double c) { return StieltjesSource::closed_form(MpModel(c)); }

MomentParams real_params(double c, double kappa = 3.0) {
  MomentParams p;
  p.c = c;
  p.kappa = kappa;
  return p;
}

double mean_of(const TestFunction& f, double c, double kappa = 3.0) {
  const auto source = closed(c);
  return asymptotic_mean(f, source, real_params(c, kappa), source.fitted_contour()).value;
}

double cov_of(const TestFunction& f, const TestFunction& g, double c, double kappa = 3.0) {
  const auto source = closed(c);
  const auto outer = source.fitted_contour();
  const auto inner = inner_contour(outer, source.singular_set());
  return asymptotic_covariance(f, g, source, real_params(c, kappa), outer, inner).value;
}

const TestFunction kCube = TestFunction::polynomial({0, 0, 0, 1});

}  // namespace

TEST(MomentParams, Validation) {
  EXPECT_NO_THROW(real_params(0.5).validate());
  EXPECT_THROW(real_params(0.5, 0.5).validate(), Error);
  MomentParams p = real_params(0.5);
  p.var_case = VariableCase::Complex;
  p.psi = cplx(0.9, 0.9);
  EXPECT_THROW(p.validate(), Error);
  EXPECT_DOUBLE_EQ(real_params(1.0).psi_abs2(), 1.0);
}

TEST(ContourIdentity, ReproducesMpIntegralsForPolynomials) {
  const TestFunction fs[] = {TestFunction::constant(1.0), TestFunction::polynomial({0, 1}),
                             TestFunction::square(), kCube, TestFunction::schott()};
  for (double c : {0.25, 1.0, 2.0}) {
    const auto source = closed(c);
    for (const auto& f : fs) {
      const double contour = contour_lss_identity(f, source, source.fitted_contour());
      EXPECT_NEAR(contour, mp_integral(MpModel(c), f), 1e-8) << f.name() << " c=" << c;
    }
  }
}

TEST(ContourIdentity, IndependentOfTheContour) {
  for (double c : {0.25, 1.0}) {
    const auto source = closed(c);
    const auto k1 = source.fitted_contour();
    auto k2 = k1;
    k2.height = 2.0;
    k2.x_right += 0.5;
    for (const auto& f : {TestFunction::square(), kCube}) {
      const double a = contour_lss_identity(f, source, k1);
      const double b = contour_lss_identity(f, source, k2);
      EXPECT_LE(std::abs(a - b), 1e-6 * std::abs(a));
    }
  }
}

TEST(ContourIdentity, UpperHalfEqualsFullContour) {
  const auto source = closed(0.6);
  const auto k = source.fitted_contour();
  for (const auto& f : {TestFunction::square(), kCube, TestFunction::log()}) {
    EXPECT_NEAR(contour_lss_identity(f, source, k, Symmetry::UpperHalf),
                contour_lss_identity(f, source, k, Symmetry::Full), 1e-9);
  }
}

TEST(ContourIdentity, PlugInTraceIsOne) {
  for (auto [p, n] : {std::pair<Index, Index>{30, 60}, {60, 30}, {40, 40}}) {
    const auto spectrum = correlation_matrix(DataMatrix(gaussian(p, n, 21 + p)));
    const auto source = StieltjesSource::plug_in(spectrum);
    EXPECT_NEAR(contour_lss_identity(TestFunction::polynomial({0, 1}), source,
                                     source.fitted_contour()),
                1.0, 1e-6);
    double second = 0.0;
    for (double l : spectrum.eigenvalues) second += l * l;
    EXPECT_NEAR(contour_lss_identity(TestFunction::square(), source, source.fitted_contour()),
                second / static_cast<double>(p), 1e-6);
  }
}

TEST(AsymptoticMean, ConstantFunctionHasZeroMean) {
  for (double c : {0.3, 1.0, 2.0}) EXPECT_NEAR(mean_of(TestFunction::constant(2.5), c), 0.0, 1e-8);
}

TEST(AsymptoticMean, SquareMatchesExactGaussianLimit) {
  // E tr B² = p + p(p−1)/(n−1) for Gaussian rows, so E T_n(x²) → c(c − 1).
  for (double c : {0.2, 0.5, 1.0, 1.5, 3.0}) {
    EXPECT_NEAR(mean_of(TestFunction::square(), c), c * (c - 1.0), 1e-8) << c;
    EXPECT_NEAR(mean_of(TestFunction::schott(), c), c * (c - 1.0), 1e-8) << c;
  }
}

TEST(AsymptoticMean, MatchesIndependentEvaluationOfTheKernels) {
  // Values from an independent NumPy evaluation of the same five contour integrals.
  EXPECT_NEAR(mean_of(kCube, 0.5), -1.25, 1e-8);
  EXPECT_NEAR(mean_of(kCube, 0.5, 4.0), -1.25, 1e-8);
  EXPECT_NEAR(mean_of(kCube, 2.0), -2.0, 1e-8);
  EXPECT_NEAR(mean_of(TestFunction::log(), 0.5), -0.08527922916007069, 1e-8);
}

TEST(AsymptoticMean, IndependentOfTheContour) {
  for (double c : {0.3, 1.0, 2.0}) {
    const auto source = closed(c);
    const auto k1 = source.fitted_contour();
    auto k2 = k1;
    k2.height = 2.0;
    k2.x_right += 0.5;
    for (const auto& f : {TestFunction::square(), kCube}) {
      const auto a = asymptotic_mean(f, source, real_params(c), k1);
      const auto b = asymptotic_mean(f, source, real_params(c), k2);
      EXPECT_LE(std::abs(a.value - b.value), 1e-6 * std::max(std::abs(a.value), 1e-3))
          << f.name() << " c=" << c;
      EXPECT_LE(std::abs(a.imag_residue), 1e-6 * std::max(std::abs(a.value), 1.0));
    }
  }
}

TEST(AsymptoticMean, UpperHalfEqualsFullContour) {
  const auto source = closed(0.5);
  for (const auto& f : {TestFunction::square(), kCube, TestFunction::log()}) {
    const auto full = asymptotic_mean(f, source, real_params(0.5), source.fitted_contour());
    const auto half = asymptotic_mean(f, source, real_params(0.5), source.fitted_contour(),
                                      Symmetry::UpperHalf);
    EXPECT_NEAR(full.value, half.value, 1e-9);
  }
}

TEST(AsymptoticCovariance, MatchesExactAndOracleValues) {
  for (double c : {0.2, 0.5, 1.0, 2.0}) {
    EXPECT_NEAR(cov_of(TestFunction::square(), TestFunction::square(), c), 4.0 * c * c, 1e-7);
  }
  EXPECT_NEAR(cov_of(kCube, kCube, 0.5), 21.0, 1e-6);
  EXPECT_NEAR(cov_of(kCube, kCube, 2.0), 1344.0, 1e-5);
  EXPECT_NEAR(cov_of(TestFunction::square(), kCube, 0.5), 4.5, 1e-7);
  EXPECT_NEAR(cov_of(TestFunction::log(), TestFunction::log(), 0.5), 0.38629436111990745, 1e-7);
}

TEST(AsymptoticCovariance, SymmetricInItsArguments) {
  for (double c : {0.3, 1.0, 2.0}) {
    for (double kappa : {3.0, 5.0}) {
      EXPECT_NEAR(cov_of(TestFunction::square(), kCube, c, kappa),
                  cov_of(kCube, TestFunction::square(), c, kappa), 1e-8);
    }
  }
}

TEST(AsymptoticCovariance, ConstantFunctionHasZeroVariance) {
  EXPECT_NEAR(cov_of(TestFunction::constant(3.0), TestFunction::constant(3.0), 0.5), 0.0, 1e-8);
  EXPECT_NEAR(cov_of(TestFunction::constant(3.0), TestFunction::square(), 2.0), 0.0, 1e-8);
}

TEST(AsymptoticCovariance, PositiveForNonDegenerateFunctions) {
  for (double c : {0.2, 0.5, 1.0}) {
    EXPECT_GT(cov_of(TestFunction::square(), TestFunction::square(), c), 0.0);
    EXPECT_GT(cov_of(TestFunction::schott(), TestFunction::schott(), c), 0.0);
    if (c < 1.0) {
      EXPECT_GT(cov_of(TestFunction::log(), TestFunction::log(), c), 0.0);
    }
    // T_n(x) ≡ 0 by the trace identity, so its variance vanishes.
    const auto x = TestFunction::polynomial({0, 1});
    EXPECT_NEAR(cov_of(x, x, c), 0.0, 1e-8);
  }
}

TEST(AsymptoticCovariance, RejectsIntersectingContours) {
  const auto source = closed(0.5);
  const auto k = source.fitted_contour();
  try {
    asymptotic_covariance(TestFunction::square(), TestFunction::square(), source, real_params(0.5),
                          k, k);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ContoursIntersect);
  }
}

TEST(ComplexCase, GaussianLimits) {
  // Standard complex Gaussian entries: κ = 2, ψ = 0.
  for (double c : {0.5, 1.0, 2.0}) {
    MomentParams p;
    p.c = c;
    p.kappa = 2.0;
    p.psi = 0.0;
    p.var_case = VariableCase::Complex;
    const auto m = compute_moments(TestFunction::square(), closed(c), p);
    EXPECT_NEAR(m.mean, c * (c - 1.0), 1e-8);
    EXPECT_NEAR(m.variance, 2.0 * c * c, 1e-7);
  }
}

TEST(ComplexCase, PsiOneLeavesTheCovarianceUnchanged) {
  // At |ψ| = 1 the two extra covariance kernels share one denominator and cancel.
  MomentParams p = real_params(0.7);
  const auto real = compute_moments(kCube, closed(0.7), p);
  p.var_case = VariableCase::Complex;
  p.psi = 1.0;
  const auto complex = compute_moments(kCube, closed(0.7), p);
  EXPECT_NEAR(real.variance, complex.variance, 1e-7);
}

TEST(MomentTerms, CachedEvaluationMatchesDirectComputation) {
  const auto source = closed(0.5);
  const MomentTerms terms(kCube, source);
  for (double kappa : {1.0, 3.0, 7.0}) {
    const auto cached = terms.evaluate(real_params(0.5, kappa));
    const auto direct = compute_moments(kCube, source, real_params(0.5, kappa));
    EXPECT_DOUBLE_EQ(cached.mean, direct.mean);
    EXPECT_DOUBLE_EQ(cached.variance, direct.variance);
  }
}

TEST(Quadrature, DoublingTheNodesChangesLittle) {
  const auto source = closed(0.5);
  auto k = source.fitted_contour();
  const double a = contour_lss_identity(kCube, source, k);
  k.nodes_per_side *= 2;
  const double b = contour_lss_identity(kCube, source, k);
  EXPECT_LT(std::abs(a - b), k.refinement_tolerance);
}

TEST(PlugIn, AgreesWithClosedFormOnALargeDataset) {
  const DataMatrix data(gaussian(800, 800, 77));
  const auto spectrum = correlation_matrix(data);
  const MomentParams params = real_params(1.0);
  const auto plug = compute_moments(TestFunction::square(), StieltjesSource::plug_in(spectrum),
                                    params);
  const auto exact = compute_moments(TestFunction::square(), closed(1.0), params);
  EXPECT_LE(std::abs(plug.mean - exact.mean), 0.1 * std::abs(exact.mean) + 1e-8);
  EXPECT_LE(std::abs(plug.variance - exact.variance), 0.1 * std::abs(exact.variance));
}

TEST(PlugIn, SingularSpectrumBelowUnitRatioIsRejected) {
  Eigen::MatrixXd x = gaussian(10, 20, 8);
  x.row(9) = x.row(0);
  const auto spectrum = correlation_matrix(DataMatrix(x));
  try {
    StieltjesSource::plug_in(spectrum);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SingularityNearContour);
  }
}

TEST(KappaEstimate, GaussianRowsGiveThree) {
  int inside = 0;
  const int seeds = 40;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto p = estimate_kappa_psi(DataMatrix(gaussian(200, 2000, 900 + seed)));
    inside += p.kappa >= 2.85 && p.kappa <= 3.15;
    EXPECT_EQ(p.var_case, VariableCase::Real);
    EXPECT_EQ(p.psi, cplx(1.0));
  }
  EXPECT_GE(inside, 38);
}

TEST(KappaEstimate, RademacherRowsGiveOne) {
  const auto p = estimate_kappa_psi(DataMatrix(corrlss::testing::rademacher(50, 400, 4)));
  EXPECT_GE(p.kappa, 1.0);
  EXPECT_LE(p.kappa, 1.1);
}

TEST(KappaEstimate, NeedsFourSamples) {
  EXPECT_THROW(estimate_kappa_psi(DataMatrix(gaussian(3, 3, 1))), Error);
}
