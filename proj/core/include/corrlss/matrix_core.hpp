#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace corrlss {

using Index = Eigen::Index;

/// p×n real observations: rows are variables, columns are samples.
/// Construction rejects p < 2, n < 2, non-finite entries and constant rows.
class DataMatrix {
 public:
  explicit DataMatrix(Eigen::MatrixXd values);

  Index p() const noexcept { return values_.rows(); }
  Index n() const noexcept { return values_.cols(); }
  const Eigen::MatrixXd& values() const noexcept { return values_; }

  DataMatrix transposed() const { return DataMatrix(values_.transpose()); }

 private:
  Eigen::MatrixXd values_;
};

/// Sample correlation matrix B_n with its ascending eigenvalues.
struct CorrelationSpectrum {
  Eigen::MatrixXd b;
  std::vector<double> eigenvalues;
  double c_n = 0.0;
  Index p = 0;
  Index n = 0;
};

/// Y_n as a p×n matrix: every row centred by its own mean and scaled to unit norm.
Eigen::MatrixXd normalized_rows(const DataMatrix& data);

/// B_n = Y Yᵀ from one triangle mirrored onto the other, so exactly symmetric. No eigendecomposition.
Eigen::MatrixXd sample_correlation(const DataMatrix& data);

CorrelationSpectrum correlation_matrix(const DataMatrix& data);

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns; empty unless requested
};

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& symmetric, bool with_vectors);

/// F^{B_n}(x): fraction of eigenvalues ≤ x.
double esd_eval(const CorrelationSpectrum& spectrum, double x);

/// (1/n)·1ᵀ(YᵀY − zI_n)⁻¹1 by a dense complex solve. Throws Error(RealShift) if Im z = 0.
std::complex<double> companion_resolvent_form(const DataMatrix& data, std::complex<double> z);

}  // namespace corrlss
