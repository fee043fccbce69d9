#include "corrlss/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "corrlss/error.hpp"

namespace corrlss {

namespace {

// Relative threshold under which a centred row is treated as constant.
constexpr double kConstantRowTolerance = 1e-13;

double centred_norm_threshold(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  const double scale = row.cwiseAbs().maxCoeff();
  return kConstantRowTolerance * scale * std::sqrt(static_cast<double>(row.size()));
}

}  // namespace

DataMatrix::DataMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() < 2 || values_.cols() < 2) {
    throw Error(Errc::DimensionTooSmall, "need p >= 2 and n >= 2, got p = " +
                                             std::to_string(values_.rows()) +
                                             ", n = " + std::to_string(values_.cols()));
  }
  if (!values_.allFinite()) throw Error(Errc::InvalidArgument, "data contains non-finite values");
  for (Index i = 0; i < values_.rows(); ++i) {
    const Eigen::RowVectorXd centred = values_.row(i).array() - values_.row(i).mean();
    if (centred.norm() <= centred_norm_threshold(values_.row(i))) {
      throw Error(Errc::ConstantRow, "row " + std::to_string(i) + " has zero sample variance");
    }
  }
}

Eigen::MatrixXd normalized_rows(const DataMatrix& data) {
  Eigen::MatrixXd y = data.values();
  y.colwise() -= y.rowwise().mean();
  for (Index i = 0; i < y.rows(); ++i) {
    const double norm = y.row(i).norm();
    if (norm <= centred_norm_threshold(data.values().row(i))) {
      throw Error(Errc::ConstantRow, "row " + std::to_string(i) + " has zero sample variance");
    }
    y.row(i) /= norm;
  }
  return y;
}

Eigen::MatrixXd sample_correlation(const DataMatrix& data) {
  const Eigen::MatrixXd y = normalized_rows(data);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(y.rows(), y.rows());
  b.selfadjointView<Eigen::Lower>().rankUpdate(y);
  // Mirroring the computed triangle makes B exactly symmetric.
  b.triangularView<Eigen::StrictlyUpper>() = b.transpose();
  return b;
}

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& symmetric, bool with_vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      symmetric, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::NonConvergent, "symmetric eigensolver did not converge");
  }
  SymmetricEigen out;
  out.values = solver.eigenvalues();
  if (with_vectors) out.vectors = solver.eigenvectors();
  return out;
}

CorrelationSpectrum correlation_matrix(const DataMatrix& data) {
  CorrelationSpectrum out;
  out.b = sample_correlation(data);
  const SymmetricEigen eig = symmetric_eigen(out.b, false);
  out.eigenvalues.assign(eig.values.data(), eig.values.data() + eig.values.size());
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  out.p = data.p();
  out.n = data.n();
  out.c_n = static_cast<double>(data.p()) / static_cast<double>(data.n());
  return out;
}

double esd_eval(const CorrelationSpectrum& spectrum, double x) {
  if (spectrum.eigenvalues.empty()) return 0.0;
  const auto count = std::upper_bound(spectrum.eigenvalues.begin(), spectrum.eigenvalues.end(), x) -
                     spectrum.eigenvalues.begin();
  return static_cast<double>(count) / static_cast<double>(spectrum.eigenvalues.size());
}

std::complex<double> companion_resolvent_form(const DataMatrix& data, std::complex<double> z) {
  if (z.imag() == 0.0) throw Error(Errc::RealShift, "companion resolvent needs Im z != 0");
  const Eigen::MatrixXd y = normalized_rows(data);
  const Index n = y.cols();
  Eigen::MatrixXcd shifted = (y.transpose() * y).cast<std::complex<double>>();
  shifted.diagonal().array() -= z;
  const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(n);
  const Eigen::VectorXcd solution = shifted.partialPivLu().solve(ones);
  return solution.sum() / static_cast<double>(n);
}

}  // namespace corrlss
