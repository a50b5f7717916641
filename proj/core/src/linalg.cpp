#include "quickdetect/linalg.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "quickdetect/errors.hpp"

namespace quickdetect {

Matrix companion_matrix(const Vector& coefficients) {
  const auto p = coefficients.size();
  if (p == 0) throw ParameterError("companion matrix of an empty coefficient vector");
  Matrix m = Matrix::Zero(p, p);
  m.row(0) = coefficients.transpose();
  for (Eigen::Index i = 1; i < p; ++i) m(i, i - 1) = 1.0;
  return m;
}

double spectral_radius(const Matrix& m) {
  if (m.rows() != m.cols()) throw ParameterError("spectral radius of a non-square matrix");
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1) return std::abs(m(0, 0));
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw ParameterError("eigenvalue computation failed");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix unflatten_square(const Vector& row_major) {
  const auto p = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(row_major.size()))));
  if (p * p != row_major.size())
    throw ParameterError("expected p*p entries for a square matrix, got " +
                         std::to_string(row_major.size()));
  Matrix m(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) m(i, j) = row_major(i * p + j);
  return m;
}

Vector flatten_row_major(const Matrix& m) {
  Vector v(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  return v;
}

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

}  // namespace quickdetect
