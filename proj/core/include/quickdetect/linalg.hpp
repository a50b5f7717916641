#pragma once

#include <Eigen/Dense>

namespace quickdetect {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Companion matrix of x_n = c_1 x_{n-1} + ... + c_p x_{n-p}: first row holds
// the coefficients, ones on the subdiagonal.
Matrix companion_matrix(const Vector& coefficients);

double spectral_radius(const Matrix& m);

// Kronecker product with entry (i*q+k, j*r+l) = a(i,j) * b(k,l).
Matrix kronecker(const Matrix& a, const Matrix& b);

// p*p row-major vector -> p x p matrix, and back.
Matrix unflatten_square(const Vector& row_major);
Vector flatten_row_major(const Matrix& m);

bool is_symmetric(const Matrix& m, double tol = 1e-12);

}  // namespace quickdetect
