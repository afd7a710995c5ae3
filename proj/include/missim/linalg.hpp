#pragma once

#include <cstddef>
#include <vector>

namespace missim::linalg {

// Row-major rectangular matrix; every helper below assumes square symmetric
// input where it matters.
using Matrix = std::vector<std::vector<double>>;

Matrix zeros(std::size_t rows, std::size_t cols);

// Lower-triangular L with L * L^T = a. Throws DataError when a pivot is not
// strictly positive.
Matrix cholesky(const Matrix& a);

// cholesky with one retry after adding 1e-8 * trace/p to the diagonal, for
// covariance matrices that are singular only through rounding.
Matrix cholesky_regularized(Matrix a);

// Solves (L * L^T) x = b given the Cholesky factor.
std::vector<double> solve_with_factor(const Matrix& L, std::vector<double> b);

// d^T (L L^T)^{-1} d via one forward substitution.
double inverse_quadratic_form(const Matrix& L, std::vector<double> d);

}  // namespace missim::linalg
