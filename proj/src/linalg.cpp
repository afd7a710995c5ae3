#include "missim/linalg.hpp"

#include <cmath>

#include "missim/errors.hpp"

namespace missim::linalg {

Matrix zeros(std::size_t rows, std::size_t cols) {
    return Matrix(rows, std::vector<double>(cols, 0.0));
}

Matrix cholesky(const Matrix& a) {
    const std::size_t p = a.size();
    Matrix L = zeros(p, p);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = a[i][j];
            for (std::size_t k = 0; k < j; ++k) sum -= L[i][k] * L[j][k];
            if (i == j) {
                if (!(sum > 0.0)) throw DataError("cholesky: matrix is not positive definite");
                L[i][i] = std::sqrt(sum);
            } else {
                L[i][j] = sum / L[j][j];
            }
        }
    }
    return L;
}

Matrix cholesky_regularized(Matrix a) {
    try {
        return cholesky(a);
    } catch (const DataError&) {
        const std::size_t p = a.size();
        double trace = 0.0;
        for (std::size_t i = 0; i < p; ++i) trace += a[i][i];
        double ridge = 1e-8 * trace / static_cast<double>(p);
        if (!(ridge > 0.0)) ridge = 1e-8;
        for (std::size_t i = 0; i < p; ++i) a[i][i] += ridge;
        return cholesky(a);
    }
}

std::vector<double> solve_with_factor(const Matrix& L, std::vector<double> b) {
    const std::size_t p = L.size();
    // forward substitution: L y = b
    for (std::size_t i = 0; i < p; ++i) {
        double sum = b[i];
        for (std::size_t k = 0; k < i; ++k) sum -= L[i][k] * b[k];
        b[i] = sum / L[i][i];
    }
    // back substitution: L^T x = y
    for (std::size_t ii = p; ii-- > 0;) {
        double sum = b[ii];
        for (std::size_t k = ii + 1; k < p; ++k) sum -= L[k][ii] * b[k];
        b[ii] = sum / L[ii][ii];
    }
    return b;
}

double inverse_quadratic_form(const Matrix& L, std::vector<double> d) {
    const std::size_t p = L.size();
    double q = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        double sum = d[i];
        for (std::size_t k = 0; k < i; ++k) sum -= L[i][k] * d[k];
        d[i] = sum / L[i][i];
        q += d[i] * d[i];
    }
    return q;
}

}  // namespace missim::linalg
