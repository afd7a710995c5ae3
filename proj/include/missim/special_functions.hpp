#pragma once

namespace missim::special {

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_lower_gamma(double a, double x);

// Regularized incomplete beta I_x(a, b), a > 0, b > 0, x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

// Upper-tail chi-square probability, 1 - P(df/2, x/2).
// Throws DomainError for x < 0 or df < 1.
double chi_square_sf(double x, double df);

// One-sided upper-tail Student t probability. Throws DomainError for df <= 0
// or non-finite t.
double student_t_sf(double t, double df);

}  // namespace missim::special
