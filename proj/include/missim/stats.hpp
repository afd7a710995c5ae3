#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace missim::stats {

double mean(std::span<const double> values);

// Variance with denominator n.
double pop_variance(std::span<const double> values);

// Variance with denominator n-1; requires at least two values.
double sample_variance(std::span<const double> values);

// Linear interpolation between closest ranks: h = q*(n-1),
// result = x[floor(h)] + (h - floor(h)) * (x[ceil(h)] - x[floor(h)]).
// Throws EmptyInputError on an empty list, DomainError for q outside [0,1].
double quantile(std::span<const double> values, double q);

// 1-based ascending ranks; ties receive the average of the tied positions.
std::vector<double> ranks(std::span<const double> values);

struct Standardization {
    double mean = 0.0;
    double stddev = 0.0;  // population (denominator n)

    // (x - mean) / stddev, or 0 everywhere when stddev == 0.
    double apply(double x) const { return stddev == 0.0 ? 0.0 : (x - mean) / stddev; }
};

// Moments over the present values only. Requires at least one present value.
Standardization fit_standardization(std::span<const std::optional<double>> values);
Standardization fit_standardization(std::span<const double> values);

// Standardizes present values in place of their slots; absents stay absent.
std::vector<std::optional<double>> standardize(std::span<const std::optional<double>> values);
std::vector<double> standardize(std::span<const double> values);

// Pearson correlation with population moments; nullopt when either side is constant.
std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

// Spearman rank correlation (Pearson on average-tie ranks).
std::optional<double> spearman(std::span<const double> a, std::span<const double> b);

// Kendall tau-b, O(n^2) concordance count with tie correction.
std::optional<double> kendall_tau_b(std::span<const double> a, std::span<const double> b);

// Point-biserial correlation of a numeric vector against a 0/1 grouping,
// r = (M1 - M0)/s * sqrt(n1*n0/n^2) with s the population std.
// Constant vectors and one-sided groupings give 0.
double point_biserial(std::span<const double> values, std::span<const std::uint8_t> group);

// Round half to even, for non-negative count formulas.
long long round_half_even(double x);

// 1/(1+exp(-x)) with the argument clamped to [-700, 700].
double sigmoid(double x);

}  // namespace missim::stats
