#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "missim/linalg.hpp"
#include "missim/table.hpp"

namespace missim::analysis {

struct ColumnMissingness {
    std::size_t missing_count = 0;
    double missing_fraction = 0.0;
};

struct MissingRateSummary {
    // one entry per column, in schema order
    std::vector<std::pair<std::string, ColumnMissingness>> per_column;
    double overall_fraction = 0.0;
    std::size_t n_rows = 0;
    std::size_t n_fully_observed_rows = 0;
};

MissingRateSummary compute_missing_rate(const TabularDataset& data);

enum class NumericMetric { rmse, mae };

struct ColumnEvaluation {
    // "RMSE", "MAE", or "accuracy"
    std::string metric_name;
    double raw_score = 0.0;
    // numeric error divided by the truth column's range and clamped to [0, 1];
    // equals raw_score for accuracy columns
    double normalized_score = 0.0;
    std::size_t n_evaluated_cells = 0;
};

struct EvaluationReport {
    // columns with at least one evaluated cell, in schema order
    std::vector<std::pair<std::string, ColumnEvaluation>> per_column;
    double avg_err = 0.0;
};

// Mean per-column error, counting accuracy columns as 1 - accuracy.
// Throws EvalError when the report covers no columns.
double avg_err(const EvaluationReport& report);

// Scores imputed against truth at the cells the mask marks missing.
// cat_cols forces exact-match accuracy scoring on the listed columns even
// when they are numeric.
EvaluationReport evaluate_imputation(
    const TabularDataset& truth, const TabularDataset& imputed, const MissingMask& mask,
    NumericMetric metric,
    const std::optional<std::vector<std::string>>& cat_cols = std::nullopt);

struct EmEstimate {
    std::vector<double> mean;
    linalg::Matrix covariance;
    bool converged = false;
    std::size_t n_iterations = 0;
};

// Gaussian maximum-likelihood mean and covariance on incomplete column-major
// data. Requires at least two columns, two observed values per column, and
// one observed value per row; violations throw DataError.
EmEstimate em_estimate(const std::vector<NumericColumn>& columns);

struct McarTestResult {
    double statistic = 0.0;
    std::size_t degrees_of_freedom = 0;
    double p_value = 1.0;
    std::size_t n_patterns = 0;
    bool converged = false;
};

// Little's test over the given numeric columns (all numeric columns when
// omitted). Rows missing every tested value are left out of the test.
McarTestResult little_mcar_test(
    const TabularDataset& data,
    const std::optional<std::vector<std::string>>& columns = std::nullopt);

// Two fixed lines: the statistic summary, then the verdict.
std::string mcar_report(const McarTestResult& result, double alpha = 0.05);

struct WelchResult {
    double t = 0.0;
    double df = 0.0;
    double p_two_sided = 1.0;
};

// Unequal-variance two-sample test; absent when either sample has fewer than
// two values or when the pooled standard error is zero.
std::optional<WelchResult> welch_t_test(const std::vector<double>& a,
                                        const std::vector<double>& b);

struct PValueMatrix {
    std::vector<std::string> columns;
    // [splitter column][value column]; absent where the test is undefined
    std::vector<std::vector<std::optional<double>>> p_values;
};

// Entry (a, b): Welch p-value comparing column b's observed values on rows
// where a is missing against rows where a is observed.
PValueMatrix mcar_t_tests(const TabularDataset& data);

enum class CorrelationMethod { pearson, spearman, kendall };

struct CorrelationGrid {
    std::vector<std::string> columns;
    std::vector<std::vector<std::optional<double>>> values;
};

// Correlation between the per-column missingness indicators (1 = missing).
// Unit diagonal; off-diagonal entries absent when either indicator is
// constant.
CorrelationGrid nullity_correlation(const TabularDataset& data, CorrelationMethod method);

}  // namespace missim::analysis
