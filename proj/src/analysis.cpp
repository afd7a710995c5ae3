#include "missim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "missim/errors.hpp"
#include "missim/special_functions.hpp"
#include "missim/stats.hpp"

namespace missim::analysis {

namespace {

constexpr double kEmTolerance = 1e-6;
constexpr std::size_t kEmMaxIterations = 500;

// Rows sharing one observedness layout, described by the observed column
// indices into the tested subset.
struct PatternGroup {
    std::vector<std::size_t> observed;
    std::vector<std::size_t> rows;
};

std::vector<PatternGroup> group_by_pattern(const std::vector<NumericColumn>& columns) {
    const std::size_t n = columns.front().size();
    const std::size_t p = columns.size();
    std::map<std::vector<bool>, std::size_t> index_of;
    std::vector<PatternGroup> groups;
    std::vector<bool> key(p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) key[j] = columns[j][i].has_value();
        auto [it, inserted] = index_of.try_emplace(key, groups.size());
        if (inserted) {
            PatternGroup g;
            for (std::size_t j = 0; j < p; ++j)
                if (key[j]) g.observed.push_back(j);
            groups.push_back(std::move(g));
        }
        groups[it->second].rows.push_back(i);
    }
    return groups;
}

linalg::Matrix submatrix(const linalg::Matrix& a, const std::vector<std::size_t>& rows,
                         const std::vector<std::size_t>& cols) {
    linalg::Matrix out(rows.size(), std::vector<double>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out[i][j] = a[rows[i]][cols[j]];
    return out;
}

}  // namespace

MissingRateSummary compute_missing_rate(const TabularDataset& data) {
    MissingRateSummary summary;
    const std::size_t n = data.n_rows();
    const std::size_t p = data.n_cols();
    summary.n_rows = n;
    std::size_t total_missing = 0;
    std::vector<std::size_t> row_missing(n, 0);
    for (std::size_t j = 0; j < p; ++j) {
        ColumnMissingness col;
        for (std::size_t i = 0; i < n; ++i) {
            if (data.is_missing(i, j)) {
                ++col.missing_count;
                ++row_missing[i];
            }
        }
        col.missing_fraction = n == 0 ? 0.0 : static_cast<double>(col.missing_count) / n;
        total_missing += col.missing_count;
        summary.per_column.emplace_back(data.specs()[j].name, col);
    }
    summary.overall_fraction = n * p == 0 ? 0.0 : static_cast<double>(total_missing) / (n * p);
    summary.n_fully_observed_rows =
        static_cast<std::size_t>(std::count(row_missing.begin(), row_missing.end(), 0u));
    return summary;
}

double avg_err(const EvaluationReport& report) {
    if (report.per_column.empty()) throw EvalError("no evaluated columns");
    double sum = 0.0;
    for (const auto& [name, col] : report.per_column) {
        sum += col.metric_name == "accuracy" ? 1.0 - col.normalized_score : col.normalized_score;
    }
    return sum / static_cast<double>(report.per_column.size());
}

EvaluationReport evaluate_imputation(const TabularDataset& truth, const TabularDataset& imputed,
                                     const MissingMask& mask, NumericMetric metric,
                                     const std::optional<std::vector<std::string>>& cat_cols) {
    if (truth.specs() != imputed.specs())
        throw SchemaError("truth and imputed datasets must share a schema");
    const std::size_t n = truth.n_rows();
    const std::size_t p = truth.n_cols();
    if (imputed.n_rows() != n)
        throw ShapeError("truth and imputed datasets must have the same row count");
    if (mask.rows() != n || mask.cols() != p)
        throw ShapeError("mask extent must match the dataset");

    std::vector<bool> force_accuracy(p, false);
    if (cat_cols) {
        for (const auto& name : *cat_cols) force_accuracy[truth.column_index(name)] = true;
    }

    EvaluationReport report;
    for (std::size_t j = 0; j < p; ++j) {
        const std::string& name = truth.specs()[j].name;
        const bool is_categorical = truth.specs()[j].kind == ColumnKind::categorical;
        ColumnEvaluation col;
        std::vector<std::size_t> cells;
        for (std::size_t i = 0; i < n; ++i)
            if (mask.at(i, j) == 0) cells.push_back(i);
        if (cells.empty()) continue;
        col.n_evaluated_cells = cells.size();

        for (std::size_t i : cells) {
            if (truth.is_missing(i, j))
                throw EvalError("truth has no value at an evaluated cell in column '" + name + "'");
            if (imputed.is_missing(i, j))
                throw EvalError("imputed value still missing in column '" + name + "'");
        }

        if (is_categorical || force_accuracy[j]) {
            std::size_t hits = 0;
            for (std::size_t i : cells) {
                if (is_categorical) {
                    if (*truth.categorical(j)[i] == *imputed.categorical(j)[i]) ++hits;
                } else {
                    if (*truth.numeric(j)[i] == *imputed.numeric(j)[i]) ++hits;
                }
            }
            col.metric_name = "accuracy";
            col.raw_score = static_cast<double>(hits) / static_cast<double>(cells.size());
            col.normalized_score = col.raw_score;
        } else {
            double sum = 0.0;
            for (std::size_t i : cells) {
                const double diff = *imputed.numeric(j)[i] - *truth.numeric(j)[i];
                sum += metric == NumericMetric::rmse ? diff * diff : std::abs(diff);
            }
            const double mean_err = sum / static_cast<double>(cells.size());
            col.metric_name = metric == NumericMetric::rmse ? "RMSE" : "MAE";
            col.raw_score = metric == NumericMetric::rmse ? std::sqrt(mean_err) : mean_err;

            double lo = 0.0, hi = 0.0;
            bool seen = false;
            for (const auto& v : truth.numeric(j)) {
                if (!v) continue;
                if (!seen) {
                    lo = hi = *v;
                    seen = true;
                } else {
                    lo = std::min(lo, *v);
                    hi = std::max(hi, *v);
                }
            }
            const double range = hi - lo;
            col.normalized_score =
                range == 0.0 ? 0.0 : std::clamp(col.raw_score / range, 0.0, 1.0);
        }
        report.per_column.emplace_back(name, col);
    }
    report.avg_err = avg_err(report);
    return report;
}

EmEstimate em_estimate(const std::vector<NumericColumn>& columns) {
    const std::size_t p = columns.size();
    if (p < 2) throw DataError("em_estimate: at least two numeric columns are required");
    const std::size_t n = columns.front().size();
    for (const auto& col : columns)
        if (col.size() != n) throw ShapeError("em_estimate: columns must share a length");
    for (std::size_t j = 0; j < p; ++j) {
        std::size_t observed = 0;
        for (const auto& v : columns[j])
            if (v) ++observed;
        if (observed < 2)
            throw DataError("em_estimate: every column needs at least two observed values");
    }
    for (std::size_t i = 0; i < n; ++i) {
        bool any = false;
        for (std::size_t j = 0; j < p; ++j)
            if (columns[j][i]) any = true;
        if (!any) throw DataError("em_estimate: every row needs at least one observed value");
    }

    // start from per-column observed moments with an independent covariance
    std::vector<double> mu(p, 0.0);
    linalg::Matrix sigma = linalg::zeros(p, p);
    for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> present;
        for (const auto& v : columns[j])
            if (v) present.push_back(*v);
        mu[j] = stats::mean(present);
        sigma[j][j] = stats::pop_variance(present);
    }

    const auto groups = group_by_pattern(columns);
    EmEstimate est;
    for (std::size_t iter = 1; iter <= kEmMaxIterations; ++iter) {
        std::vector<double> s1(p, 0.0);
        linalg::Matrix s2 = linalg::zeros(p, p);
        for (const auto& g : groups) {
            std::vector<std::size_t> missing;
            for (std::size_t j = 0; j < p; ++j)
                if (!std::binary_search(g.observed.begin(), g.observed.end(), j))
                    missing.push_back(j);

            // conditional-regression coefficients are shared by the pattern
            linalg::Matrix w;          // |o| x |m|, Sigma_oo^{-1} Sigma_om
            linalg::Matrix cond_cov;   // |m| x |m|
            if (!missing.empty()) {
                const auto L = linalg::cholesky_regularized(submatrix(sigma, g.observed, g.observed));
                const auto sigma_om = submatrix(sigma, g.observed, missing);
                w.assign(g.observed.size(), std::vector<double>(missing.size()));
                for (std::size_t c = 0; c < missing.size(); ++c) {
                    std::vector<double> rhs(g.observed.size());
                    for (std::size_t r = 0; r < g.observed.size(); ++r) rhs[r] = sigma_om[r][c];
                    auto solved = linalg::solve_with_factor(L, std::move(rhs));
                    for (std::size_t r = 0; r < g.observed.size(); ++r) w[r][c] = solved[r];
                }
                cond_cov = submatrix(sigma, missing, missing);
                for (std::size_t a = 0; a < missing.size(); ++a)
                    for (std::size_t b = 0; b < missing.size(); ++b)
                        for (std::size_t r = 0; r < g.observed.size(); ++r)
                            cond_cov[a][b] -= sigma_om[r][a] * w[r][b];
            }

            std::vector<double> completed(p);
            for (std::size_t row : g.rows) {
                for (std::size_t r = 0; r < g.observed.size(); ++r)
                    completed[g.observed[r]] = *columns[g.observed[r]][row];
                for (std::size_t c = 0; c < missing.size(); ++c) {
                    double v = mu[missing[c]];
                    for (std::size_t r = 0; r < g.observed.size(); ++r)
                        v += w[r][c] * (completed[g.observed[r]] - mu[g.observed[r]]);
                    completed[missing[c]] = v;
                }
                for (std::size_t a = 0; a < p; ++a) {
                    s1[a] += completed[a];
                    for (std::size_t b = 0; b < p; ++b) s2[a][b] += completed[a] * completed[b];
                }
                for (std::size_t a = 0; a < missing.size(); ++a)
                    for (std::size_t b = 0; b < missing.size(); ++b)
                        s2[missing[a]][missing[b]] += cond_cov[a][b];
            }
        }

        std::vector<double> mu_next(p);
        for (std::size_t j = 0; j < p; ++j) mu_next[j] = s1[j] / static_cast<double>(n);
        linalg::Matrix sigma_next = linalg::zeros(p, p);
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b <= a; ++b) {
                const double cov_ab = s2[a][b] / static_cast<double>(n) - mu_next[a] * mu_next[b];
                const double cov_ba = s2[b][a] / static_cast<double>(n) - mu_next[a] * mu_next[b];
                sigma_next[a][b] = sigma_next[b][a] = (cov_ab + cov_ba) / 2.0;
            }

        double delta = 0.0;
        for (std::size_t j = 0; j < p; ++j) delta = std::max(delta, std::abs(mu_next[j] - mu[j]));
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b)
                delta = std::max(delta, std::abs(sigma_next[a][b] - sigma[a][b]));
        mu = std::move(mu_next);
        sigma = std::move(sigma_next);
        est.n_iterations = iter;
        if (delta < kEmTolerance) {
            est.converged = true;
            break;
        }
    }

    // leave the returned covariance invertible for downstream quadratic forms
    try {
        linalg::cholesky(sigma);
    } catch (const DataError&) {
        double trace = 0.0;
        for (std::size_t j = 0; j < p; ++j) trace += sigma[j][j];
        double ridge = 1e-8 * trace / static_cast<double>(p);
        if (!(ridge > 0.0)) ridge = 1e-8;
        for (std::size_t j = 0; j < p; ++j) sigma[j][j] += ridge;
    }
    est.mean = std::move(mu);
    est.covariance = std::move(sigma);
    return est;
}

McarTestResult little_mcar_test(const TabularDataset& data,
                                const std::optional<std::vector<std::string>>& columns) {
    std::vector<std::size_t> selected;
    if (columns) {
        for (const auto& name : *columns) {
            const std::size_t j = data.column_index(name);
            if (data.specs()[j].kind != ColumnKind::numeric)
                throw SchemaError("column '" + name + "' is not numeric");
            selected.push_back(j);
        }
    } else {
        for (std::size_t j = 0; j < data.n_cols(); ++j)
            if (data.specs()[j].kind == ColumnKind::numeric) selected.push_back(j);
    }
    if (selected.size() < 2)
        throw DataError("the test needs at least two numeric columns");

    // rows with no tested value at all carry no pattern information
    const std::size_t n_all = data.n_rows();
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < n_all; ++i) {
        bool any = false;
        for (std::size_t j : selected)
            if (!data.is_missing(i, j)) any = true;
        if (any) kept.push_back(i);
    }

    std::vector<NumericColumn> subset(selected.size());
    std::size_t total_missing = 0;
    for (std::size_t c = 0; c < selected.size(); ++c) {
        const auto& col = data.numeric(selected[c]);
        subset[c].reserve(kept.size());
        for (std::size_t i : kept) {
            subset[c].push_back(col[i]);
            if (!col[i]) ++total_missing;
        }
    }
    if (kept.empty() || total_missing == 0) throw DataError("nothing to test");

    const auto groups = group_by_pattern(subset);
    if (groups.size() < 2)
        throw DataError("a single missingness pattern cannot be tested");
    std::size_t observed_sum = 0;
    for (const auto& g : groups) observed_sum += g.observed.size();
    if (observed_sum < selected.size() + 1)
        throw DataError("the missingness patterns leave no degrees of freedom");

    const auto est = em_estimate(subset);

    double d2 = 0.0;
    for (const auto& g : groups) {
        std::vector<double> centered(g.observed.size(), 0.0);
        for (std::size_t r = 0; r < g.observed.size(); ++r) {
            double sum = 0.0;
            for (std::size_t row : g.rows) sum += *subset[g.observed[r]][row];
            centered[r] = sum / static_cast<double>(g.rows.size()) - est.mean[g.observed[r]];
        }
        const auto L = linalg::cholesky_regularized(
            submatrix(est.covariance, g.observed, g.observed));
        d2 += static_cast<double>(g.rows.size()) *
              linalg::inverse_quadratic_form(L, std::move(centered));
    }

    McarTestResult result;
    result.statistic = d2;
    result.degrees_of_freedom = observed_sum - selected.size();
    result.n_patterns = groups.size();
    result.converged = est.converged;
    result.p_value = special::chi_square_sf(d2, static_cast<double>(result.degrees_of_freedom));
    return result;
}

std::string mcar_report(const McarTestResult& result, double alpha) {
    char summary[160];
    std::snprintf(summary, sizeof summary, "statistic=%.4f df=%zu p_value=%.4f n_patterns=%zu\n",
                  result.statistic, result.degrees_of_freedom, result.p_value, result.n_patterns);
    char verdict[96];
    std::snprintf(verdict, sizeof verdict, "%s MCAR at alpha=%g\n",
                  result.p_value < alpha ? "reject" : "fail to reject", alpha);
    return std::string(summary) + verdict;
}

std::optional<WelchResult> welch_t_test(const std::vector<double>& a,
                                        const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2) return std::nullopt;
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double va = stats::sample_variance(a) / na;
    const double vb = stats::sample_variance(b) / nb;
    const double se2 = va + vb;
    if (se2 <= 0.0) return std::nullopt;
    WelchResult r;
    r.t = (stats::mean(a) - stats::mean(b)) / std::sqrt(se2);
    r.df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    r.p_two_sided = 2.0 * special::student_t_sf(std::abs(r.t), r.df);
    return r;
}

PValueMatrix mcar_t_tests(const TabularDataset& data) {
    const std::size_t p = data.n_cols();
    PValueMatrix matrix;
    for (std::size_t j = 0; j < p; ++j) matrix.columns.push_back(data.specs()[j].name);
    matrix.p_values.assign(p, std::vector<std::optional<double>>(p));

    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b < p; ++b) {
            if (data.specs()[b].kind != ColumnKind::numeric) continue;
            const auto& values = data.numeric(b);
            std::vector<double> when_missing, when_observed;
            for (std::size_t i = 0; i < data.n_rows(); ++i) {
                if (!values[i]) continue;
                (data.is_missing(i, a) ? when_missing : when_observed).push_back(*values[i]);
            }
            if (auto r = welch_t_test(when_missing, when_observed))
                matrix.p_values[a][b] = r->p_two_sided;
        }
    }
    return matrix;
}

CorrelationGrid nullity_correlation(const TabularDataset& data, CorrelationMethod method) {
    const std::size_t p = data.n_cols();
    const std::size_t n = data.n_rows();
    std::vector<std::vector<double>> indicators(p, std::vector<double>(n));
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t i = 0; i < n; ++i) indicators[j][i] = data.is_missing(i, j) ? 1.0 : 0.0;

    CorrelationGrid grid;
    for (std::size_t j = 0; j < p; ++j) grid.columns.push_back(data.specs()[j].name);
    grid.values.assign(p, std::vector<std::optional<double>>(p));
    for (std::size_t a = 0; a < p; ++a) {
        grid.values[a][a] = 1.0;
        for (std::size_t b = a + 1; b < p; ++b) {
            std::optional<double> r;
            switch (method) {
                case CorrelationMethod::pearson:
                    r = stats::pearson(indicators[a], indicators[b]);
                    break;
                case CorrelationMethod::spearman:
                    r = stats::spearman(indicators[a], indicators[b]);
                    break;
                case CorrelationMethod::kendall:
                    r = stats::kendall_tau_b(indicators[a], indicators[b]);
                    break;
            }
            grid.values[a][b] = r;
            grid.values[b][a] = r;
        }
    }
    return grid;
}

}  // namespace missim::analysis
