#include "missim/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "missim/errors.hpp"
#include "missim/rng.hpp"

namespace missim::mech {

namespace {

using stats::round_half_even;
using stats::sigmoid;

rng::Rng column_stream(const MechanismRule& rule, std::uint64_t column, rng::Purpose purpose) {
    return rng::Rng(rng::mix_seed(rule.seed, static_cast<std::uint64_t>(rule.family),
                                  static_cast<std::uint64_t>(rule.variant), column, purpose));
}

rng::Rng row_stream(const MechanismRule& rule, rng::Purpose purpose) {
    return column_stream(rule, rng::ROW_STREAM, purpose);
}

// Targets in canonical order so masks do not depend on how the rule lists them.
std::vector<std::size_t> canonical_targets(const MechanismRule& rule) {
    std::vector<std::size_t> t = rule.targets;
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

bool column_complete(const NumericView& view, std::size_t j) {
    for (const auto& v : view.cols[j])
        if (!v.has_value()) return false;
    return true;
}

// Fully materialized column; the mechanisms read values, so gaps are an error.
std::vector<double> column_values(const NumericView& view, std::size_t j) {
    std::vector<double> out;
    out.reserve(view.n_rows);
    for (const auto& v : view.cols[j]) {
        if (!v.has_value())
            throw DataError("column " + std::to_string(j) +
                            " has missing values where the mechanism needs them complete");
        out.push_back(*v);
    }
    return out;
}

bool is_constant(std::span<const double> values) {
    for (double v : values)
        if (v != values.front()) return false;
    return true;
}

MissingMask all_observed(const NumericView& view) {
    return MissingMask(view.n_rows, view.cols.size(), 1);
}

void mask_row_targets(MissingMask& mask, std::size_t row, std::span<const std::size_t> targets) {
    for (auto t : targets) mask.set(row, t, 0);
}

// Pearson over rows where both columns hold values; shaky cases rank as 0.
double pairwise_abs_pearson(const NumericView& view, std::size_t a, std::size_t b) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < view.n_rows; ++i) {
        if (view.cols[a][i].has_value() && view.cols[b][i].has_value()) {
            xs.push_back(*view.cols[a][i]);
            ys.push_back(*view.cols[b][i]);
        }
    }
    if (xs.size() < 2) return 0.0;
    auto r = stats::pearson(xs, ys);
    return r.has_value() ? std::abs(*r) : 0.0;
}

void require_label(const LabelVector* label, const NumericView& view) {
    if (!label) throw ConfigError("this mechanism needs a label vector");
    if (label->size() != view.n_rows) throw ShapeError("label length disagrees with the data");
}

// First k rows of the (value desc, index asc) order.
std::vector<std::size_t> top_rows(std::span<const double> values, std::size_t k) {
    auto order = rows_by_value(values, true);
    order.resize(std::min(k, order.size()));
    return order;
}

std::vector<std::size_t> bottom_rows(std::span<const double> values, std::size_t k) {
    auto order = rows_by_value(values, false);
    order.resize(std::min(k, order.size()));
    return order;
}

std::size_t count_of(double rate, std::size_t n) {
    auto k = round_half_even(rate * static_cast<double>(n));
    return std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 0LL)), n);
}

}  // namespace

void validate_rule(const NumericView& view, const MechanismRule& rule) {
    const std::size_t p = view.cols.size();
    if (!(rule.rate >= 0.0 && rule.rate <= 1.0))
        throw ConfigError("rate must lie in [0, 1]");
    if (rule.targets.empty()) throw ConfigError("rule has no target columns");
    for (auto t : rule.targets)
        if (t >= p) throw ConfigError("target column index out of range");
    for (auto d : rule.depend_on) {
        if (d >= p) throw ConfigError("depend_on column index out of range");
        if (std::find(rule.targets.begin(), rule.targets.end(), d) != rule.targets.end())
            throw ConfigError("depend_on and targets overlap");
    }
    for (const auto& q : {rule.up_percentile, rule.obs_percentile})
        if (q.has_value() && !(*q > 0.0 && *q < 1.0))
            throw ConfigError("percentiles must lie strictly inside (0, 1)");
    if (!(rule.group_odds > 0.0)) throw ConfigError("group_odds must be positive");
    if (!rule.custom.empty()) return;  // registered kernels define their own extras

    const int v = rule.variant;
    switch (rule.family) {
        case Family::mcar:
            if (v < 1 || v > 3) throw ConfigError("MCAR variant must be 1..3");
            break;
        case Family::mar:
            if (v < 1 || v > 8) throw ConfigError("MAR variant must be 1..8");
            if (v >= 5 && v <= 8 && rule.depend_on.size() != 1)
                throw ConfigError("this MAR variant needs exactly one depend_on column");
            break;
        case Family::mnar:
            if (v < 1 || v > 6) throw ConfigError("MNAR variant must be 1..6");
            if (v == 1 && rule.side == Side::both)
                throw ConfigError("side must be upper or lower here; both is a type 4 option");
            break;
    }
}

std::vector<std::size_t> referenced_columns(const MechanismRule& rule, std::size_t n_cols) {
    if (!rule.custom.empty()) return rule.depend_on;
    switch (rule.family) {
        case Family::mcar:
            return {};
        case Family::mar:
            return rule.depend_on;  // driver scans skip incomplete candidates
        case Family::mnar:
            if (rule.variant == 2) {
                std::vector<std::size_t> all(n_cols);
                std::iota(all.begin(), all.end(), std::size_t{0});
                return all;
            }
            return canonical_targets(rule);
    }
    return {};
}

std::vector<std::size_t> rows_by_value(std::span<const double> values, bool descending) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return descending ? values[a] > values[b] : values[a] < values[b];
    });
    return order;
}

std::vector<int> equal_frequency_bins(std::span<const double> values) {
    if (values.empty()) throw EmptyInputError("binning an empty column");
    std::vector<double> distinct(values.begin(), values.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::size_t bins = std::min<std::size_t>(10, distinct.size());
    std::vector<double> edges;
    for (std::size_t i = 1; i < bins; ++i)
        edges.push_back(stats::quantile(values, static_cast<double>(i) / static_cast<double>(bins)));
    std::vector<int> out;
    out.reserve(values.size());
    for (double v : values) {
        int b = 0;
        for (double e : edges)
            if (e < v) ++b;
        out.push_back(b);
    }
    return out;
}

std::vector<int> discrete_ids(std::span<const double> values) {
    std::vector<double> distinct(values.begin(), values.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<int> out;
    out.reserve(values.size());
    for (double v : values) {
        auto it = std::lower_bound(distinct.begin(), distinct.end(), v);
        out.push_back(static_cast<int>(it - distinct.begin()));
    }
    return out;
}

double plugin_mutual_information(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) throw ShapeError("mutual information: length mismatch");
    if (a.empty()) throw EmptyInputError("mutual information of empty vectors");
    std::map<int, double> pa, pb;
    std::map<std::pair<int, int>, double> pab;
    const double n = static_cast<double>(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        pa[a[i]] += 1.0;
        pb[b[i]] += 1.0;
        pab[{a[i], b[i]}] += 1.0;
    }
    double mi = 0.0;
    for (const auto& [key, nab] : pab) {
        double pxy = nab / n;
        double px = pa[key.first] / n;
        double py = pb[key.second] / n;
        mi += pxy * std::log(pxy / (px * py));
    }
    return mi;
}

double calibrate_intercept(std::span<const double> scores, double rate) {
    if (!(rate > 0.0 && rate < 1.0))
        throw ConfigError("intercept calibration needs a rate strictly inside (0, 1)");
    if (scores.empty()) throw EmptyInputError("intercept calibration without scores");
    for (double s : scores)
        if (!std::isfinite(s)) throw DomainError("intercept calibration needs finite scores");

    auto mean_prob = [&](double b) {
        double acc = 0.0;
        for (double s : scores) acc += sigmoid(s + b);
        return acc / static_cast<double>(scores.size());
    };
    double lo = -50.0, hi = 50.0;
    for (int it = 0; it < 200; ++it) {
        double mid = (lo + hi) / 2.0;
        double m = mean_prob(mid);
        if (std::abs(m - rate) <= 1e-4) return mid;
        if (m < rate)
            lo = mid;
        else
            hi = mid;
    }
    throw FitError("intercept calibration did not reach the requested rate");
}

GroupProbs solve_binary_group(std::size_t n_hi, std::size_t n_lo, double rate, double odds) {
    if (n_hi + n_lo == 0) throw EmptyInputError("group split over zero rows");
    if (!(odds > 0.0)) throw ConfigError("group_odds must be positive");
    const double n = static_cast<double>(n_hi + n_lo);
    const double want = rate * n;  // expected number of masked rows
    GroupProbs p;
    p.p_lo = want / (odds * static_cast<double>(n_hi) + static_cast<double>(n_lo));
    p.p_hi = odds * p.p_lo;
    if (p.p_hi > 1.0) {
        p.p_hi = 1.0;
        p.p_lo = n_lo ? std::clamp((want - static_cast<double>(n_hi)) / static_cast<double>(n_lo),
                                   0.0, 1.0)
                      : 0.0;
    } else if (p.p_lo > 1.0) {
        p.p_lo = 1.0;
        p.p_hi = n_hi ? std::clamp((want - static_cast<double>(n_lo)) / static_cast<double>(n_hi),
                                   0.0, 1.0)
                      : 0.0;
    }
    return p;
}

// ---- MCAR ----

MissingMask mcar_uniform(const NumericView& view, const MechanismRule& rule) {
    validate_rule(view, rule);
    auto mask = all_observed(view);
    if (rule.rate == 0.0) return mask;
    for (auto t : canonical_targets(rule)) {
        auto gen = column_stream(rule, t, rng::Purpose::cell_bernoulli);
        for (std::size_t i = 0; i < view.n_rows; ++i)
            if (gen.uniform() < rule.rate) mask.set(i, t, 0);
    }
    return mask;
}

MissingMask mcar_fixed(const NumericView& view, const MechanismRule& rule) {
    validate_rule(view, rule);
    auto mask = all_observed(view);
    auto targets = canonical_targets(rule);
    const std::size_t cells = targets.size() * view.n_rows;
    const std::size_t k = count_of(rule.rate, cells);
    if (k == 0) return mask;
    auto gen = row_stream(rule, rng::Purpose::row_select);
    for (auto flat : gen.sample_without_replacement(cells, k)) {
        std::size_t t = targets[flat / view.n_rows];
        std::size_t i = flat % view.n_rows;
        mask.set(i, t, 0);
    }
    return mask;
}

MissingMask mcar_balanced(const NumericView& view, const MechanismRule& rule) {
    validate_rule(view, rule);
    auto mask = all_observed(view);
    const std::size_t k = count_of(rule.rate, view.n_rows);
    if (k == 0) return mask;
    for (auto t : canonical_targets(rule)) {
        auto gen = column_stream(rule, t, rng::Purpose::row_select);
        for (auto i : gen.sample_without_replacement(view.n_rows, k)) mask.set(i, t, 0);
    }
    return mask;
}

// ---- MAR: logistic on observed drivers ----

LogisticFrozen fit_logistic(const NumericView& view, const MechanismRule& rule) {
    validate_rule(view, rule);
    auto targets = canonical_targets(rule);
    const bool self_model = rule.family == Family::mnar && rule.variant == 3;
    const bool full_row = rule.family == Family::mnar && rule.variant == 2;

    std::vector<std::size_t> shared_features;
    if (full_row) {
        shared_features.resize(view.cols.size());
        std::iota(shared_features.begin(), shared_features.end(), std::size_t{0});
    } else if (!self_model) {
        shared_features = rule.depend_on;
        if (shared_features.empty()) {
            // Every standardized non-constant column has unit variance, so the
            // variance rule collapses to the first usable non-target column.
            for (std::size_t j = 0; j < view.cols.size(); ++j) {
                if (std::find(targets.begin(), targets.end(), j) != targets.end()) continue;
                if (!column_complete(view, j)) continue;
                if (is_constant(column_values(view, j))) continue;
                shared_features.push_back(j);
                break;
            }
            if (shared_features.empty())
                throw ConfigError("no usable driver column for the logistic mechanism");
        }
    }

    LogisticFrozen frozen;
    frozen.per_target.reserve(targets.size());
    const bool degenerate_rate = rule.rate <= 0.0 || rule.rate >= 1.0;
    for (auto t : targets) {
        LogisticTargetParams params;
        params.features = self_model ? std::vector<std::size_t>{t} : shared_features;
        std::vector<std::vector<double>> feature_values;
        for (auto f : params.features) {
            feature_values.push_back(column_values(view, f));
            params.scalers.push_back(stats::fit_standardization(feature_values.back()));
        }
        if (self_model) {
            params.weights = {1.0};
        } else {
            auto gen = column_stream(rule, t, rng::Purpose::weight_draw);
            params.weights.reserve(params.features.size());
            for (std::size_t f = 0; f < params.features.size(); ++f)
                params.weights.push_back(gen.normal());
        }
        if (!degenerate_rate) {
            std::vector<double> scores(view.n_rows, 0.0);
            for (std::size_t f = 0; f < params.features.size(); ++f)
                for (std::size_t i = 0; i < view.n_rows; ++i)
                    scores[i] += params.weights[f] * params.scalers[f].apply(feature_values[f][i]);
            params.intercept = calibrate_intercept(scores, rule.rate);
        }
        frozen.per_target.push_back(std::move(params));
    }
    return frozen;
}

MissingMask apply_logistic(const NumericView& view, const MechanismRule& rule,
                           const LogisticFrozen& frozen) {
    auto targets = canonical_targets(rule);
    if (frozen.per_target.size() != targets.size())
        throw StateError("frozen logistic state does not match the rule's targets");
    auto mask = all_observed(view);
    if (rule.rate == 0.0) return mask;
    for (std::size_t ti = 0; ti < targets.size(); ++ti) {
        const std::size_t t = targets[ti];
        if (rule.rate >= 1.0) {
            for (std::size_t i = 0; i < view.n_rows; ++i) mask.set(i, t, 0);
            continue;
        }
        const auto& params = frozen.per_target[ti];
        std::vector<std::vector<double>> feature_values;
        for (auto f : params.features) feature_values.push_back(column_values(view, f));
        auto gen = column_stream(rule, t, rng::Purpose::cell_bernoulli);
        for (std::size_t i = 0; i < view.n_rows; ++i) {
            double score = params.intercept;
            for (std::size_t f = 0; f < params.features.size(); ++f)
                score += params.weights[f] * params.scalers[f].apply(feature_values[f][i]);
            if (gen.uniform() < sigmoid(score)) mask.set(i, t, 0);
        }
    }
    return mask;
}

MissingMask mar_logistic(const NumericView& view, const MechanismRule& rule) {
    return apply_logistic(view, rule, fit_logistic(view, rule));
}

// ---- MAR: driver-ranked rows ----

namespace {

std::size_t best_driver_by(const NumericView& view, const std::vector<std::size_t>& skip,
                           const std::function<double(std::span<const double>)>& score) {
    std::optional<std::size_t> best;
    double best_score = 0.0;
    for (std::size_t j = 0; j < view.cols.size(); ++j) {
        if (std::find(skip.begin(), skip.end(), j) != skip.end()) continue;
        if (!column_complete(view, j)) continue;
        double s = score(column_values(view, j));
        if (!best || s > best_score) {
            best = j;
            best_score = s;
        }
    }
    if (!best) throw ConfigError("no usable driver column");
    return *best;
}

}  // namespace

DriverFrozen fit_driver(const NumericView& view, const MechanismRule& rule,
                        const LabelVector* label) {
    validate_rule(view, rule);
    auto targets = canonical_targets(rule);
    DriverFrozen frozen;
    if (rule.family == Family::mar && rule.variant == 2) {
        require_label(label, view);
        auto label_ids = discrete_ids(*label);
        auto driver = best_driver_by(view, rule.depend_on, [&](std::span<const double> col) {
            return plugin_mutual_information(equal_frequency_bins(col), label_ids);
        });
        frozen.driver_per_target.assign(targets.size(), driver);
    } else if (rule.family == Family::mar && rule.variant == 3) {
        require_label(label, view);
        std::vector<double> distinct(*label);
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        if (distinct.size() != 2)
            throw ConfigError("point-biserial masking needs a binary label");
        std::vector<std::uint8_t> group;
        group.reserve(label->size());
        for (double v : *label) group.push_back(v == distinct[1] ? 1 : 0);
        auto driver = best_driver_by(view, rule.depend_on, [&](std::span<const double> col) {
            return std::abs(stats::point_biserial(col, group));
        });
        frozen.driver_per_target.assign(targets.size(), driver);
    } else if (rule.family == Family::mar && rule.variant == 4) {
        for (auto t : targets) {
            std::optional<std::size_t> best;
            double best_score = 0.0;
            for (std::size_t j = 0; j < view.cols.size(); ++j) {
                if (j == t || !column_complete(view, j)) continue;
                double s = pairwise_abs_pearson(view, t, j);
                if (!best || s > best_score) {
                    best = j;
                    best_score = s;
                }
            }
            if (!best) throw ConfigError("correlation ranking needs at least two columns");
            frozen.driver_per_target.push_back(*best);
        }
    } else {
        throw ConfigError("fit_driver only serves MAR types 2, 3, and 4");
    }
    return frozen;
}

MissingMask apply_driver(const NumericView& view, const MechanismRule& rule,
                         const DriverFrozen& frozen) {
    auto targets = canonical_targets(rule);
    if (frozen.driver_per_target.size() != targets.size())
        throw StateError("frozen driver state does not match the rule's targets");
    auto mask = all_observed(view);
    const std::size_t k = count_of(rule.rate, view.n_rows);
    if (k == 0) return mask;
    for (std::size_t ti = 0; ti < targets.size(); ++ti) {
        auto driver_values = column_values(view, frozen.driver_per_target[ti]);
        for (auto i : top_rows(driver_values, k)) mask.set(i, targets[ti], 0);
    }
    return mask;
}

MissingMask mar_mutual_info(const NumericView& view, const MechanismRule& rule,
                            const LabelVector& label) {
    return apply_driver(view, rule, fit_driver(view, rule, &label));
}

MissingMask mar_point_biserial(const NumericView& view, const MechanismRule& rule,
                               const LabelVector& label) {
    return apply_driver(view, rule, fit_driver(view, rule, &label));
}

MissingMask mar_corr_ranking(const NumericView& view, const MechanismRule& rule) {
    return apply_driver(view, rule, fit_driver(view, rule, nullptr));
}

// ---- MAR: control-column row selection ----

MissingMask mar_rank(const NumericView& view, const MechanismRule& rule) {
    validate_rule(view, rule);
    auto mask = all_observed(view);
    auto targets = canonical_targets(rule);
    const std::size_t k = count_of(rule.rate, view.n_rows);
    if (k == 0) return mask;
    auto control = column_values(view, rule.depend_on[0]);
    auto weights = stats::ranks(control);
    auto gen = row_stream(rule, rng::Purpose::row_select);
    for (auto i : gen.weighted_sample_without_replacement(weights, k))
        mask_row_targets(mask, i, targets);
    return mask;
}

GroupFrozen fit_binary_group(const NumericView& view, const MechanismRule& rule) {
    validate_rule(view, rule);
    auto control = column_values(view, rule.depend_on[0]);
    GroupFrozen frozen;
    frozen.median = stats::quantile(control, 0.5);
    std::size_t n_hi = 0;
    for (double v : control)
        if (v > frozen.median) ++n_hi;
    auto probs = solve_binary_group(n_hi, control.size() - n_hi, rule.rate, rule.group_odds);
    frozen.p_hi = probs.p_hi;
    frozen.p_lo = probs.p_lo;
    return frozen;
}

MissingMask apply_binary_group(const NumericView& view, const MechanismRule& rule,
                               const GroupFrozen& frozen) {
    auto mask = all_observed(view);
    if (rule.rate == 0.0) return mask;
    auto targets = canonical_targets(rule);
    auto control = column_values(view, rule.depend_on[0]);
    auto gen = row_stream(rule, rng::Purpose::cell_bernoulli);
    for (std::size_t i = 0; i < view.n_rows; ++i) {
        double p = control[i] > frozen.median ? frozen.p_hi : frozen.p_lo;
        if (gen.uniform() < p) mask_row_targets(mask, i, targets);
    }
    return mask;
}

MissingMask mar_binary_group(const NumericView& view, const MechanismRule& rule) {
    return apply_binary_group(view, rule, fit_binary_group(view, rule));
}

MissingMask mar_top_value(const NumericView& view, const MechanismRule& rule) {
    validate_rule(view, rule);
    auto mask = all_observed(view);
    auto targets = canonical_targets(rule);
    const std::size_t k = count_of(rule.rate, view.n_rows);
    if (k == 0) return mask;
    auto control = column_values(view, rule.depend_on[0]);
    // top rows stay observed; the bottom k of the descending order get masked
    auto order = rows_by_value(control, true);
    for (std::size_t pos = order.size() - k; pos < order.size(); ++pos)
        mask_row_targets(mask, order[pos], targets);
    return mask;
}

MissingMask mar_extreme(const NumericView& view, const MechanismRule& rule) {
    validate_rule(view, rule);
    auto mask = all_observed(view);
    auto targets = canonical_targets(rule);
    const std::size_t n = view.n_rows;
    const std::size_t k = count_of(rule.rate, n);
    if (k == 0) return mask;
    auto control = column_values(view, rule.depend_on[0]);
    const double lo_cut = stats::quantile(control, rule.rate / 2.0);
    const double hi_cut = stats::quantile(control, 1.0 - rule.rate / 2.0);

    std::vector<std::uint8_t> chosen(n, 0);
    std::size_t chosen_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (control[i] < lo_cut || control[i] > hi_cut) {
            chosen[i] = 1;
            ++chosen_count;
        }
    }
    // distance past the nearer cut for rows in; distance short of it for rows out
    auto margin = [&](std::size_t i) {
        if (chosen[i]) return std::max(lo_cut - control[i], control[i] - hi_cut);
        return std::min(control[i] - lo_cut, hi_cut - control[i]);
    };
    if (chosen_count < k) {
        std::vector<std::size_t> outside;
        for (std::size_t i = 0; i < n; ++i)
            if (!chosen[i]) outside.push_back(i);
        std::stable_sort(outside.begin(), outside.end(),
                         [&](std::size_t a, std::size_t b) { return margin(a) < margin(b); });
        for (std::size_t idx = 0; chosen_count < k; ++idx) {
            chosen[outside[idx]] = 1;
            ++chosen_count;
        }
    } else if (chosen_count > k) {
        std::vector<std::size_t> inside;
        for (std::size_t i = 0; i < n; ++i)
            if (chosen[i]) inside.push_back(i);
        // drop the least extreme first; among equals, keep lower row indices
        std::stable_sort(inside.begin(), inside.end(), [&](std::size_t a, std::size_t b) {
            if (margin(a) != margin(b)) return margin(a) < margin(b);
            return a > b;
        });
        for (std::size_t idx = 0; chosen_count > k; ++idx) {
            chosen[inside[idx]] = 0;
            --chosen_count;
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (chosen[i]) mask_row_targets(mask, i, targets);
    return mask;
}

// ---- MNAR ----

MissingMask mnar_quantile(const NumericView& view, const MechanismRule& rule) {
    validate_rule(view, rule);
    auto mask = all_observed(view);
    const std::size_t k = count_of(rule.rate, view.n_rows);
    if (k == 0) return mask;
    for (auto t : canonical_targets(rule)) {
        auto values = column_values(view, t);
        auto rows = rule.side == Side::upper ? top_rows(values, k) : bottom_rows(values, k);
        for (auto i : rows) mask.set(i, t, 0);
    }
    return mask;
}

MissingMask mnar_logistic_self(const NumericView& view, const MechanismRule& rule) {
    return apply_logistic(view, rule, fit_logistic(view, rule));
}

MissingMask mnar_self(const NumericView& view, const MechanismRule& rule) {
    return apply_logistic(view, rule, fit_logistic(view, rule));
}

namespace {

struct CutCounts {
    std::size_t upper = 0;
    std::size_t lower = 0;
};

CutCounts quantile_cut_counts(const MechanismRule& rule, std::size_t n) {
    CutCounts c;
    switch (rule.side) {
        case Side::upper: {
            double up = rule.up_percentile.value_or(1.0 - rule.rate);
            c.upper = count_of(1.0 - up, n);
            break;
        }
        case Side::lower: {
            double obs = rule.obs_percentile.value_or(rule.rate);
            c.lower = count_of(obs, n);
            break;
        }
        case Side::both: {
            double up = rule.up_percentile.value_or(1.0 - rule.rate / 2.0);
            double obs = rule.obs_percentile.value_or(rule.rate / 2.0);
            c.upper = count_of(1.0 - up, n);
            c.lower = count_of(obs, n);
            break;
        }
    }
    return c;
}

}  // namespace

MissingMask mnar_quantile_cut(const NumericView& view, const MechanismRule& rule) {
    validate_rule(view, rule);
    auto mask = all_observed(view);
    auto counts = quantile_cut_counts(rule, view.n_rows);
    if (counts.upper == 0 && counts.lower == 0) return mask;
    for (auto t : canonical_targets(rule)) {
        auto values = column_values(view, t);
        for (auto i : top_rows(values, counts.upper)) mask.set(i, t, 0);
        for (auto i : bottom_rows(values, counts.lower)) mask.set(i, t, 0);
    }
    return mask;
}

MissingMask mnar_featurewise(const NumericView& view, const MechanismRule& rule) {
    validate_rule(view, rule);
    auto mask = all_observed(view);
    const std::size_t k = count_of(rule.rate, view.n_rows);
    if (k == 0) return mask;
    for (auto t : canonical_targets(rule)) {
        auto values = column_values(view, t);
        for (auto i : top_rows(values, k)) mask.set(i, t, 0);
    }
    return mask;
}

MissingMask mnar_percentile(const NumericView& view, const MechanismRule& rule) {
    validate_rule(view, rule);
    auto mask = all_observed(view);
    const std::size_t k = count_of(rule.rate, view.n_rows);
    if (k == 0) return mask;
    for (auto t : canonical_targets(rule)) {
        auto values = column_values(view, t);
        for (auto i : bottom_rows(values, k)) mask.set(i, t, 0);
    }
    return mask;
}

ThresholdFrozen fit_thresholds(const NumericView& view, const MechanismRule& rule) {
    validate_rule(view, rule);
    auto targets = canonical_targets(rule);
    ThresholdFrozen frozen;
    frozen.upper_cut.resize(targets.size());
    frozen.lower_cut.resize(targets.size());
    for (std::size_t ti = 0; ti < targets.size(); ++ti) {
        auto values = column_values(view, targets[ti]);
        if (rule.variant == 1) {
            if (rule.side == Side::upper)
                frozen.upper_cut[ti] = stats::quantile(values, 1.0 - rule.rate);
            else
                frozen.lower_cut[ti] = stats::quantile(values, rule.rate);
        } else if (rule.variant == 4) {
            if (rule.side == Side::upper || rule.side == Side::both) {
                double up = rule.up_percentile.value_or(
                    rule.side == Side::both ? 1.0 - rule.rate / 2.0 : 1.0 - rule.rate);
                frozen.upper_cut[ti] = stats::quantile(values, up);
            }
            if (rule.side == Side::lower || rule.side == Side::both) {
                double obs = rule.obs_percentile.value_or(
                    rule.side == Side::both ? rule.rate / 2.0 : rule.rate);
                frozen.lower_cut[ti] = stats::quantile(values, obs);
            }
        } else if (rule.variant == 6) {
            frozen.lower_cut[ti] = stats::quantile(values, rule.rate);
        } else {
            throw ConfigError("fit_thresholds only serves MNAR types 1, 4, and 6");
        }
    }
    return frozen;
}

MissingMask apply_thresholds(const NumericView& view, const MechanismRule& rule,
                             const ThresholdFrozen& frozen) {
    auto targets = canonical_targets(rule);
    if (frozen.upper_cut.size() != targets.size() || frozen.lower_cut.size() != targets.size())
        throw StateError("frozen threshold state does not match the rule's targets");
    auto mask = all_observed(view);
    for (std::size_t ti = 0; ti < targets.size(); ++ti) {
        auto values = column_values(view, targets[ti]);
        for (std::size_t i = 0; i < values.size(); ++i) {
            bool hit = (frozen.upper_cut[ti] && values[i] > *frozen.upper_cut[ti]) ||
                       (frozen.lower_cut[ti] && values[i] < *frozen.lower_cut[ti]);
            if (hit) mask.set(i, targets[ti], 0);
        }
    }
    return mask;
}

MissingMask run_mechanism(const NumericView& view, const MechanismRule& rule,
                          const LabelVector* label) {
    switch (rule.family) {
        case Family::mcar:
            switch (rule.variant) {
                case 1: return mcar_uniform(view, rule);
                case 2: return mcar_fixed(view, rule);
                case 3: return mcar_balanced(view, rule);
            }
            break;
        case Family::mar:
            switch (rule.variant) {
                case 1: return mar_logistic(view, rule);
                case 2:
                    require_label(label, view);
                    return mar_mutual_info(view, rule, *label);
                case 3:
                    require_label(label, view);
                    return mar_point_biserial(view, rule, *label);
                case 4: return mar_corr_ranking(view, rule);
                case 5: return mar_rank(view, rule);
                case 6: return mar_binary_group(view, rule);
                case 7: return mar_top_value(view, rule);
                case 8: return mar_extreme(view, rule);
            }
            break;
        case Family::mnar:
            switch (rule.variant) {
                case 1: return mnar_quantile(view, rule);
                case 2: return mnar_logistic_self(view, rule);
                case 3: return mnar_self(view, rule);
                case 4: return mnar_quantile_cut(view, rule);
                case 5: return mnar_featurewise(view, rule);
                case 6: return mnar_percentile(view, rule);
            }
            break;
    }
    throw ConfigError("unknown mechanism family/variant combination");
}

void check_mask_contract(const NumericView& view, const MechanismRule& rule,
                         const MissingMask& mask) {
    if (mask.rows() != view.n_rows || mask.cols() != view.cols.size())
        throw MechanismContractError("kernel returned a mask of the wrong shape");
    auto targets = canonical_targets(rule);
    for (std::size_t j = 0; j < mask.cols(); ++j) {
        if (std::find(targets.begin(), targets.end(), j) != targets.end()) continue;
        for (std::size_t i = 0; i < mask.rows(); ++i)
            if (mask.at(i, j) == 0)
                throw MechanismContractError("kernel masked a non-target column");
    }
}

}  // namespace missim::mech
