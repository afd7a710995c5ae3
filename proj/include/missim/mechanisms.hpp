#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "missim/stats.hpp"
#include "missim/table.hpp"

// The masking kernels. Each one maps (complete numeric view, rule) to a
// MissingMask with 1 = observed. Data-dependent quantities (drivers, weights,
// intercepts, cuts, group probabilities) also exist as separate fit/apply
// pairs so a caller can freeze them on one dataset and replay them on another.
namespace missim::mech {

enum class Family : std::uint64_t { mcar = 1, mar = 2, mnar = 3 };
enum class Side { upper, lower, both };

// Per-row class labels, categorical ones already ordinal-encoded.
using LabelVector = std::vector<double>;

struct MechanismRule {
    Family family = Family::mcar;
    int variant = 1;
    double rate = 0.0;       // target missing fraction among target cells
    std::uint64_t seed = 0;
    std::vector<std::size_t> depend_on;  // control/driver columns, stay observed
    std::vector<std::size_t> targets;    // columns eligible for masking
    std::optional<double> up_percentile;
    std::optional<double> obs_percentile;
    Side side = Side::upper;
    double group_odds = 2.0;
    std::string custom;  // non-empty: route to a registered kernel instead
};

// Shared checks: rate in [0,1], targets non-empty and in range, targets
// disjoint from depend_on, percentiles in (0,1), positive odds, plus the
// variant-specific preconditions. Throws ConfigError.
void validate_rule(const NumericView& view, const MechanismRule& rule);

// Columns whose values the rule reads; callers can demand these are complete
// before running anything.
std::vector<std::size_t> referenced_columns(const MechanismRule& rule, std::size_t n_cols);

// MCAR: value-free randomness.
MissingMask mcar_uniform(const NumericView& view, const MechanismRule& rule);   // type 1
MissingMask mcar_fixed(const NumericView& view, const MechanismRule& rule);     // type 2
MissingMask mcar_balanced(const NumericView& view, const MechanismRule& rule);  // type 3

// MAR: missingness driven by observed columns.
MissingMask mar_logistic(const NumericView& view, const MechanismRule& rule);       // type 1
MissingMask mar_mutual_info(const NumericView& view, const MechanismRule& rule,
                            const LabelVector& label);                              // type 2
MissingMask mar_point_biserial(const NumericView& view, const MechanismRule& rule,
                               const LabelVector& label);                           // type 3
MissingMask mar_corr_ranking(const NumericView& view, const MechanismRule& rule);   // type 4
MissingMask mar_rank(const NumericView& view, const MechanismRule& rule);           // type 5
MissingMask mar_binary_group(const NumericView& view, const MechanismRule& rule);   // type 6
MissingMask mar_top_value(const NumericView& view, const MechanismRule& rule);      // type 7
MissingMask mar_extreme(const NumericView& view, const MechanismRule& rule);        // type 8

// MNAR: missingness driven by the masked values themselves.
MissingMask mnar_quantile(const NumericView& view, const MechanismRule& rule);       // type 1
MissingMask mnar_logistic_self(const NumericView& view, const MechanismRule& rule);  // type 2
MissingMask mnar_self(const NumericView& view, const MechanismRule& rule);           // type 3
MissingMask mnar_quantile_cut(const NumericView& view, const MechanismRule& rule);   // type 4
MissingMask mnar_featurewise(const NumericView& view, const MechanismRule& rule);    // type 5
MissingMask mnar_percentile(const NumericView& view, const MechanismRule& rule);     // type 6

// Dispatch on (family, variant). label may be null except for MAR types 2/3.
MissingMask run_mechanism(const NumericView& view, const MechanismRule& rule,
                          const LabelVector* label);

// Frozen state for the logistic mechanisms (MAR 1, MNAR 2, MNAR 3): one score
// model per target column.
struct LogisticTargetParams {
    std::vector<std::size_t> features;           // view columns feeding the score
    std::vector<stats::Standardization> scalers;  // per feature
    std::vector<double> weights;                 // per feature
    double intercept = 0.0;
};
struct LogisticFrozen {
    std::vector<LogisticTargetParams> per_target;  // parallel to canonical targets
};
LogisticFrozen fit_logistic(const NumericView& view, const MechanismRule& rule);
MissingMask apply_logistic(const NumericView& view, const MechanismRule& rule,
                           const LogisticFrozen& frozen);

// Frozen driver choice for the ranking mechanisms (MAR 2, 3, 4).
struct DriverFrozen {
    std::vector<std::size_t> driver_per_target;  // parallel to canonical targets
};
DriverFrozen fit_driver(const NumericView& view, const MechanismRule& rule,
                        const LabelVector* label);
MissingMask apply_driver(const NumericView& view, const MechanismRule& rule,
                         const DriverFrozen& frozen);

// Frozen value cuts for the threshold mechanisms (MNAR 1, 4, 6). Applying
// them masks strictly beyond the stored cuts; the kernels above instead hit
// the exact per-column count on the data they were given.
struct ThresholdFrozen {
    std::vector<std::optional<double>> upper_cut;  // mask value > cut
    std::vector<std::optional<double>> lower_cut;  // mask value < cut
};
ThresholdFrozen fit_thresholds(const NumericView& view, const MechanismRule& rule);
MissingMask apply_thresholds(const NumericView& view, const MechanismRule& rule,
                             const ThresholdFrozen& frozen);

// Frozen split for MAR 6.
struct GroupFrozen {
    double median = 0.0;
    double p_hi = 0.0;
    double p_lo = 0.0;
};
GroupFrozen fit_binary_group(const NumericView& view, const MechanismRule& rule);
MissingMask apply_binary_group(const NumericView& view, const MechanismRule& rule,
                               const GroupFrozen& frozen);

struct GroupProbs {
    double p_hi = 0.0;
    double p_lo = 0.0;
};
// Solves n_hi*p_hi + n_lo*p_lo = rate*(n_hi+n_lo) with p_hi = odds*p_lo,
// clamping either probability to [0,1] and re-solving the other when the
// plain solution leaves the unit interval.
GroupProbs solve_binary_group(std::size_t n_hi, std::size_t n_lo, double rate, double odds);

// Returns b with |mean(sigmoid(s + b)) - rate| <= 1e-4, by bisection on
// [-50, 50], at most 200 iterations. rate must lie strictly inside (0,1).
double calibrate_intercept(std::span<const double> scores, double rate);

// Row indices ordered by value (descending or ascending); equal values keep
// ascending row index.
std::vector<std::size_t> rows_by_value(std::span<const double> values, bool descending);

// Equal-frequency binning into min(10, #distinct) bins; bin id of v is the
// number of interior quantile edges strictly below v.
std::vector<int> equal_frequency_bins(std::span<const double> values);

// Distinct values mapped to 0-based ids in sorted order.
std::vector<int> discrete_ids(std::span<const double> values);

// Plug-in mutual information (natural log) between two discrete id vectors.
double plugin_mutual_information(std::span<const int> a, std::span<const int> b);

// Contract checks applied to masks from externally supplied kernels:
// dimensions match the view and every non-target column is fully observed.
// Throws MechanismContractError.
void check_mask_contract(const NumericView& view, const MechanismRule& rule,
                         const MissingMask& mask);

}  // namespace missim::mech
