#pragma once

#include <optional>
#include <string>
#include <vector>

#include "missim/table.hpp"

namespace missim::impute {

struct ColumnFill {
    // "mean" or "mode"
    std::string strategy;
    std::optional<double> number;
    std::optional<std::string> label;
};

class FittedImputer {
public:
    const std::vector<ColumnSpec>& schema() const { return schema_; }
    const std::vector<ColumnFill>& fills() const { return fills_; }

    // one line per column: column=<name> strategy=<mean|mode> fill=<value>
    std::vector<std::string> summary_lines() const;

    // Replaces every missing cell with its column's fill value.
    // Throws SchemaError when the dataset does not match the fitted schema.
    TabularDataset transform(const TabularDataset& data) const;

private:
    friend FittedImputer imputer_fit(const TabularDataset&,
                                     const std::optional<std::vector<std::string>>&, bool);
    std::vector<ColumnSpec> schema_;
    std::vector<ColumnFill> fills_;
};

// Learns mean fills for numeric columns and mode fills for categorical ones
// (ties to the lexicographically smallest label). Columns named in cat_cols
// are mode-filled over their distinct values even when numeric, ties to the
// smallest value. Every column needs at least one observed value; verbose
// prints the summary lines to standard output.
FittedImputer imputer_fit(const TabularDataset& data,
                          const std::optional<std::vector<std::string>>& cat_cols = std::nullopt,
                          bool verbose = false);

TabularDataset imputer_transform(const FittedImputer& fitted, const TabularDataset& data);

TabularDataset imputer_fit_transform(
    const TabularDataset& data,
    const std::optional<std::vector<std::string>>& cat_cols = std::nullopt,
    bool verbose = false);

}  // namespace missim::impute
