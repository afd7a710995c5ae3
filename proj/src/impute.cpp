#include "missim/impute.hpp"

#include <iostream>
#include <map>

#include "missim/csv.hpp"
#include "missim/errors.hpp"
#include "missim/stats.hpp"

namespace missim::impute {

namespace {

// Most frequent key; ties fall to the smaller key under the map's ordering.
template <typename Key>
Key mode_of(const std::map<Key, std::size_t>& counts) {
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it)
        if (it->second > best->second) best = it;
    return best->first;
}

}  // namespace

std::vector<std::string> FittedImputer::summary_lines() const {
    std::vector<std::string> lines;
    for (std::size_t j = 0; j < schema_.size(); ++j) {
        const auto& fill = fills_[j];
        const std::string value =
            fill.number ? csv::format_double(*fill.number) : *fill.label;
        lines.push_back("column=" + schema_[j].name + " strategy=" + fill.strategy +
                        " fill=" + value);
    }
    return lines;
}

TabularDataset FittedImputer::transform(const TabularDataset& data) const {
    if (data.specs() != schema_)
        throw SchemaError("dataset does not match the schema the imputer was fit on");
    TabularDataset out = data;
    for (std::size_t j = 0; j < schema_.size(); ++j) {
        if (schema_[j].kind == ColumnKind::numeric) {
            for (auto& cell : out.numeric(j))
                if (!cell) cell = *fills_[j].number;
        } else {
            for (auto& cell : out.categorical(j))
                if (!cell) cell = *fills_[j].label;
        }
    }
    return out;
}

FittedImputer imputer_fit(const TabularDataset& data,
                          const std::optional<std::vector<std::string>>& cat_cols, bool verbose) {
    std::vector<bool> force_mode(data.n_cols(), false);
    if (cat_cols) {
        for (const auto& name : *cat_cols) force_mode[data.column_index(name)] = true;
    }

    FittedImputer fitted;
    fitted.schema_ = data.specs();
    for (std::size_t j = 0; j < data.n_cols(); ++j) {
        const auto& spec = data.specs()[j];
        ColumnFill fill;
        if (spec.kind == ColumnKind::numeric) {
            std::vector<double> present;
            std::map<double, std::size_t> counts;
            for (const auto& cell : data.numeric(j)) {
                if (!cell) continue;
                present.push_back(*cell);
                if (force_mode[j]) ++counts[*cell];
            }
            if (present.empty())
                throw FitError("column '" + spec.name + "' has no observed values");
            fill.strategy = force_mode[j] ? "mode" : "mean";
            fill.number = force_mode[j] ? mode_of(counts) : stats::mean(present);
        } else {
            std::map<std::string, std::size_t> counts;
            for (const auto& cell : data.categorical(j))
                if (cell) ++counts[*cell];
            if (counts.empty())
                throw FitError("column '" + spec.name + "' has no observed values");
            fill.strategy = "mode";
            fill.label = mode_of(counts);
        }
        fitted.fills_.push_back(std::move(fill));
    }
    if (verbose) {
        for (const auto& line : fitted.summary_lines()) std::cout << line << "\n";
    }
    return fitted;
}

TabularDataset imputer_transform(const FittedImputer& fitted, const TabularDataset& data) {
    return fitted.transform(data);
}

TabularDataset imputer_fit_transform(const TabularDataset& data,
                                     const std::optional<std::vector<std::string>>& cat_cols,
                                     bool verbose) {
    return imputer_fit(data, cat_cols, verbose).transform(data);
}

}  // namespace missim::impute
