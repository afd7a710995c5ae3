#include "missim/table.hpp"

#include <algorithm>

#include "missim/errors.hpp"

namespace missim {

std::size_t MissingMask::missing_count() const {
    std::size_t k = 0;
    for (auto f : flags_)
        if (f == 0) ++k;
    return k;
}

double MissingMask::missing_fraction() const {
    if (flags_.empty()) return 0.0;
    return static_cast<double>(missing_count()) / static_cast<double>(flags_.size());
}

const ColumnSpec& TabularDataset::spec(std::size_t j) const {
    if (j >= specs_.size()) throw ShapeError("column index out of range");
    return specs_[j];
}

std::size_t TabularDataset::column_index(const std::string& name) const {
    auto idx = find_column(name);
    if (!idx) throw SchemaError("no column named '" + name + "'");
    return *idx;
}

std::optional<std::size_t> TabularDataset::find_column(const std::string& name) const {
    for (std::size_t j = 0; j < specs_.size(); ++j)
        if (specs_[j].name == name) return j;
    return std::nullopt;
}

void TabularDataset::check_length(std::size_t incoming) const {
    if (!specs_.empty() && incoming != n_rows_)
        throw ShapeError("column length disagrees with the table");
}

void TabularDataset::add_numeric_column(std::string name, NumericColumn values) {
    if (find_column(name)) throw SchemaError("duplicate column name '" + name + "'");
    check_length(values.size());
    n_rows_ = values.size();
    specs_.push_back({std::move(name), ColumnKind::numeric});
    columns_.emplace_back(std::move(values));
}

void TabularDataset::add_categorical_column(std::string name, CategoricalColumn values) {
    if (find_column(name)) throw SchemaError("duplicate column name '" + name + "'");
    check_length(values.size());
    n_rows_ = values.size();
    specs_.push_back({std::move(name), ColumnKind::categorical});
    columns_.emplace_back(std::move(values));
}

const NumericColumn& TabularDataset::numeric(std::size_t j) const {
    if (j >= columns_.size()) throw ShapeError("column index out of range");
    auto* p = std::get_if<NumericColumn>(&columns_[j]);
    if (!p) throw SchemaError("column '" + specs_[j].name + "' is not numeric");
    return *p;
}

const CategoricalColumn& TabularDataset::categorical(std::size_t j) const {
    if (j >= columns_.size()) throw ShapeError("column index out of range");
    auto* p = std::get_if<CategoricalColumn>(&columns_[j]);
    if (!p) throw SchemaError("column '" + specs_[j].name + "' is not categorical");
    return *p;
}

NumericColumn& TabularDataset::numeric(std::size_t j) {
    return const_cast<NumericColumn&>(std::as_const(*this).numeric(j));
}

CategoricalColumn& TabularDataset::categorical(std::size_t j) {
    return const_cast<CategoricalColumn&>(std::as_const(*this).categorical(j));
}

bool TabularDataset::is_missing(std::size_t i, std::size_t j) const {
    if (j >= columns_.size() || i >= n_rows_) throw ShapeError("cell index out of range");
    if (auto* p = std::get_if<NumericColumn>(&columns_[j])) return !(*p)[i].has_value();
    return !std::get<CategoricalColumn>(columns_[j])[i].has_value();
}

void TabularDataset::clear_cell(std::size_t i, std::size_t j) {
    if (j >= columns_.size() || i >= n_rows_) throw ShapeError("cell index out of range");
    if (auto* p = std::get_if<NumericColumn>(&columns_[j]))
        (*p)[i].reset();
    else
        std::get<CategoricalColumn>(columns_[j])[i].reset();
}

bool TabularDataset::is_complete() const {
    for (std::size_t j = 0; j < n_cols(); ++j)
        for (std::size_t i = 0; i < n_rows_; ++i)
            if (is_missing(i, j)) return false;
    return true;
}

std::size_t OrdinalEncoding::code_of(const std::string& label) const {
    auto it = std::lower_bound(sorted_labels.begin(), sorted_labels.end(), label);
    if (it == sorted_labels.end() || *it != label)
        throw DataError("label '" + label + "' was not seen when the encoding was fit");
    return static_cast<std::size_t>(it - sorted_labels.begin());
}

OrdinalEncoding fit_ordinal_encoding(const CategoricalColumn& column) {
    OrdinalEncoding enc;
    for (const auto& v : column)
        if (v.has_value()) enc.sorted_labels.push_back(*v);
    std::sort(enc.sorted_labels.begin(), enc.sorted_labels.end());
    enc.sorted_labels.erase(std::unique(enc.sorted_labels.begin(), enc.sorted_labels.end()),
                            enc.sorted_labels.end());
    return enc;
}

std::vector<std::optional<double>> ordinal_encode(const CategoricalColumn& column) {
    auto enc = fit_ordinal_encoding(column);
    std::vector<std::optional<double>> out;
    out.reserve(column.size());
    for (const auto& v : column) {
        if (v.has_value())
            out.emplace_back(static_cast<double>(enc.code_of(*v)));
        else
            out.emplace_back(std::nullopt);
    }
    return out;
}

NumericView make_numeric_view(const TabularDataset& data) {
    NumericView view;
    view.n_rows = data.n_rows();
    view.cols.reserve(data.n_cols());
    for (std::size_t j = 0; j < data.n_cols(); ++j) {
        if (data.spec(j).kind == ColumnKind::numeric)
            view.cols.emplace_back(data.numeric(j));
        else
            view.cols.emplace_back(ordinal_encode(data.categorical(j)));
    }
    return view;
}

MissingMask missingness_of(const TabularDataset& data) {
    MissingMask mask(data.n_rows(), data.n_cols(), 1);
    for (std::size_t j = 0; j < data.n_cols(); ++j)
        for (std::size_t i = 0; i < data.n_rows(); ++i)
            if (data.is_missing(i, j)) mask.set(i, j, 0);
    return mask;
}

TabularDataset apply_mask(const TabularDataset& data, const MissingMask& mask) {
    if (mask.rows() != data.n_rows() || mask.cols() != data.n_cols())
        throw ShapeError("mask extents disagree with the table");
    TabularDataset out = data;
    for (std::size_t j = 0; j < out.n_cols(); ++j)
        for (std::size_t i = 0; i < out.n_rows(); ++i)
            if (mask.at(i, j) == 0) out.clear_cell(i, j);
    return out;
}

}  // namespace missim
