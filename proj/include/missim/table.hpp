#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace missim {

enum class ColumnKind { numeric, categorical };

struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;

    bool operator==(const ColumnSpec&) const = default;
};

using NumericColumn = std::vector<std::optional<double>>;
using CategoricalColumn = std::vector<std::optional<std::string>>;

// Row-major grid of 0/1 flags, 1 = observed, 0 = missing.
class MissingMask {
  public:
    MissingMask() = default;
    MissingMask(std::size_t rows, std::size_t cols, std::uint8_t fill = 1)
        : rows_(rows), cols_(cols), flags_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    std::uint8_t at(std::size_t i, std::size_t j) const { return flags_[i * cols_ + j]; }
    void set(std::size_t i, std::size_t j, std::uint8_t v) { flags_[i * cols_ + j] = v; }

    std::size_t missing_count() const;
    // Missing cells as a fraction of all cells; 0 for an empty grid.
    double missing_fraction() const;

    std::span<const std::uint8_t> flat() const { return flags_; }

    bool operator==(const MissingMask&) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint8_t> flags_;
};

// Column-major mixed-type table. Every column holds n_rows slots; a slot
// without a value is a missing cell.
class TabularDataset {
  public:
    using ColumnData = std::variant<NumericColumn, CategoricalColumn>;

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_cols() const { return specs_.size(); }

    const std::vector<ColumnSpec>& specs() const { return specs_; }
    const ColumnSpec& spec(std::size_t j) const;

    // Throws SchemaError for an unknown name.
    std::size_t column_index(const std::string& name) const;
    std::optional<std::size_t> find_column(const std::string& name) const;

    void add_numeric_column(std::string name, NumericColumn values);
    void add_categorical_column(std::string name, CategoricalColumn values);

    const NumericColumn& numeric(std::size_t j) const;        // SchemaError if categorical
    const CategoricalColumn& categorical(std::size_t j) const;  // SchemaError if numeric
    NumericColumn& numeric(std::size_t j);
    CategoricalColumn& categorical(std::size_t j);

    bool is_missing(std::size_t i, std::size_t j) const;
    void clear_cell(std::size_t i, std::size_t j);

    bool is_complete() const;

    bool operator==(const TabularDataset&) const = default;

  private:
    void check_length(std::size_t incoming) const;

    std::size_t n_rows_ = 0;
    std::vector<ColumnSpec> specs_;
    std::vector<ColumnData> columns_;
};

// Codes for categorical labels: position of each label among the sorted
// distinct labels of the column, so the coding is content-determined rather
// than appearance-ordered.
struct OrdinalEncoding {
    std::vector<std::string> sorted_labels;
    std::size_t code_of(const std::string& label) const;  // DataError if absent
};

OrdinalEncoding fit_ordinal_encoding(const CategoricalColumn& column);
std::vector<std::optional<double>> ordinal_encode(const CategoricalColumn& column);

// All columns of a dataset as numbers: numeric columns pass through,
// categorical columns are ordinal-encoded. Missing cells stay absent.
struct NumericView {
    std::size_t n_rows = 0;
    std::vector<std::vector<std::optional<double>>> cols;  // column-major

    bool operator==(const NumericView&) const = default;
};

NumericView make_numeric_view(const TabularDataset& data);

// 1 where the cell holds a value, 0 where it is missing.
MissingMask missingness_of(const TabularDataset& data);

// Copy of `data` with cells blanked wherever the mask holds 0.
// ShapeError when mask extents disagree with the table.
TabularDataset apply_mask(const TabularDataset& data, const MissingMask& mask);

}  // namespace missim
