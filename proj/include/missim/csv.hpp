#pragma once

#include <string>
#include <string_view>

#include "missim/table.hpp"

namespace missim::csv {

// Tokens that read as a missing cell when they appear unquoted. Quoting a
// field always makes it a literal value.
bool is_missing_token(std::string_view field);

// Shortest decimal form that round-trips the exact double.
std::string format_double(double v);

// Header row of names, then data rows. Column types are inferred: a column is
// numeric when every present cell parses completely as a finite number,
// otherwise categorical. Throws ParseError on malformed input.
TabularDataset parse_csv(std::string_view text);
TabularDataset load_csv_file(const std::string& path);  // IoError when unreadable

std::string format_csv(const TabularDataset& data);
void write_csv_file(const TabularDataset& data, const std::string& path);

// Mask grids travel as CSV with header c0..c{p-1} and 0/1 cells.
std::string format_mask_csv(const MissingMask& mask);
void write_mask_csv_file(const MissingMask& mask, const std::string& path);
MissingMask parse_mask_csv(std::string_view text);
MissingMask load_mask_csv_file(const std::string& path);

}  // namespace missim::csv
