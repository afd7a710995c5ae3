#pragma once

#include <optional>
#include <string>
#include <vector>

#include "missim/analysis.hpp"
#include "missim/table.hpp"

namespace missim::visual {

struct PlotStyle {
    double cell_size = 16.0;
    // 6 hex digits, no leading '#'
    std::string observed_color = "DDDDDD";
    std::string missing_color = "B2182B";
    std::string negative_color = "2166AC";
    std::string positive_color = "B2182B";
    double font_size = 10.0;
    std::optional<std::string> title;
};

// Linear per-channel blend from white at 0 to the matching endpoint at
// (-)1; the value is clamped to [-1, 1]. Returns "#RRGGBB".
std::string interpolate_diverging(double value, const PlotStyle& style);

// One rectangle per cell in row-major order, column labels across the top.
// Above 1000 rows only every stride-th row is drawn and the stride is
// annotated. Throws EmptyInputError on an empty mask, ShapeError when the
// label count does not match, ConfigError on a malformed style.
std::string render_missing_matrix(const MissingMask& mask,
                                  const std::vector<std::string>& columns,
                                  const PlotStyle& style = {});

// p x p cells colored by the diverging palette, each annotated with its
// value to two decimals; absent entries are gray with a dash. Throws
// ShapeError when the grid is not square.
std::string render_nullity_heatmap(const analysis::CorrelationGrid& grid,
                                   const PlotStyle& style = {});

}  // namespace missim::visual
