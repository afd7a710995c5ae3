#include "missim/visual.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "missim/errors.hpp"

namespace missim::visual {

namespace {

constexpr const char* kAbsentColor = "#C8C8C8";
constexpr std::size_t kMaxRenderedRows = 1000;

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

struct Rgb {
    int r, g, b;
};

Rgb parse_color(const std::string& hex) {
    if (hex.size() != 6) throw ConfigError("color '" + hex + "' must be 6 hex digits");
    int v[6];
    for (int i = 0; i < 6; ++i) {
        v[i] = hex_digit(hex[i]);
        if (v[i] < 0) throw ConfigError("color '" + hex + "' must be 6 hex digits");
    }
    return {v[0] * 16 + v[1], v[2] * 16 + v[3], v[4] * 16 + v[5]};
}

void validate_style(const PlotStyle& style) {
    if (!(style.cell_size > 0)) throw ConfigError("cell size must be positive");
    if (!(style.font_size > 0)) throw ConfigError("font size must be positive");
    parse_color(style.observed_color);
    parse_color(style.missing_color);
    parse_color(style.negative_color);
    parse_color(style.positive_color);
}

std::string format_rgb(const Rgb& c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02X%02X%02X", c.r, c.g, c.b);
    return buf;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape_xml(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

void open_svg(std::string& svg, double width, double height) {
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
           num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
}

void add_rect(std::string& svg, double x, double y, double size, const std::string& fill) {
    svg += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(size) +
           "\" height=\"" + num(size) + "\" fill=\"" + fill + "\"/>\n";
}

void add_text(std::string& svg, double x, double y, double font, const std::string& anchor,
              const std::string& content) {
    svg += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"monospace\" font-size=\"" +
           num(font) + "\" text-anchor=\"" + anchor + "\">" + escape_xml(content) + "</text>\n";
}

}  // namespace

std::string interpolate_diverging(double value, const PlotStyle& style) {
    const double v = std::clamp(value, -1.0, 1.0);
    const Rgb end = parse_color(v < 0 ? style.negative_color : style.positive_color);
    const double t = std::abs(v);
    const auto blend = [t](int channel) {
        return static_cast<int>(std::lround(255.0 + (channel - 255.0) * t));
    };
    return format_rgb({blend(end.r), blend(end.g), blend(end.b)});
}

std::string render_missing_matrix(const MissingMask& mask,
                                  const std::vector<std::string>& columns,
                                  const PlotStyle& style) {
    validate_style(style);
    const std::size_t rows = mask.rows();
    const std::size_t cols = mask.cols();
    if (rows == 0 || cols == 0) throw EmptyInputError("cannot render an empty mask");
    if (columns.size() != cols)
        throw ShapeError("need one column label per mask column");

    const std::size_t stride =
        rows > kMaxRenderedRows ? (rows + kMaxRenderedRows - 1) / kMaxRenderedRows : 1;
    const std::size_t rendered = (rows + stride - 1) / stride;
    const double cell = style.cell_size;
    const double font = style.font_size;
    const std::string observed = "#" + style.observed_color;
    const std::string missing = "#" + style.missing_color;

    double y = 10.0;
    std::string body;
    if (style.title) {
        add_text(body, 10.0, y + font, font * 1.2, "start", *style.title);
        y += font * 1.2 + 8.0;
    }
    if (stride > 1) {
        char note[96];
        std::snprintf(note, sizeof note, "stride %zu: showing %zu of %zu rows", stride, rendered,
                      rows);
        add_text(body, 10.0, y + font, font, "start", note);
        y += font + 6.0;
    }
    for (std::size_t j = 0; j < cols; ++j)
        add_text(body, 10.0 + j * cell + cell / 2.0, y + font, font, "middle", columns[j]);
    y += font + 6.0;

    for (std::size_t k = 0; k < rendered; ++k) {
        const std::size_t i = k * stride;
        for (std::size_t j = 0; j < cols; ++j)
            add_rect(body, 10.0 + j * cell, y + k * cell, cell,
                     mask.at(i, j) ? observed : missing);
    }

    const double width = 20.0 + cols * cell;
    const double height = y + rendered * cell + 10.0;
    std::string svg;
    open_svg(svg, width, height);
    svg += body;
    svg += "</svg>\n";
    return svg;
}

std::string render_nullity_heatmap(const analysis::CorrelationGrid& grid,
                                   const PlotStyle& style) {
    validate_style(style);
    const std::size_t p = grid.columns.size();
    if (p == 0) throw EmptyInputError("cannot render an empty grid");
    if (grid.values.size() != p) throw ShapeError("correlation grid must be square");
    for (const auto& row : grid.values)
        if (row.size() != p) throw ShapeError("correlation grid must be square");

    const double cell = style.cell_size;
    const double font = style.font_size;
    std::size_t longest = 1;
    for (const auto& name : grid.columns) longest = std::max(longest, name.size());
    const double left = 12.0 + 0.62 * font * static_cast<double>(longest);

    double y = 10.0;
    std::string body;
    if (style.title) {
        add_text(body, 10.0, y + font, font * 1.2, "start", *style.title);
        y += font * 1.2 + 8.0;
    }
    for (std::size_t j = 0; j < p; ++j)
        add_text(body, left + j * cell + cell / 2.0, y + font, font, "middle", grid.columns[j]);
    y += font + 6.0;
    for (std::size_t i = 0; i < p; ++i)
        add_text(body, left - 4.0, y + i * cell + cell / 2.0 + font * 0.35, font, "end",
                 grid.columns[i]);

    std::string annotations;
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            const auto& value = grid.values[i][j];
            add_rect(body, left + j * cell, y + i * cell, cell,
                     value ? interpolate_diverging(*value, style) : kAbsentColor);
            add_text(annotations, left + j * cell + cell / 2.0,
                     y + i * cell + cell / 2.0 + font * 0.35, font, "middle",
                     value ? num(*value) : "-");
        }
    }

    const double width = left + p * cell + 10.0;
    const double height = y + p * cell + 10.0;
    std::string svg;
    open_svg(svg, width, height);
    svg += body;
    svg += annotations;
    svg += "</svg>\n";
    return svg;
}

}  // namespace missim::visual
