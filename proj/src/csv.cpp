#include "missim/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "missim/errors.hpp"

namespace missim::csv {

namespace {

struct RawField {
    std::string text;
    bool quoted = false;
};

using RawRecord = std::vector<RawField>;

// RFC 4180 reader: quoted fields may hold commas, newlines, and doubled
// quotes. Quote characters inside unquoted fields pass through literally.
std::vector<RawRecord> read_records(std::string_view text) {
    std::vector<RawRecord> records;
    RawRecord record;
    RawField field;
    enum class State { field_start, unquoted, quoted, after_quote };
    State state = State::field_start;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field = RawField{};
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        char c = text[i];
        switch (state) {
            case State::field_start:
                if (c == '"') {
                    field.quoted = true;
                    state = State::quoted;
                } else if (c == ',') {
                    end_field();
                } else if (c == '\n') {
                    end_record();
                } else if (c == '\r') {
                    if (i + 1 < n && text[i + 1] == '\n') ++i;
                    end_record();
                } else {
                    field.text.push_back(c);
                    state = State::unquoted;
                }
                break;
            case State::unquoted:
                if (c == ',') {
                    end_field();
                    state = State::field_start;
                } else if (c == '\n') {
                    end_record();
                    state = State::field_start;
                } else if (c == '\r') {
                    if (i + 1 < n && text[i + 1] == '\n') ++i;
                    end_record();
                    state = State::field_start;
                } else {
                    field.text.push_back(c);
                }
                break;
            case State::quoted:
                if (c == '"') {
                    state = State::after_quote;
                } else {
                    field.text.push_back(c);
                }
                break;
            case State::after_quote:
                if (c == '"') {
                    field.text.push_back('"');
                    state = State::quoted;
                } else if (c == ',') {
                    end_field();
                    state = State::field_start;
                } else if (c == '\n') {
                    end_record();
                    state = State::field_start;
                } else if (c == '\r') {
                    if (i + 1 < n && text[i + 1] == '\n') ++i;
                    end_record();
                    state = State::field_start;
                } else {
                    throw ParseError("unexpected character after closing quote");
                }
                break;
        }
        ++i;
    }
    if (state == State::quoted) throw ParseError("unterminated quoted field");
    if (state != State::field_start || !record.empty()) end_record();
    return records;
}

bool parse_finite_double(std::string_view s, double& out) {
    // from_chars takes no leading '+'; accept exactly one, not followed by another sign
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
        if (s.empty() || s.front() == '+' || s.front() == '-') return false;
    }
    if (s.empty()) return false;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return false;
    if (!std::isfinite(v)) return false;
    out = v;
    return true;
}

bool field_is_missing(const RawField& f) { return !f.quoted && is_missing_token(f.text); }

bool needs_quoting(std::string_view s) {
    if (is_missing_token(s)) return true;  // keep the label distinct from a blank cell
    return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

void append_csv_field(std::string& out, std::string_view s) {
    if (!needs_quoting(s)) {
        out.append(s);
        return;
    }
    out.push_back('"');
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
}

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw IoError("short write to '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << f.rdbuf();
    if (f.bad()) throw IoError("read failure on '" + path + "'");
    return buf.str();
}

}  // namespace

bool is_missing_token(std::string_view field) {
    return field.empty() || field == "NA" || field == "NaN";
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw Error("number formatting failed");
    return std::string(buf, ptr);
}

TabularDataset parse_csv(std::string_view text) {
    auto records = read_records(text);
    if (records.empty()) throw ParseError("no header row");
    const RawRecord& header = records.front();
    const std::size_t p = header.size();
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != p) {
            throw ParseError("row " + std::to_string(r) + " has " +
                             std::to_string(records[r].size()) + " fields, expected " +
                             std::to_string(p));
        }
    }

    const std::size_t n = records.size() - 1;
    TabularDataset data;
    for (std::size_t j = 0; j < p; ++j) {
        bool numeric = true;
        for (std::size_t r = 1; r <= n && numeric; ++r) {
            const RawField& f = records[r][j];
            if (field_is_missing(f)) continue;
            double ignored;
            numeric = parse_finite_double(f.text, ignored);
        }
        if (numeric) {
            NumericColumn col(n);
            for (std::size_t r = 1; r <= n; ++r) {
                const RawField& f = records[r][j];
                if (field_is_missing(f)) continue;
                double v = 0.0;
                parse_finite_double(f.text, v);
                col[r - 1] = v;
            }
            data.add_numeric_column(header[j].text, std::move(col));
        } else {
            CategoricalColumn col(n);
            for (std::size_t r = 1; r <= n; ++r) {
                const RawField& f = records[r][j];
                if (!field_is_missing(f)) col[r - 1] = f.text;
            }
            data.add_categorical_column(header[j].text, std::move(col));
        }
    }
    return data;
}

TabularDataset load_csv_file(const std::string& path) {
    try {
        return parse_csv(read_text_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string format_csv(const TabularDataset& data) {
    std::string out;
    for (std::size_t j = 0; j < data.n_cols(); ++j) {
        if (j) out.push_back(',');
        append_csv_field(out, data.spec(j).name);
    }
    out.push_back('\n');
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        for (std::size_t j = 0; j < data.n_cols(); ++j) {
            if (j) out.push_back(',');
            if (data.spec(j).kind == ColumnKind::numeric) {
                const auto& v = data.numeric(j)[i];
                if (v.has_value()) out.append(format_double(*v));
            } else {
                const auto& v = data.categorical(j)[i];
                if (v.has_value()) append_csv_field(out, *v);
            }
        }
        out.push_back('\n');
    }
    return out;
}

void write_csv_file(const TabularDataset& data, const std::string& path) {
    write_text_file(path, format_csv(data));
}

std::string format_mask_csv(const MissingMask& mask) {
    std::string out;
    for (std::size_t j = 0; j < mask.cols(); ++j) {
        if (j) out.push_back(',');
        out.push_back('c');
        out.append(std::to_string(j));
    }
    out.push_back('\n');
    for (std::size_t i = 0; i < mask.rows(); ++i) {
        for (std::size_t j = 0; j < mask.cols(); ++j) {
            if (j) out.push_back(',');
            out.push_back(mask.at(i, j) ? '1' : '0');
        }
        out.push_back('\n');
    }
    return out;
}

void write_mask_csv_file(const MissingMask& mask, const std::string& path) {
    write_text_file(path, format_mask_csv(mask));
}

MissingMask parse_mask_csv(std::string_view text) {
    auto records = read_records(text);
    if (records.empty()) throw ParseError("no header row");
    const std::size_t p = records.front().size();
    const std::size_t n = records.size() - 1;
    MissingMask mask(n, p, 1);
    for (std::size_t r = 1; r <= n; ++r) {
        if (records[r].size() != p)
            throw ParseError("mask row " + std::to_string(r) + " has " +
                             std::to_string(records[r].size()) + " fields, expected " +
                             std::to_string(p));
        for (std::size_t j = 0; j < p; ++j) {
            const std::string& cell = records[r][j].text;
            if (cell == "0")
                mask.set(r - 1, j, 0);
            else if (cell == "1")
                mask.set(r - 1, j, 1);
            else
                throw ParseError("mask cell must be 0 or 1, got '" + cell + "'");
        }
    }
    return mask;
}

MissingMask load_mask_csv_file(const std::string& path) {
    try {
        return parse_mask_csv(read_text_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace missim::csv
