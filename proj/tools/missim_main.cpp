// missim: simulate, diagnose, impute, and visualize missing data in CSV tables.
//
// Subcommands: generate, analyze, evaluate, impute, visualize. Exit codes are
// a stable contract: 0 success, 1 I/O failure, 2 invalid configuration or
// data. All randomness flows from config seeds, so repeated invocations with
// the same inputs produce byte-identical outputs.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "missim/analysis.hpp"
#include "missim/csv.hpp"
#include "missim/errors.hpp"
#include "missim/generator.hpp"
#include "missim/impute.hpp"
#include "missim/table.hpp"
#include "missim/visual.hpp"

namespace {

using nlohmann::json;

std::string format4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

// ---------------------------------------------------------------------------
// config parsing

// The config schema is closed: a key outside `allowed` is an error, so typos
// fail loudly instead of silently falling back to defaults.
void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& where) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const auto& key : allowed)
            if (item.key() == key) known = true;
        if (!known)
            throw missim::ConfigError("unknown key '" + item.key() + "' in " + where);
    }
}

std::string string_field(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.at(key).is_string())
        throw missim::ConfigError("'" + key + "' in " + where + " must be a string");
    return obj.at(key).get<std::string>();
}

double number_field(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.at(key).is_number())
        throw missim::ConfigError("'" + key + "' in " + where + " must be a number");
    return obj.at(key).get<double>();
}

std::vector<std::string> string_list_field(const json& obj, const std::string& key,
                                           const std::string& where) {
    const json& arr = obj.at(key);
    if (!arr.is_array())
        throw missim::ConfigError("'" + key + "' in " + where + " must be a list of strings");
    std::vector<std::string> out;
    for (const auto& item : arr) {
        if (!item.is_string())
            throw missim::ConfigError("'" + key + "' in " + where + " must be a list of strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

missim::mech::Family family_from_string(const std::string& name, const std::string& where) {
    if (name == "mcar") return missim::mech::Family::mcar;
    if (name == "mar") return missim::mech::Family::mar;
    if (name == "mnar") return missim::mech::Family::mnar;
    throw missim::ConfigError("unknown mechanism family '" + name + "' in " + where +
                              " (expected mcar, mar, or mnar)");
}

// Mechanisms that draw random numbers need an explicit seed; value-threshold
// and rank-based mechanisms are deterministic and may omit it.
bool consumes_randomness(missim::mech::Family family, int variant) {
    using missim::mech::Family;
    switch (family) {
        case Family::mcar: return true;
        case Family::mar: return variant == 1 || variant == 5 || variant == 6;
        case Family::mnar: return variant == 2 || variant == 3;
    }
    return true;
}

missim::gen::RuleSpec rule_from_json(const json& obj, bool is_global, const std::string& where) {
    std::vector<std::string> allowed = {"family", "variant", "rate", "seed", "depend_on",
                                        "params"};
    if (is_global)
        allowed.push_back("targets");
    else
        allowed.push_back("columns");
    require_keys(obj, allowed, where);
    for (const char* key : {"family", "variant", "rate"})
        if (!obj.contains(key))
            throw missim::ConfigError(std::string("'") + key + "' is required in " + where);

    missim::gen::RuleSpec rule;
    rule.family = family_from_string(string_field(obj, "family", where), where);
    if (!obj.at("variant").is_number_integer())
        throw missim::ConfigError("'variant' in " + where + " must be an integer");
    rule.variant = obj.at("variant").get<int>();
    rule.rate = number_field(obj, "rate", where);

    if (obj.contains("seed")) {
        const json& seed = obj.at("seed");
        if (!seed.is_number_unsigned())
            throw missim::ConfigError("'seed' in " + where + " must be a non-negative integer");
        rule.seed = seed.get<std::uint64_t>();
    } else if (consumes_randomness(rule.family, rule.variant)) {
        throw missim::ConfigError("'seed' is required in " + where +
                                  ": the mechanism draws random numbers");
    }

    if (obj.contains("depend_on")) rule.depend_on = string_list_field(obj, "depend_on", where);
    if (obj.contains("targets")) rule.targets = string_list_field(obj, "targets", where);

    if (obj.contains("params")) {
        const json& params = obj.at("params");
        if (!params.is_object())
            throw missim::ConfigError("'params' in " + where + " must be an object");
        require_keys(params, {"up_percentile", "obs_percentile", "side", "group_odds"},
                     "params of " + where);
        if (params.contains("up_percentile"))
            rule.up_percentile = number_field(params, "up_percentile", where);
        if (params.contains("obs_percentile"))
            rule.obs_percentile = number_field(params, "obs_percentile", where);
        if (params.contains("group_odds"))
            rule.group_odds = number_field(params, "group_odds", where);
        if (params.contains("side")) {
            std::string side = string_field(params, "side", where);
            if (side == "upper")
                rule.side = missim::mech::Side::upper;
            else if (side == "lower")
                rule.side = missim::mech::Side::lower;
            else if (side == "both")
                rule.side = missim::mech::Side::both;
            else
                throw missim::ConfigError("unknown side '" + side + "' in " + where +
                                          " (expected upper, lower, or both)");
        }
    }
    return rule;
}

missim::gen::GeneratorConfig config_from_json(const json& root) {
    if (!root.is_object()) throw missim::ConfigError("config root must be a JSON object");
    require_keys(root, {"mechanism", "column_rules", "label_column", "cat_cols"}, "config");

    bool has_mechanism = root.contains("mechanism");
    bool has_rules = root.contains("column_rules");
    if (has_mechanism == has_rules)
        throw missim::ConfigError(
            "config needs exactly one of 'mechanism' and 'column_rules'");

    missim::gen::GeneratorConfig config;
    if (has_mechanism) {
        config.global_rule = rule_from_json(root.at("mechanism"), true, "mechanism");
    } else {
        const json& rules = root.at("column_rules");
        if (!rules.is_array() || rules.empty())
            throw missim::ConfigError("'column_rules' must be a non-empty list");
        for (std::size_t k = 0; k < rules.size(); ++k) {
            std::string where = "column_rules[" + std::to_string(k) + "]";
            const json& entry = rules.at(k);
            if (!entry.is_object())
                throw missim::ConfigError(where + " must be an object");
            if (!entry.contains("columns"))
                throw missim::ConfigError("'columns' is required in " + where);
            missim::gen::GroupRule group;
            group.columns = string_list_field(entry, "columns", where);
            group.rule = rule_from_json(entry, false, where);
            config.column_rules.push_back(std::move(group));
        }
    }
    if (root.contains("label_column"))
        config.label_column = string_field(root, "label_column", "config");
    if (root.contains("cat_cols")) string_list_field(root, "cat_cols", "config");
    return config;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw missim::IoError("cannot read config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return json::parse(buffer.str());
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw missim::IoError("cannot write file '" + path + "'");
    out << text;
    out.flush();
    if (!out) throw missim::IoError("failed while writing file '" + path + "'");
}

// ---------------------------------------------------------------------------
// text tables

// Prints a labeled grid with the corner label over the row-label column,
// column labels and cells right-aligned.
void print_grid(const std::string& corner, const std::vector<std::string>& row_labels,
                const std::vector<std::string>& col_labels,
                const std::vector<std::vector<std::string>>& cells) {
    std::size_t label_width = corner.size();
    for (const auto& name : row_labels) label_width = std::max(label_width, name.size());
    std::vector<std::size_t> widths;
    for (std::size_t j = 0; j < col_labels.size(); ++j) {
        std::size_t w = col_labels[j].size();
        for (const auto& row : cells) w = std::max(w, row[j].size());
        widths.push_back(w);
    }

    std::string line = corner + std::string(label_width - corner.size(), ' ');
    for (std::size_t j = 0; j < col_labels.size(); ++j) {
        line += "  ";
        line += std::string(widths[j] - col_labels[j].size(), ' ') + col_labels[j];
    }
    std::cout << line << '\n';
    for (std::size_t i = 0; i < row_labels.size(); ++i) {
        line = row_labels[i] + std::string(label_width - row_labels[i].size(), ' ');
        for (std::size_t j = 0; j < col_labels.size(); ++j) {
            line += "  ";
            line += std::string(widths[j] - cells[i][j].size(), ' ') + cells[i][j];
        }
        std::cout << line << '\n';
    }
}

void print_optional_grid(const std::vector<std::string>& columns,
                         const std::vector<std::vector<std::optional<double>>>& values) {
    std::vector<std::vector<std::string>> cells;
    for (const auto& row : values) {
        std::vector<std::string> formatted;
        for (const auto& value : row)
            formatted.push_back(value ? format4(*value) : std::string("-"));
        cells.push_back(std::move(formatted));
    }
    print_grid("", columns, columns, cells);
}

// ---------------------------------------------------------------------------
// subcommands

struct GenerateOpts {
    std::string input, config, output, mask_out, label;
};

int cmd_generate(const GenerateOpts& opts) {
    missim::TabularDataset data = missim::csv::load_csv_file(opts.input);
    missim::gen::GeneratorConfig config = config_from_json(load_json_file(opts.config));
    if (!opts.label.empty()) config.label_column = opts.label;

    missim::MissingMask mask;
    missim::TabularDataset masked = missim::gen::fit_transform(config, data, std::nullopt, &mask);
    missim::csv::write_csv_file(masked, opts.output);
    if (!opts.mask_out.empty()) missim::csv::write_mask_csv_file(mask, opts.mask_out);
    std::cout << "achieved_rate=" << format4(mask.missing_fraction()) << '\n';
    return 0;
}

struct AnalyzeOpts {
    std::string input;
    bool mcar_test = false;
    bool t_tests = false;
    std::string nullity;
};

missim::analysis::CorrelationMethod method_from_string(const std::string& name) {
    if (name == "pearson") return missim::analysis::CorrelationMethod::pearson;
    if (name == "spearman") return missim::analysis::CorrelationMethod::spearman;
    if (name == "kendall") return missim::analysis::CorrelationMethod::kendall;
    throw missim::ConfigError("unknown correlation method '" + name +
                              "' (expected pearson, spearman, or kendall)");
}

int cmd_analyze(const AnalyzeOpts& opts) {
    missim::TabularDataset data = missim::csv::load_csv_file(opts.input);
    missim::analysis::MissingRateSummary summary = missim::analysis::compute_missing_rate(data);

    std::vector<std::string> names;
    std::vector<std::vector<std::string>> cells;
    for (const auto& [name, column] : summary.per_column) {
        names.push_back(name);
        cells.push_back({std::to_string(column.missing_count),
                         format4(column.missing_fraction)});
    }
    print_grid("column", names, {"missing", "fraction"}, cells);
    std::cout << "overall=" << format4(summary.overall_fraction) << " rows=" << summary.n_rows
              << " complete_rows=" << summary.n_fully_observed_rows << '\n';

    if (opts.mcar_test) {
        missim::analysis::McarTestResult result = missim::analysis::little_mcar_test(data);
        std::cout << missim::analysis::mcar_report(result);
    }
    if (opts.t_tests) {
        missim::analysis::PValueMatrix matrix = missim::analysis::mcar_t_tests(data);
        std::cout << "pairwise t-test p-values (row split by missingness, column compared)\n";
        print_optional_grid(matrix.columns, matrix.p_values);
    }
    if (!opts.nullity.empty()) {
        missim::analysis::CorrelationGrid grid =
            missim::analysis::nullity_correlation(data, method_from_string(opts.nullity));
        std::cout << "nullity correlation (" << opts.nullity << ")\n";
        print_optional_grid(grid.columns, grid.values);
    }
    return 0;
}

std::optional<std::vector<std::string>> split_column_list(const std::string& csv_list) {
    if (csv_list.empty()) return std::nullopt;
    std::vector<std::string> out;
    std::string current;
    for (char c : csv_list) {
        if (c == ',') {
            if (current.empty())
                throw missim::ConfigError("empty column name in list '" + csv_list + "'");
            out.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    if (current.empty())
        throw missim::ConfigError("empty column name in list '" + csv_list + "'");
    out.push_back(current);
    return out;
}

struct EvaluateOpts {
    std::string truth, imputed, mask, metric = "rmse", cat_cols;
};

int cmd_evaluate(const EvaluateOpts& opts) {
    missim::TabularDataset truth = missim::csv::load_csv_file(opts.truth);
    missim::TabularDataset imputed = missim::csv::load_csv_file(opts.imputed);
    missim::MissingMask mask = missim::csv::load_mask_csv_file(opts.mask);

    missim::analysis::NumericMetric metric;
    if (opts.metric == "rmse")
        metric = missim::analysis::NumericMetric::rmse;
    else if (opts.metric == "mae")
        metric = missim::analysis::NumericMetric::mae;
    else
        throw missim::ConfigError("unknown metric '" + opts.metric + "' (expected rmse or mae)");

    missim::analysis::EvaluationReport report = missim::analysis::evaluate_imputation(
        truth, imputed, mask, metric, split_column_list(opts.cat_cols));
    for (const auto& [name, column] : report.per_column) {
        std::cout << "column=" << name << " metric=" << column.metric_name
                  << " raw=" << format4(column.raw_score)
                  << " normalized=" << format4(column.normalized_score)
                  << " cells=" << column.n_evaluated_cells << '\n';
    }
    std::cout << "avg_err=" << format4(report.avg_err) << '\n';
    return 0;
}

struct ImputeOpts {
    std::string input, output, cat_cols;
    bool verbose = false;
};

int cmd_impute(const ImputeOpts& opts) {
    missim::TabularDataset data = missim::csv::load_csv_file(opts.input);
    missim::impute::FittedImputer fitted =
        missim::impute::imputer_fit(data, split_column_list(opts.cat_cols), opts.verbose);
    missim::csv::write_csv_file(fitted.transform(data), opts.output);
    return 0;
}

struct VisualizeOpts {
    std::string input, mask, kind, out, method = "pearson";
};

// A mask can stand in for a dataset: observed flags become presence in a
// synthetic numeric table so nullity works on either input form.
missim::TabularDataset dataset_from_mask(const missim::MissingMask& mask) {
    missim::TabularDataset data;
    for (std::size_t j = 0; j < mask.cols(); ++j) {
        missim::NumericColumn column(mask.rows());
        for (std::size_t i = 0; i < mask.rows(); ++i)
            if (mask.at(i, j)) column[i] = 0.0;
        data.add_numeric_column("c" + std::to_string(j), std::move(column));
    }
    return data;
}

int cmd_visualize(const VisualizeOpts& opts) {
    bool has_input = !opts.input.empty();
    bool has_mask = !opts.mask.empty();
    if (has_input == has_mask)
        throw missim::ConfigError("give exactly one of --input and --mask");

    std::string svg;
    if (opts.kind == "matrix") {
        missim::MissingMask mask;
        std::vector<std::string> labels;
        if (has_input) {
            missim::TabularDataset data = missim::csv::load_csv_file(opts.input);
            mask = missim::missingness_of(data);
            for (const auto& spec : data.specs()) labels.push_back(spec.name);
        } else {
            mask = missim::csv::load_mask_csv_file(opts.mask);
            for (std::size_t j = 0; j < mask.cols(); ++j)
                labels.push_back("c" + std::to_string(j));
        }
        svg = missim::visual::render_missing_matrix(mask, labels);
    } else if (opts.kind == "heatmap") {
        missim::TabularDataset data =
            has_input ? missim::csv::load_csv_file(opts.input)
                      : dataset_from_mask(missim::csv::load_mask_csv_file(opts.mask));
        if (data.n_cols() < 2)
            throw missim::ConfigError("a nullity heatmap needs at least two columns");
        missim::analysis::CorrelationGrid grid =
            missim::analysis::nullity_correlation(data, method_from_string(opts.method));
        svg = missim::visual::render_nullity_heatmap(grid);
    } else {
        throw missim::ConfigError("unknown kind '" + opts.kind +
                                  "' (expected matrix or heatmap)");
    }
    write_text_file(opts.out, svg);
    return 0;
}

// Validation failures exit 2, stream failures exit 1, per the CLI contract.
int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const missim::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const missim::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: invalid config JSON: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"missing-data simulation, diagnosis, and imputation for CSV tables"};
    app.require_subcommand(1);

    GenerateOpts generate_opts;
    CLI::App* generate = app.add_subcommand(
        "generate", "mask a complete dataset with a configured missingness mechanism");
    generate->add_option("--input", generate_opts.input, "complete input CSV")->required();
    generate->add_option("--config", generate_opts.config, "mechanism config JSON")->required();
    generate->add_option("--output", generate_opts.output, "masked output CSV")->required();
    generate->add_option("--mask-out", generate_opts.mask_out, "write the 0/1 mask CSV here");
    generate->add_option("--label", generate_opts.label,
                         "label column name, overrides the config's label_column");

    AnalyzeOpts analyze_opts;
    CLI::App* analyze =
        app.add_subcommand("analyze", "summarize missingness and run diagnostics");
    analyze->add_option("--input", analyze_opts.input, "input CSV")->required();
    analyze->add_flag("--mcar-test", analyze_opts.mcar_test, "run the chi-square MCAR test");
    analyze->add_flag("--t-tests", analyze_opts.t_tests, "pairwise missingness t-tests");
    analyze->add_option("--nullity", analyze_opts.nullity,
                        "nullity correlation grid: pearson, spearman, or kendall");

    EvaluateOpts evaluate_opts;
    CLI::App* evaluate =
        app.add_subcommand("evaluate", "score an imputed dataset against the truth");
    evaluate->add_option("--truth", evaluate_opts.truth, "complete ground-truth CSV")->required();
    evaluate->add_option("--imputed", evaluate_opts.imputed, "imputed CSV")->required();
    evaluate->add_option("--mask", evaluate_opts.mask, "0/1 mask CSV from generate")->required();
    evaluate->add_option("--metric", evaluate_opts.metric, "numeric metric: rmse or mae");
    evaluate->add_option("--cat-cols", evaluate_opts.cat_cols,
                         "comma-separated columns to score by exact-match accuracy");

    ImputeOpts impute_opts;
    CLI::App* impute =
        app.add_subcommand("impute", "fill missing cells with column means and modes");
    impute->add_option("--input", impute_opts.input, "input CSV with gaps")->required();
    impute->add_option("--output", impute_opts.output, "completed output CSV")->required();
    impute->add_option("--cat-cols", impute_opts.cat_cols,
                       "comma-separated columns forced to mode filling");
    impute->add_flag("--verbose", impute_opts.verbose, "print the per-column strategy lines");

    VisualizeOpts visualize_opts;
    CLI::App* visualize =
        app.add_subcommand("visualize", "render a missingness matrix or nullity heatmap");
    visualize->add_option("--input", visualize_opts.input, "input CSV (gaps define the mask)");
    visualize->add_option("--mask", visualize_opts.mask, "0/1 mask CSV");
    visualize->add_option("--kind", visualize_opts.kind, "matrix or heatmap")->required();
    visualize->add_option("--out", visualize_opts.out, "output SVG path")->required();
    visualize->add_option("--method", visualize_opts.method,
                          "heatmap correlation method: pearson, spearman, or kendall");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (generate->parsed()) return run_guarded([&] { return cmd_generate(generate_opts); });
    if (analyze->parsed()) return run_guarded([&] { return cmd_analyze(analyze_opts); });
    if (evaluate->parsed()) return run_guarded([&] { return cmd_evaluate(evaluate_opts); });
    if (impute->parsed()) return run_guarded([&] { return cmd_impute(impute_opts); });
    if (visualize->parsed()) return run_guarded([&] { return cmd_visualize(visualize_opts); });
    return 2;
}
