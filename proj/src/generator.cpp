#include "missim/generator.hpp"

#include <algorithm>
#include <map>

#include "missim/errors.hpp"

namespace missim::gen {

namespace {

std::map<std::string, CustomKernel>& registry() {
    static std::map<std::string, CustomKernel> kernels;
    return kernels;
}

bool column_complete(const NumericView& view, std::size_t j) {
    for (const auto& v : view.cols[j])
        if (!v.has_value()) return false;
    return true;
}

bool is_constant_column(const NumericView& view, std::size_t j) {
    for (const auto& v : view.cols[j])
        if (*v != *view.cols[j].front()) return false;
    return true;
}

std::vector<std::size_t> resolve_names(const TabularDataset& data,
                                       const std::vector<std::string>& names) {
    std::vector<std::size_t> out;
    out.reserve(names.size());
    for (const auto& n : names) out.push_back(data.column_index(n));
    return out;
}

bool needs_label(const RuleSpec& spec) {
    return spec.custom.empty() && spec.family == mech::Family::mar &&
           (spec.variant == 2 || spec.variant == 3);
}

mech::MechanismRule base_rule(const RuleSpec& spec) {
    mech::MechanismRule rule;
    rule.family = spec.family;
    rule.variant = spec.variant;
    rule.rate = spec.rate;
    rule.seed = spec.seed;
    rule.up_percentile = spec.up_percentile;
    rule.obs_percentile = spec.obs_percentile;
    rule.side = spec.side;
    rule.group_odds = spec.group_odds;
    rule.custom = spec.custom;
    return rule;
}

}  // namespace

void register_mechanism(const std::string& name, CustomKernel kernel) {
    if (name == "mcar" || name == "mar" || name == "mnar")
        throw ConfigError("'" + name + "' is reserved for the built-in families");
    if (!kernel) throw ConfigError("custom mechanism needs a callable kernel");
    registry()[name] = std::move(kernel);
}

bool mechanism_registered(const std::string& name) { return registry().count(name) > 0; }

NumericView FittedGenerator::encoded_view(const TabularDataset& data) const {
    NumericView view;
    view.n_rows = data.n_rows();
    view.cols.reserve(data.n_cols());
    for (std::size_t j = 0; j < data.n_cols(); ++j) {
        if (data.spec(j).kind == ColumnKind::numeric) {
            view.cols.emplace_back(data.numeric(j));
            continue;
        }
        const auto& enc = encodings_[j];
        std::vector<std::optional<double>> codes;
        codes.reserve(data.n_rows());
        for (const auto& v : data.categorical(j)) {
            if (v.has_value())
                codes.emplace_back(static_cast<double>(enc->code_of(*v)));
            else
                codes.emplace_back(std::nullopt);
        }
        view.cols.push_back(std::move(codes));
    }
    return view;
}

MissingMask FittedGenerator::mask_for(const NumericView& view, bool is_fit_data) const {
    MissingMask combined(view.n_rows, view.cols.size(), 1);
    for (const auto& resolved : rules_) {
        MissingMask part(0, 0);
        if (resolved.kernel) {
            part = resolved.kernel(view, resolved.rule);
            mech::check_mask_contract(view, resolved.rule, part);
        } else if (is_fit_data) {
            // the data the parameters were learned from: exact kernel semantics
            part = mech::run_mechanism(view, resolved.rule,
                                       label_ ? &*label_ : nullptr);
        } else {
            const auto& rule = resolved.rule;
            if (const auto* lg = std::get_if<mech::LogisticFrozen>(&resolved.frozen))
                part = mech::apply_logistic(view, rule, *lg);
            else if (const auto* dr = std::get_if<mech::DriverFrozen>(&resolved.frozen))
                part = mech::apply_driver(view, rule, *dr);
            else if (const auto* th = std::get_if<mech::ThresholdFrozen>(&resolved.frozen))
                part = mech::apply_thresholds(view, rule, *th);
            else if (const auto* gp = std::get_if<mech::GroupFrozen>(&resolved.frozen))
                part = mech::apply_binary_group(view, rule, *gp);
            else
                part = mech::run_mechanism(view, rule, label_ ? &*label_ : nullptr);
        }
        for (std::size_t j = 0; j < combined.cols(); ++j)
            for (std::size_t i = 0; i < combined.rows(); ++i)
                if (part.at(i, j) == 0) combined.set(i, j, 0);
    }
    return combined;
}

TabularDataset FittedGenerator::transform(const TabularDataset& data) {
    if (data.specs() != schema_)
        throw SchemaError("dataset schema differs from the one the generator was fitted on");
    NumericView view;
    try {
        view = encoded_view(data);
    } catch (const DataError& e) {
        throw DataError(std::string("transform input: ") + e.what());
    }
    auto mask = mask_for(view, view == fit_view_);
    last_mask_ = mask;
    return apply_mask(data, mask);
}

const MissingMask& FittedGenerator::get_mask() const {
    if (!last_mask_) throw StateError("no mask yet: call transform first");
    return *last_mask_;
}

std::vector<std::vector<bool>> FittedGenerator::get_bool_mask() const {
    const auto& mask = get_mask();
    std::vector<std::vector<bool>> out(mask.rows(), std::vector<bool>(mask.cols(), true));
    for (std::size_t i = 0; i < mask.rows(); ++i)
        for (std::size_t j = 0; j < mask.cols(); ++j) out[i][j] = mask.at(i, j) == 1;
    return out;
}

FittedGenerator fit(const GeneratorConfig& config, const TabularDataset& data,
                    const std::optional<mech::LabelVector>& label) {
    const bool has_global = config.global_rule.has_value();
    const bool has_groups = !config.column_rules.empty();
    if (has_global == has_groups)
        throw ConfigError("set exactly one of global_rule and column_rules");
    if (data.n_rows() == 0 || data.n_cols() == 0)
        throw EmptyInputError("cannot fit on an empty dataset");

    FittedGenerator g;
    g.schema_ = data.specs();
    g.encodings_.resize(data.n_cols());
    for (std::size_t j = 0; j < data.n_cols(); ++j)
        if (data.spec(j).kind == ColumnKind::categorical)
            g.encodings_[j] = fit_ordinal_encoding(data.categorical(j));
    g.fit_view_ = g.encoded_view(data);
    const auto& view = g.fit_view_;
    const std::size_t p = data.n_cols();

    std::optional<std::size_t> label_col;
    if (config.label_column) label_col = data.column_index(*config.label_column);

    // the label guides MAR types 2/3; an explicit vector wins over the column
    bool any_needs_label =
        (config.global_rule && needs_label(*config.global_rule)) ||
        std::any_of(config.column_rules.begin(), config.column_rules.end(),
                    [](const GroupRule& gr) { return needs_label(gr.rule); });
    if (label) {
        if (label->size() != data.n_rows())
            throw ShapeError("label length disagrees with the dataset");
        g.label_ = *label;
    } else if (label_col) {
        if (!column_complete(view, *label_col))
            throw DataError("label column '" + *config.label_column + "' has missing values");
        mech::LabelVector values;
        values.reserve(data.n_rows());
        for (const auto& v : view.cols[*label_col]) values.push_back(*v);
        g.label_ = std::move(values);
    } else if (any_needs_label) {
        throw ConfigError("a MAR type 2/3 rule needs a label (label_column or explicit vector)");
    }

    auto resolve = [&](const RuleSpec& spec,
                       const std::vector<std::string>* group) -> FittedGenerator::ResolvedRule {
        FittedGenerator::ResolvedRule resolved;
        resolved.rule = base_rule(spec);
        auto& rule = resolved.rule;
        if (!spec.custom.empty()) {
            auto it = registry().find(spec.custom);
            if (it == registry().end())
                throw ConfigError("no mechanism registered under '" + spec.custom + "'");
            resolved.kernel = it->second;
        }
        rule.depend_on = resolve_names(data, spec.depend_on);
        // a label taken from a column stays observed and out of driver scans
        if (label_col && needs_label(spec) &&
            std::find(rule.depend_on.begin(), rule.depend_on.end(), *label_col) ==
                rule.depend_on.end())
            rule.depend_on.push_back(*label_col);

        if (group) {
            if (!spec.targets.empty())
                throw ConfigError("column_rules take their targets from the group key");
            rule.targets = resolve_names(data, *group);
        } else if (!spec.targets.empty()) {
            rule.targets = resolve_names(data, spec.targets);
            if (label_col && std::find(rule.targets.begin(), rule.targets.end(), *label_col) !=
                                 rule.targets.end())
                throw ConfigError("the label column cannot be a target");
        } else {
            // default targets: everything not spoken for
            bool scans_for_driver = spec.custom.empty() && spec.family == mech::Family::mar &&
                                    spec.variant == 1 && rule.depend_on.empty();
            if (scans_for_driver) {
                for (std::size_t j = 0; j < p; ++j) {
                    if (label_col && j == *label_col) continue;
                    if (!column_complete(view, j) || is_constant_column(view, j)) continue;
                    rule.depend_on.push_back(j);
                    break;
                }
                if (rule.depend_on.empty())
                    throw ConfigError("no usable driver column for the logistic mechanism");
            }
            for (std::size_t j = 0; j < p; ++j) {
                if (label_col && j == *label_col) continue;
                if (std::find(rule.depend_on.begin(), rule.depend_on.end(), j) !=
                    rule.depend_on.end())
                    continue;
                rule.targets.push_back(j);
            }
        }
        mech::validate_rule(view, rule);
        for (auto j : mech::referenced_columns(rule, p)) {
            if (!column_complete(view, j))
                throw DataError("column '" + data.spec(j).name +
                                "' must be complete for this mechanism");
        }

        if (spec.custom.empty()) {
            const mech::LabelVector* lab = g.label_ ? &*g.label_ : nullptr;
            if (rule.family == mech::Family::mar &&
                (rule.variant == 1 || rule.variant == 2 || rule.variant == 3 ||
                 rule.variant == 4)) {
                if (rule.variant == 1)
                    resolved.frozen = mech::fit_logistic(view, rule);
                else
                    resolved.frozen = mech::fit_driver(view, rule, lab);
            } else if (rule.family == mech::Family::mar && rule.variant == 6) {
                resolved.frozen = mech::fit_binary_group(view, rule);
            } else if (rule.family == mech::Family::mnar &&
                       (rule.variant == 2 || rule.variant == 3)) {
                resolved.frozen = mech::fit_logistic(view, rule);
            } else if (rule.family == mech::Family::mnar &&
                       (rule.variant == 1 || rule.variant == 4 || rule.variant == 6)) {
                resolved.frozen = mech::fit_thresholds(view, rule);
            }
        }
        return resolved;
    };

    if (config.global_rule) {
        g.rules_.push_back(resolve(*config.global_rule, nullptr));
    } else {
        std::vector<std::uint8_t> claimed(p, 0);
        for (const auto& gr : config.column_rules) {
            if (gr.columns.empty()) throw ConfigError("a column group cannot be empty");
            for (auto j : resolve_names(data, gr.columns)) {
                if (claimed[j])
                    throw ConfigError("column '" + data.spec(j).name +
                                      "' appears in more than one group");
                claimed[j] = 1;
            }
            g.rules_.push_back(resolve(gr.rule, &gr.columns));
        }
    }
    return g;
}

TabularDataset fit_transform(const GeneratorConfig& config, const TabularDataset& data,
                             const std::optional<mech::LabelVector>& label,
                             MissingMask* mask_out) {
    auto fitted = fit(config, data, label);
    auto out = fitted.transform(data);
    if (mask_out) *mask_out = fitted.get_mask();
    return out;
}

}  // namespace missim::gen
