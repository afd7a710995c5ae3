#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "missim/mechanisms.hpp"
#include "missim/table.hpp"

namespace missim::gen {

// A mechanism rule as configs state it, with columns by name.
struct RuleSpec {
    mech::Family family = mech::Family::mcar;
    int variant = 1;
    double rate = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::string> depend_on;
    std::vector<std::string> targets;  // global rule only; empty means default
    std::optional<double> up_percentile;
    std::optional<double> obs_percentile;
    mech::Side side = mech::Side::upper;
    double group_odds = 2.0;
    std::string custom;  // registered kernel name; family/variant ignored when set
};

struct GroupRule {
    std::vector<std::string> columns;  // the targets of this rule
    RuleSpec rule;
};

struct GeneratorConfig {
    std::optional<RuleSpec> global_rule;
    std::vector<GroupRule> column_rules;
    std::optional<std::string> label_column;
};

using CustomKernel =
    std::function<MissingMask(const NumericView&, const mech::MechanismRule&)>;

// Makes `name` addressable from RuleSpec::custom. The family keywords are
// reserved; re-registering a custom name replaces the previous kernel.
void register_mechanism(const std::string& name, CustomKernel kernel);
bool mechanism_registered(const std::string& name);

class FittedGenerator {
  public:
    // Masks `data` according to the fitted rules and remembers the mask.
    // Data must carry the fit-time schema; categorical values must have been
    // seen at fit time.
    TabularDataset transform(const TabularDataset& data);

    // Last transform's mask, 1 = observed. StateError before any transform.
    const MissingMask& get_mask() const;
    // Same grid with true = observed.
    std::vector<std::vector<bool>> get_bool_mask() const;

    const std::vector<ColumnSpec>& schema() const { return schema_; }

  private:
    friend FittedGenerator fit(const GeneratorConfig&, const TabularDataset&,
                               const std::optional<mech::LabelVector>&);

    using Frozen = std::variant<std::monostate, mech::LogisticFrozen, mech::DriverFrozen,
                                mech::ThresholdFrozen, mech::GroupFrozen>;

    struct ResolvedRule {
        mech::MechanismRule rule;
        Frozen frozen;
        CustomKernel kernel;  // set when rule.custom is non-empty
    };

    NumericView encoded_view(const TabularDataset& data) const;
    MissingMask mask_for(const NumericView& view, bool is_fit_data) const;

    std::vector<ColumnSpec> schema_;
    std::vector<std::optional<OrdinalEncoding>> encodings_;  // per categorical column
    std::vector<ResolvedRule> rules_;
    NumericView fit_view_;
    std::optional<mech::LabelVector> label_;
    std::optional<MissingMask> last_mask_;
};

// Learns every data-dependent parameter (drivers, weights, intercepts, value
// cuts, group probabilities) from `data`. The label argument overrides
// config.label_column; one of the two must supply a label when a rule is
// MAR type 2 or 3.
FittedGenerator fit(const GeneratorConfig& config, const TabularDataset& data,
                    const std::optional<mech::LabelVector>& label = std::nullopt);

// fit followed by transform on the same data. mask_out, when given, receives
// the produced mask.
TabularDataset fit_transform(const GeneratorConfig& config, const TabularDataset& data,
                             const std::optional<mech::LabelVector>& label = std::nullopt,
                             MissingMask* mask_out = nullptr);

}  // namespace missim::gen
