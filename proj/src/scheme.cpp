#include "afmpi/scheme.hpp"
#include "afmpi/digest.hpp"
#include "afmpi/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <set>

namespace afmpi {

namespace {

using ordered_json = nlohmann::ordered_json;

struct IndicatorDraft {
    std::string id;
    std::string evaluator;
};

struct DimensionDraft {
    std::string id;
    std::string name;
    std::vector<IndicatorDraft> indicators;
};

// Builds a scheme with the equal split: each dimension 1/D, each indicator an
// equal share of its dimension.
MeasurementScheme equal_split(std::string id, Unit unit, const std::vector<DimensionDraft> &dims,
                              Rational k) {
    MeasurementScheme scheme;
    scheme.id = std::move(id);
    scheme.unit = unit;
    scheme.poverty_cutoff = k;
    const auto dimension_count = static_cast<std::int64_t>(dims.size());
    for (const auto &dim : dims) {
        DimensionSpec spec{dim.id, dim.name, {}};
        const auto m = static_cast<std::int64_t>(dim.indicators.size());
        for (const auto &ind : dim.indicators) {
            const auto key = find_evaluator(ind.evaluator);
            spec.indicator_ids.push_back(ind.id);
            scheme.indicators.push_back(IndicatorSpec{
                ind.id, dim.id, Rational{1, dimension_count * m}, key.value_or(EvaluatorKey{}),
                key ? evaluator_info(*key).applies_to : Applicability::both});
        }
        scheme.dimensions.push_back(std::move(spec));
    }
    return scheme;
}

std::vector<DimensionDraft> drafts_of(const MeasurementScheme &scheme) {
    std::vector<DimensionDraft> out;
    for (const auto &dim : scheme.dimensions) {
        DimensionDraft draft{dim.id, dim.name, {}};
        for (const auto &ind_id : dim.indicator_ids) {
            draft.indicators.push_back(
                {ind_id, std::string{to_string(scheme.indicator(ind_id).evaluator)}});
        }
        out.push_back(std::move(draft));
    }
    return out;
}

bool is_equal_split(const MeasurementScheme &scheme) {
    const auto d = static_cast<std::int64_t>(scheme.dimensions.size());
    if (d == 0) {
        return true;
    }
    for (const auto &dim : scheme.dimensions) {
        const auto m = static_cast<std::int64_t>(dim.indicator_ids.size());
        if (m == 0) {
            return false;
        }
        const Rational expected{1, d * m};
        for (const auto &ind : scheme.indicators) {
            if (ind.dimension_id == dim.id && ind.weight != expected) {
                return false;
            }
        }
    }
    return true;
}

const std::vector<DimensionDraft> &household_layout() {
    static const std::vector<DimensionDraft> layout{
        {"education",
         "Education",
         {{"schooling", "schooling_any_adult"}, {"child_enrollment", "child_enrollment"}}},
        {"living_standards",
         "Living standards",
         {{"electricity", "electricity"},
          {"floor", "floor"},
          {"sanitation", "sanitation"},
          {"water", "water"},
          {"cooking_fuel", "cooking_fuel"},
          {"durables", "consumer_durables"}}},
        {"productive_assets", "Productive assets", {{"productive_assets", "household_assets"}}},
        {"empowerment",
         "Empowerment",
         {{"travel_market", "travel_market"},
          {"travel_health_facility", "travel_health_facility"},
          {"travel_natal_home", "travel_natal_home"},
          {"travel_outside_village", "travel_outside_village"},
          {"health_decision", "health_decision"}}},
    };
    return layout;
}

const std::vector<DimensionDraft> &individual_layout() {
    static const std::vector<DimensionDraft> layout{
        {"education", "Education", {{"education", "own_education"}}},
        {"living_standards",
         "Living standards",
         {{"electricity", "electricity"},
          {"floor", "floor"},
          {"sanitation", "sanitation"},
          {"water", "water"},
          {"cooking_fuel", "cooking_fuel"},
          {"durables", "consumer_durables"}}},
        {"productive_assets",
         "Productive assets",
         {{"household_assets", "household_assets"}, {"individual_assets", "individual_assets"}}},
        {"empowerment",
         "Empowerment",
         {{"travel_market", "travel_market"},
          {"travel_health_facility", "travel_health_facility"},
          {"travel_natal_home", "travel_natal_home"},
          {"travel_outside_village", "travel_outside_village"},
          {"health_decision", "health_decision"}}},
    };
    return layout;
}

[[noreturn]] void throw_invalid(const std::string &scheme_id, std::vector<std::string> reasons,
                                const std::vector<std::string> &details) {
    std::string message = "scheme '" + scheme_id + "' is invalid";
    for (const auto &detail : details) {
        message += "; " + detail;
    }
    throw Error{ErrorCode::SchemeInvalid, message, std::move(reasons), {{"scheme", scheme_id}}};
}

Rational parse_fraction(const ordered_json &node) {
    if (!node.is_array() || node.size() != 2 || !node[0].is_number_integer() ||
        !node[1].is_number_integer()) {
        throw std::invalid_argument("expected [numerator, denominator]");
    }
    const auto den = node[1].get<std::int64_t>();
    if (den <= 0) {
        throw std::invalid_argument("denominator must be positive");
    }
    return Rational{node[0].get<std::int64_t>(), den};
}

ordered_json fraction_json(const Rational &r) { return ordered_json::array({r.num(), r.den()}); }

} // namespace

const IndicatorSpec &MeasurementScheme::indicator(std::string_view indicator_id) const {
    const auto it = std::ranges::find(indicators, indicator_id, &IndicatorSpec::id);
    if (it == indicators.end()) {
        throw Error{ErrorCode::NotFound, "unknown indicator '" + std::string{indicator_id} + "'",
                    {"indicator"}, {{"indicator", std::string{indicator_id}}, {"scheme", id}}};
    }
    return *it;
}

const DimensionSpec &MeasurementScheme::dimension(std::string_view dimension_id) const {
    const auto it = std::ranges::find(dimensions, dimension_id, &DimensionSpec::id);
    if (it == dimensions.end()) {
        throw Error{ErrorCode::NotFound, "unknown dimension '" + std::string{dimension_id} + "'",
                    {"dimension"}, {{"dimension", std::string{dimension_id}}, {"scheme", id}}};
    }
    return *it;
}

Rational MeasurementScheme::dimension_weight(std::string_view dimension_id) const {
    const auto &dim = dimension(dimension_id);
    Rational sum;
    for (const auto &ind_id : dim.indicator_ids) {
        sum += indicator(ind_id).weight;
    }
    return sum;
}

Rational MeasurementScheme::total_weight() const {
    Rational sum;
    for (const auto &ind : indicators) {
        sum += ind.weight;
    }
    return sum;
}

std::vector<std::string> MeasurementScheme::indicator_ids() const {
    std::vector<std::string> ids;
    ids.reserve(indicators.size());
    for (const auto &ind : indicators) {
        ids.push_back(ind.id);
    }
    return ids;
}

MeasurementScheme builtin_scheme(std::string_view name) {
    if (name == khas_household) {
        return equal_split(std::string{khas_household}, Unit::household, household_layout(),
                           Rational{3, 10});
    }
    if (name == khas_individual) {
        return equal_split(std::string{khas_individual}, Unit::individual, individual_layout(),
                           Rational{3, 10});
    }
    throw Error{ErrorCode::NotFound, "unknown builtin scheme '" + std::string{name} + "'",
                {"scheme"}, {{"scheme", std::string{name}}}};
}

void validate(const MeasurementScheme &scheme) {
    std::vector<std::string> reasons;
    std::vector<std::string> details;
    const auto violation = [&](std::string reason, std::string detail) {
        if (std::ranges::find(reasons, reason) == reasons.end()) {
            reasons.push_back(std::move(reason));
        }
        details.push_back(std::move(detail));
    };

    if (scheme.dimensions.empty()) {
        violation("degenerate", "scheme has no dimensions");
    }
    std::set<std::string> seen_dims;
    std::set<std::string> seen_inds;
    std::size_t listed = 0;
    for (const auto &dim : scheme.dimensions) {
        if (!seen_dims.insert(dim.id).second) {
            violation("duplicate_id", "duplicate dimension '" + dim.id + "'");
        }
        if (dim.indicator_ids.empty()) {
            violation("degenerate", "dimension '" + dim.id + "' has no indicators");
        }
        for (const auto &ind_id : dim.indicator_ids) {
            ++listed;
            if (!seen_inds.insert(ind_id).second) {
                violation("duplicate_id", "duplicate indicator '" + ind_id + "'");
            }
        }
    }
    if (listed != scheme.indicators.size()) {
        violation("degenerate", "dimension listings do not match the indicator table");
    }
    std::size_t column = 0;
    for (const auto &dim : scheme.dimensions) {
        for (const auto &ind_id : dim.indicator_ids) {
            if (column < scheme.indicators.size() &&
                (scheme.indicators[column].id != ind_id ||
                 scheme.indicators[column].dimension_id != dim.id)) {
                violation("degenerate", "indicator table is not in dimension order at '" + ind_id +
                                            "'");
            }
            ++column;
        }
    }
    for (const auto &ind : scheme.indicators) {
        if (ind.weight <= Rational{0}) {
            violation("weight_nonpositive", "indicator '" + ind.id + "' has weight " +
                                                ind.weight.str());
        }
        if (!applies_to(evaluator_info(ind.evaluator).applies_to, scheme.unit)) {
            violation("evaluator_unit", "evaluator '" + std::string{to_string(ind.evaluator)} +
                                            "' cannot be evaluated at " +
                                            std::string{to_string(scheme.unit)} + " level");
        }
    }
    if (const auto total = scheme.total_weight(); total != Rational{1}) {
        violation("weight_sum", "weights sum to " + total.str() + ", not 1");
    }
    if (scheme.poverty_cutoff <= Rational{0} || scheme.poverty_cutoff > Rational{1}) {
        violation("cutoff", "poverty cutoff " + scheme.poverty_cutoff.str() + " is outside (0, 1]");
    }
    if (!scheme.custom_weights && reasons.empty() && !is_equal_split(scheme)) {
        violation("unequal_weights", "weights are not the equal split but the scheme is not "
                                     "marked custom");
    }
    if (!reasons.empty()) {
        throw_invalid(scheme.id, std::move(reasons), details);
    }
}

MeasurementScheme load_scheme(std::string_view document) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(document);
    } catch (const nlohmann::json::parse_error &e) {
        throw Error{ErrorCode::SchemeInvalid, std::string{"scheme document does not parse: "} +
                                                  e.what(),
                    {"parse"}};
    }

    std::vector<std::string> reasons;
    std::vector<std::string> details;
    const auto violation = [&](std::string reason, std::string detail) {
        if (std::ranges::find(reasons, reason) == reasons.end()) {
            reasons.push_back(std::move(reason));
        }
        details.push_back(std::move(detail));
    };

    const std::string id = doc.value("id", std::string{});
    if (id.empty()) {
        violation("format", "missing 'id'");
    }
    const auto unit = parse_unit(doc.value("unit", std::string{}));
    if (!unit) {
        violation("unit", "'unit' must be household or individual");
    }
    Rational k{3, 10};
    if (doc.contains("k")) {
        try {
            k = parse_fraction(doc["k"]);
        } catch (const std::exception &e) {
            violation("cutoff", std::string{"'k': "} + e.what());
        }
    }
    if (k <= Rational{0} || k > Rational{1}) {
        violation("cutoff", "poverty cutoff " + k.str() + " is outside (0, 1]");
    }

    std::vector<DimensionDraft> drafts;
    std::vector<std::optional<Rational>> weights;
    if (!doc.contains("dimensions") || !doc["dimensions"].is_array()) {
        violation("format", "missing 'dimensions' array");
    } else {
        for (const auto &dim_node : doc["dimensions"]) {
            DimensionDraft dim;
            dim.id = dim_node.value("id", std::string{});
            dim.name = dim_node.value("name", dim.id);
            if (dim.id.empty()) {
                violation("format", "dimension without 'id'");
            }
            if (dim_node.contains("indicators") && dim_node["indicators"].is_array()) {
                for (const auto &ind_node : dim_node["indicators"]) {
                    IndicatorDraft ind{ind_node.value("id", std::string{}),
                                       ind_node.value("evaluator", std::string{})};
                    if (ind.id.empty()) {
                        violation("format", "indicator without 'id' in '" + dim.id + "'");
                    }
                    if (const auto key = find_evaluator(ind.evaluator); !key) {
                        violation("unknown_evaluator", "indicator '" + ind.id +
                                                           "' names unknown evaluator '" +
                                                           ind.evaluator + "'");
                    } else if (unit && !applies_to(evaluator_info(*key).applies_to, *unit)) {
                        violation("evaluator_unit", "evaluator '" + ind.evaluator +
                                                        "' cannot be evaluated at " +
                                                        std::string{to_string(*unit)} + " level");
                    }
                    std::optional<Rational> weight;
                    if (ind_node.contains("weight")) {
                        try {
                            weight = parse_fraction(ind_node["weight"]);
                        } catch (const std::exception &e) {
                            violation("weight_format",
                                      "indicator '" + ind.id + "' weight: " + e.what());
                        }
                    }
                    weights.push_back(weight);
                    dim.indicators.push_back(std::move(ind));
                }
            }
            if (dim.indicators.empty()) {
                violation("degenerate", "dimension '" + dim.id + "' has no indicators");
            }
            drafts.push_back(std::move(dim));
        }
        if (drafts.empty()) {
            violation("degenerate", "scheme has no dimensions");
        }
    }

    const auto given = std::ranges::count_if(weights, [](const auto &w) { return w.has_value(); });
    if (given != 0 && static_cast<std::size_t>(given) != weights.size()) {
        violation("partial_weights", "weights must be given for every indicator or for none");
    }
    if (!reasons.empty()) {
        throw_invalid(id, std::move(reasons), details);
    }

    auto scheme = equal_split(id, *unit, drafts, k);
    if (given != 0) {
        for (std::size_t i = 0; i < scheme.indicators.size(); ++i) {
            scheme.indicators[i].weight = *weights[i];
        }
        scheme.custom_weights = !is_equal_split(scheme);
    }
    validate(scheme);
    return scheme;
}

MeasurementScheme load_scheme_file(const std::filesystem::path &path) {
    return load_scheme(read_file(path));
}

std::string serialize_scheme(const MeasurementScheme &scheme) {
    ordered_json doc;
    doc["id"] = scheme.id;
    doc["unit"] = std::string{to_string(scheme.unit)};
    doc["k"] = fraction_json(scheme.poverty_cutoff);
    auto dims = ordered_json::array();
    for (const auto &dim : scheme.dimensions) {
        ordered_json dim_node;
        dim_node["id"] = dim.id;
        dim_node["name"] = dim.name;
        auto inds = ordered_json::array();
        for (const auto &ind_id : dim.indicator_ids) {
            const auto &ind = scheme.indicator(ind_id);
            ordered_json ind_node;
            ind_node["id"] = ind.id;
            ind_node["evaluator"] = std::string{to_string(ind.evaluator)};
            ind_node["weight"] = fraction_json(ind.weight);
            inds.push_back(std::move(ind_node));
        }
        dim_node["indicators"] = std::move(inds);
        dims.push_back(std::move(dim_node));
    }
    doc["dimensions"] = std::move(dims);
    return doc.dump(2) + "\n";
}

std::uint64_t scheme_hash(const MeasurementScheme &scheme) {
    return fnv1a64(serialize_scheme(scheme));
}

MeasurementScheme exclude_dimension(const MeasurementScheme &scheme, std::string_view dimension_id) {
    (void)scheme.dimension(dimension_id);
    if (scheme.dimensions.size() < 2) {
        throw Error{ErrorCode::SchemeInvalid,
                    "cannot exclude the only dimension of scheme '" + scheme.id + "'",
                    {"degenerate"},
                    {{"scheme", scheme.id}, {"dimension", std::string{dimension_id}}}};
    }
    auto drafts = drafts_of(scheme);
    std::erase_if(drafts, [&](const DimensionDraft &d) { return d.id == dimension_id; });
    auto out = equal_split(scheme.id + "-without-" + std::string{dimension_id}, scheme.unit, drafts,
                           scheme.poverty_cutoff);
    validate(out);
    return out;
}

MeasurementScheme exclude_indicator(const MeasurementScheme &scheme, std::string_view indicator_id) {
    const auto &target = scheme.indicator(indicator_id);
    const auto &dim = scheme.dimension(target.dimension_id);
    if (dim.indicator_ids.size() < 2) {
        throw Error{ErrorCode::SchemeInvalid,
                    "excluding '" + std::string{indicator_id} + "' would empty dimension '" +
                        dim.id + "'",
                    {"degenerate"},
                    {{"scheme", scheme.id}, {"indicator", std::string{indicator_id}}}};
    }
    const Rational dim_weight = scheme.dimension_weight(dim.id);
    const auto remaining = static_cast<std::int64_t>(dim.indicator_ids.size() - 1);

    MeasurementScheme out;
    out.id = scheme.id + "-without-" + std::string{indicator_id};
    out.unit = scheme.unit;
    out.poverty_cutoff = scheme.poverty_cutoff;
    for (const auto &d : scheme.dimensions) {
        auto copy = d;
        std::erase(copy.indicator_ids, std::string{indicator_id});
        out.dimensions.push_back(std::move(copy));
    }
    for (const auto &ind : scheme.indicators) {
        if (ind.id == indicator_id) {
            continue;
        }
        auto copy = ind;
        if (copy.dimension_id == dim.id) {
            copy.weight = dim_weight / Rational{remaining};
        }
        out.indicators.push_back(std::move(copy));
    }
    out.custom_weights = !is_equal_split(out);
    validate(out);
    return out;
}

MeasurementScheme with_cutoff(const MeasurementScheme &scheme, const Rational &k) {
    auto out = scheme;
    out.poverty_cutoff = k;
    validate(out);
    return out;
}

MeasurementScheme resolve_scheme(std::string_view name_or_path) {
    if (name_or_path == khas_household || name_or_path == khas_individual) {
        return builtin_scheme(name_or_path);
    }
    const std::filesystem::path path{name_or_path};
    if (!std::filesystem::exists(path)) {
        throw Error{ErrorCode::NotFound,
                    "scheme '" + std::string{name_or_path} + "' is neither a builtin nor a file",
                    {"scheme"}, {{"scheme", std::string{name_or_path}}}};
    }
    return load_scheme_file(path);
}

} // namespace afmpi
