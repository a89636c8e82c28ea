#pragma once

#include "afmpi/evaluator.hpp"
#include "afmpi/rational.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace afmpi {

struct IndicatorSpec {
    std::string id;
    std::string dimension_id;
    Rational weight;
    EvaluatorKey evaluator{};
    Applicability applies_to{};

    friend bool operator==(const IndicatorSpec &, const IndicatorSpec &) = default;
};

struct DimensionSpec {
    std::string id;
    std::string name;
    std::vector<std::string> indicator_ids;

    friend bool operator==(const DimensionSpec &, const DimensionSpec &) = default;
};

/// A validated set of dimensions, weighted indicators and the poverty cutoff.
///
/// `indicators` is ordered dimension by dimension, following each
/// dimension's `indicator_ids`; deprivation matrices use the same column
/// order. `custom_weights` is set when the weights differ from the equal
/// split (each dimension 1/D, each indicator an equal share of it).
struct MeasurementScheme {
    std::string id;
    Unit unit{Unit::household};
    std::vector<DimensionSpec> dimensions;
    std::vector<IndicatorSpec> indicators;
    Rational poverty_cutoff{3, 10};
    bool custom_weights = false;

    const IndicatorSpec &indicator(std::string_view indicator_id) const;
    const DimensionSpec &dimension(std::string_view dimension_id) const;
    Rational dimension_weight(std::string_view dimension_id) const;
    Rational total_weight() const;
    std::vector<std::string> indicator_ids() const;

    friend bool operator==(const MeasurementScheme &, const MeasurementScheme &) = default;
};

inline constexpr std::string_view khas_household = "khas_household";
inline constexpr std::string_view khas_individual = "khas_individual";

/// The two built-in schemes. Unknown names throw NotFound.
MeasurementScheme builtin_scheme(std::string_view name);

/// Throws SchemeInvalid listing every violation found (reason codes:
/// degenerate, duplicate_id, unknown_evaluator, evaluator_unit,
/// weight_nonpositive, weight_sum, cutoff, unequal_weights).
void validate(const MeasurementScheme &scheme);

/// Parses and validates a scheme document:
///   {"id", "unit", "k": [num, den],
///    "dimensions": [{"id", "name"?, "indicators": [{"id", "evaluator", "weight"?: [num, den]}]}]}
/// Weights are either given for every indicator or for none; when none are
/// given the equal split is applied.
MeasurementScheme load_scheme(std::string_view document);
MeasurementScheme load_scheme_file(const std::filesystem::path &path);

/// Canonical document form (2-space indented JSON, trailing newline). The
/// shipped scheme files are exactly this text.
std::string serialize_scheme(const MeasurementScheme &scheme);

std::uint64_t scheme_hash(const MeasurementScheme &scheme);

/// Drops a dimension and re-applies the equal split over the remaining
/// D-1 dimensions.
MeasurementScheme exclude_dimension(const MeasurementScheme &scheme, std::string_view dimension_id);

/// Drops an indicator; its dimension keeps its total weight, re-split
/// equally over the remaining indicators.
MeasurementScheme exclude_indicator(const MeasurementScheme &scheme, std::string_view indicator_id);

MeasurementScheme with_cutoff(const MeasurementScheme &scheme, const Rational &k);

/// Resolves a builtin name or a path to a scheme document.
MeasurementScheme resolve_scheme(std::string_view name_or_path);

} // namespace afmpi
