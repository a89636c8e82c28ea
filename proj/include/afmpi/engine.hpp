#pragma once

#include "afmpi/deprivation.hpp"
#include "afmpi/rational.hpp"
#include "afmpi/scheme.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace afmpi {

/// Weighted deprivation scores. All weights are brought to a common
/// denominator, so a score is numerators[i] / denominator exactly.
struct ScoreVector {
    std::vector<std::string> unit_ids;
    std::vector<std::int64_t> numerators;
    std::int64_t denominator = 1;

    std::size_t size() const noexcept { return numerators.size(); }
    Rational score(std::size_t i) const { return {numerators[i], denominator}; }
};

/// Throws SchemeMismatch unless the matrix columns are the scheme's
/// indicators in scheme order.
ScoreVector score(const DeprivationMatrix &mat, const MeasurementScheme &scheme);

/// poor iff score >= k. Throws BadCutoffs unless 0 < k <= 1.
std::vector<std::uint8_t> identify(const ScoreVector &sv, const Rational &k);

struct PovertyResult {
    std::string scheme_id;
    Unit unit_level{Unit::household};
    Rational k;
    std::size_t n = 0;
    std::size_t q = 0;
    Rational H;
    /// Mean score among the poor; empty when nobody is poor.
    std::optional<Rational> A;
    Rational M0;
    std::vector<std::string> unit_ids;
    std::vector<std::uint8_t> poor_flags;
    std::vector<Rational> scores;
    std::vector<Rational> censored_scores;

    bool poor(std::size_t i) const noexcept { return poor_flags[i] != 0; }

    friend bool operator==(const PovertyResult &, const PovertyResult &) = default;
};

/// Throws BadCutoffs unless 0 < k <= 1, or Error(Usage) when sv is empty.
PovertyResult measure(const ScoreVector &sv, const Rational &k, std::string scheme_id = {},
                      Unit unit_level = Unit::household);

/// score + measure at the scheme's own cutoff (or `k` when given).
PovertyResult measure(const DeprivationMatrix &mat, const MeasurementScheme &scheme,
                      std::optional<Rational> k = std::nullopt);

/// (H, A, M0) restricted to a subset of units.
struct GroupMeasure {
    std::string label;
    std::size_t n = 0;
    std::size_t q = 0;
    Rational H;
    std::optional<Rational> A;
    Rational M0;

    friend bool operator==(const GroupMeasure &, const GroupMeasure &) = default;
};

/// Returns nullopt when the subset is empty.
std::optional<GroupMeasure> group_measure(const PovertyResult &result, const UnitPredicate &subset,
                                          std::string label);

// --- grouping ---------------------------------------------------------------

enum class Attribute { sex, marital_status, head_sex, household_poor };

std::string_view to_string(Attribute a) noexcept;
std::optional<Attribute> parse_attribute(std::string_view token) noexcept;

/// Parses "sex,household_poor". Throws Error(Usage) on unknown or repeated keys.
std::vector<Attribute> parse_attributes(std::string_view list);

struct Subgroup {
    std::string label;
    std::vector<std::size_t> units;

    friend bool operator==(const Subgroup &, const Subgroup &) = default;
};

/// Non-empty groups of units sharing every listed attribute, in enum
/// order of the attribute values; labels are joined with '|'. Throws
/// Error(Usage) when an attribute does not exist at the matrix's level
/// (sex on households, household_poor before join_household_status).
std::vector<Subgroup> partition_by(const DeprivationMatrix &mat, std::span<const Attribute> attributes);

/// Label of one unit's attribute value ("female", "female_head",
/// "poor_household", "widowed", ...).
std::string attribute_label(const UnitAttributes &attrs, Attribute a);

// --- decompositions --------------------------------------------------------

struct IndicatorShare {
    std::string indicator_id;
    std::string dimension_id;
    Rational weight;
    std::size_t censored_count = 0;
    Rational censored_headcount;
    /// weight * censored_headcount / M0 of the subset.
    Rational contribution;

    friend bool operator==(const IndicatorShare &, const IndicatorShare &) = default;
};

struct DimensionShare {
    std::string dimension_id;
    Rational weight;
    /// Sum of weight * censored_headcount over the dimension's indicators.
    Rational weighted_headcount;
    Rational contribution;

    friend bool operator==(const DimensionShare &, const DimensionShare &) = default;
};

struct DecompositionTable {
    std::string label;
    std::size_t n = 0;
    std::size_t q = 0;
    Rational M0;
    std::vector<IndicatorShare> indicators;
    std::vector<DimensionShare> dimensions;

    friend bool operator==(const DecompositionTable &, const DecompositionTable &) = default;
};

/// Contribution of each indicator and dimension to M0 over the selected
/// units. Throws EmptyPoorSet when the subset is empty or has M0 = 0, and
/// SchemeMismatch when result, matrix and scheme disagree.
DecompositionTable decompose_indicators(const PovertyResult &result, const DeprivationMatrix &mat,
                                        const MeasurementScheme &scheme, const UnitPredicate &subset,
                                        std::string label = "all");

DecompositionTable decompose_indicators(const PovertyResult &result, const DeprivationMatrix &mat,
                                        const MeasurementScheme &scheme);

struct SubgroupRow {
    std::string label;
    std::size_t n = 0;
    Rational population_share;
    Rational M0;
    /// population_share * M0.
    Rational weighted_M0;
    /// weighted_M0 / total M0; empty when the total is 0.
    std::optional<Rational> contribution;
    std::size_t q = 0;
    Rational H;
    std::optional<Rational> A;

    friend bool operator==(const SubgroupRow &, const SubgroupRow &) = default;
};

struct SubgroupDecomposition {
    std::size_t n = 0;
    Rational M0;
    /// Sum of weighted_M0 over groups.
    Rational reconstructed_M0;
    std::vector<SubgroupRow> rows;

    friend bool operator==(const SubgroupDecomposition &, const SubgroupDecomposition &) = default;
};

/// Population-share decomposition. Throws PartitionError unless the groups
/// cover every unit exactly once.
SubgroupDecomposition decompose_subgroups(const PovertyResult &result, std::span<const Subgroup> groups);

struct SubgroupSummary {
    std::string label;
    std::int64_t n = 0;
    Rational M0;
};

/// Same from published (n_g, M0_g) pairs; M0 is the reconstruction itself.
SubgroupDecomposition decompose_subgroups(std::span<const SubgroupSummary> groups);

// --- individual x household ------------------------------------------------

/// Household status of each individual's household. Throws IntegrityError
/// when an individual's hh_id is absent from the household result.
std::vector<std::uint8_t> household_status_of(const DeprivationMatrix &individual_mat,
                                              const PovertyResult &household_result);

/// Fills attributes.household_poor on an individual matrix.
void join_household_status(DeprivationMatrix &individual_mat, const PovertyResult &household_result);

struct CrosstabOptions {
    bool by_sex = false;
    bool by_head_sex = false;
};

/// Individuals counted by (individual status[, sex]) columns and
/// ([head sex, ]household status) rows. Shares use the column total as
/// denominator. With by_sex, "all" columns are kept beside the sex split.
struct CrossTab {
    std::vector<std::string> row_labels;
    std::vector<std::string> column_labels;
    std::vector<std::size_t> counts; // row-major
    std::vector<std::size_t> column_totals;
    std::vector<std::optional<Rational>> shares;
    std::size_t total = 0;

    std::size_t count(std::size_t row, std::size_t col) const {
        return counts[row * column_labels.size() + col];
    }
    const std::optional<Rational> &share(std::size_t row, std::size_t col) const {
        return shares[row * column_labels.size() + col];
    }

    friend bool operator==(const CrossTab &, const CrossTab &) = default;
};

CrossTab crosstab(const PovertyResult &individual_result, const DeprivationMatrix &individual_mat,
                  const PovertyResult &household_result, CrosstabOptions options = {});

// --- sweep -----------------------------------------------------------------

/// 1/10, 2/10, ..., 10/10.
std::vector<Rational> default_cutoffs();

/// Throws BadCutoffs unless strictly ascending and each in (0, 1].
void check_cutoffs(std::span<const Rational> cutoffs);

struct SweepPoint {
    Rational k;
    GroupMeasure measure;

    friend bool operator==(const SweepPoint &, const SweepPoint &) = default;
};

struct SweepCurve {
    std::vector<Rational> cutoffs;
    std::vector<std::string> groups;
    /// Cutoff-major, then groups in `groups` order.
    std::vector<SweepPoint> points;

    friend bool operator==(const SweepCurve &, const SweepCurve &) = default;
};

/// "all" plus each group of `group_by`.
SweepCurve sweep(const DeprivationMatrix &mat, const MeasurementScheme &scheme,
                 std::span<const Rational> cutoffs, std::span<const Attribute> group_by = {});

// --- identities ------------------------------------------------------------

struct IdentityCheck {
    std::string name;
    bool holds = false;
    std::string detail;
};

/// The exact identities every run must satisfy: M0 = H*A (q > 0),
/// M0 = sum of w_j*CH_j, censoring, shares summing to 1, and the subgroup
/// reconstruction over each listed partition.
std::vector<IdentityCheck> verify_identities(const PovertyResult &result, const DeprivationMatrix &mat,
                                             const MeasurementScheme &scheme,
                                             std::span<const Subgroup> partition = {});

} // namespace afmpi
