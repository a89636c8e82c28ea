#pragma once

#include "afmpi/microdata.hpp"
#include "afmpi/rational.hpp"
#include "afmpi/scheme.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace afmpi {

/// Selects units of a matrix by row index.
using UnitPredicate = std::function<bool(std::size_t)>;

struct UnitAttributes {
    std::string hh_id;
    Sex head_sex{Sex::male};
    std::optional<Sex> sex;
    std::optional<int> age;
    std::optional<MaritalStatus> marital_status;
    /// Filled by join_household_status for individual matrices.
    std::optional<bool> household_poor;

    friend bool operator==(const UnitAttributes &, const UnitAttributes &) = default;
};

struct EvaluationWarnings {
    /// Households without a female respondent; their empowerment cells (and
    /// those of their women) default to non-deprived.
    std::size_t households_without_female_respondent = 0;
    /// Households with more than one female respondent; the primary's
    /// answers are used.
    std::size_t households_with_multiple_female_respondents = 0;

    friend bool operator==(const EvaluationWarnings &, const EvaluationWarnings &) = default;
};

/// Units x indicators binary matrix (1 = deprived), row-major, with the
/// per-unit attributes used for grouping.
struct DeprivationMatrix {
    Unit unit_level{Unit::household};
    std::string scheme_id;
    std::vector<std::string> unit_ids;
    std::vector<std::string> indicator_ids;
    std::vector<std::uint8_t> cells;
    std::vector<UnitAttributes> attributes;
    EvaluationWarnings warnings;

    std::size_t units() const noexcept { return unit_ids.size(); }
    std::size_t indicators() const noexcept { return indicator_ids.size(); }
    bool deprived(std::size_t unit, std::size_t indicator) const noexcept {
        return cells[unit * indicator_ids.size() + indicator] != 0;
    }
    std::span<const std::uint8_t> row(std::size_t unit) const noexcept {
        return std::span{cells}.subspan(unit * indicator_ids.size(), indicator_ids.size());
    }
    std::size_t indicator_index(std::string_view indicator_id) const;

    friend bool operator==(const DeprivationMatrix &, const DeprivationMatrix &) = default;
};

/// One row per household, in hh_id order. Throws SchemeMismatch unless the
/// scheme is household-level.
DeprivationMatrix evaluate_household(const Population &pop, const MeasurementScheme &scheme);

/// One row per adult, in (hh_id, person_id) order. Living-standard and
/// household-asset cells are copies of the household's cells; women take
/// the household female respondent's empowerment answers and men are never
/// deprived in empowerment. Throws SchemeMismatch unless the scheme is
/// individual-level.
DeprivationMatrix evaluate_individual(const Population &pop, const MeasurementScheme &scheme);

/// Dispatches on scheme.unit.
DeprivationMatrix evaluate(const Population &pop, const MeasurementScheme &scheme);

struct IndicatorRate {
    std::string indicator_id;
    std::size_t deprived = 0;
    Rational rate;
};

struct RateTable {
    std::size_t units = 0;
    std::vector<IndicatorRate> rows;
};

/// Share of selected units deprived in each indicator; nullopt when the
/// predicate selects no unit.
std::optional<RateTable> deprivation_rates(const DeprivationMatrix &mat, const UnitPredicate &subset);

/// Interchange CSV: unit_id, hh_id, head_sex, sex, age, marital_status,
/// household_poor, then one 0/1 column per indicator.
std::string write_matrix_csv(const DeprivationMatrix &mat);
DeprivationMatrix read_matrix_csv(std::string_view text, Unit unit_level,
                                  std::string_view scheme_id = {});

} // namespace afmpi
