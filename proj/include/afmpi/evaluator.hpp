#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace afmpi {

enum class Unit { household, individual };

std::string_view to_string(Unit unit) noexcept;
std::optional<Unit> parse_unit(std::string_view text) noexcept;

/// Unit levels at which a deprivation rule can be evaluated.
enum class Applicability { household, individual, both };

bool applies_to(Applicability applicability, Unit unit) noexcept;

/// One key per deprivation rule known to the deprivation module. Scheme
/// documents name rules by the string form of these keys.
enum class EvaluatorKey {
    schooling_any_adult,
    child_enrollment,
    own_education,
    electricity,
    floor,
    sanitation,
    water,
    cooking_fuel,
    consumer_durables,
    household_assets,
    individual_assets,
    travel_market,
    travel_health_facility,
    travel_natal_home,
    travel_outside_village,
    health_decision,
};

struct EvaluatorInfo {
    EvaluatorKey key;
    std::string_view name;
    Applicability applies_to;
    std::string_view rule;
};

std::span<const EvaluatorInfo> evaluator_registry() noexcept;
const EvaluatorInfo &evaluator_info(EvaluatorKey key) noexcept;
std::optional<EvaluatorKey> find_evaluator(std::string_view name) noexcept;
std::string_view to_string(EvaluatorKey key) noexcept;

/// True for the five rules sourced from the female respondent's answers.
bool is_empowerment(EvaluatorKey key) noexcept;

} // namespace afmpi
