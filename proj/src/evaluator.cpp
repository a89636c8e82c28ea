#include "afmpi/evaluator.hpp"

#include <algorithm>
#include <array>

namespace afmpi {

namespace {

using enum EvaluatorKey;

constexpr std::array<EvaluatorInfo, 16> registry{{
    {schooling_any_adult, "schooling_any_adult", Applicability::household,
     "no adult member has completed 5 years of schooling"},
    {child_enrollment, "child_enrollment", Applicability::household,
     "a child aged 5-9 is not enrolled in school"},
    {own_education, "own_education", Applicability::individual,
     "the person has not completed 5 years of schooling"},
    {electricity, "electricity", Applicability::both, "no electricity"},
    {floor, "floor", Applicability::both, "floor is earth/mud"},
    {sanitation, "sanitation", Applicability::both, "no toilet or a shared toilet"},
    {water, "water", Applicability::both,
     "water is not from a piped source, borewell or closed/open well"},
    {cooking_fuel, "cooking_fuel", Applicability::both,
     "cooking fuel is not electricity, LPG or biogas"},
    {consumer_durables, "consumer_durables", Applicability::both,
     "owns fewer than two listed durables and no four-wheeler"},
    {household_assets, "household_assets", Applicability::both,
     "household owns neither agricultural land nor its residence"},
    {individual_assets, "individual_assets", Applicability::individual,
     "person owns (solely or jointly) neither agricultural land nor the residence"},
    {travel_market, "travel_market", Applicability::both, "not allowed to go to market alone"},
    {travel_health_facility, "travel_health_facility", Applicability::both,
     "not allowed to go to a health facility alone"},
    {travel_natal_home, "travel_natal_home", Applicability::both,
     "not allowed to visit natal home alone"},
    {travel_outside_village, "travel_outside_village", Applicability::both,
     "not allowed to travel outside the village alone"},
    {health_decision, "health_decision", Applicability::both,
     "own health care decided with permission or by someone else"},
}};

} // namespace

std::string_view to_string(Unit unit) noexcept {
    return unit == Unit::household ? "household" : "individual";
}

std::optional<Unit> parse_unit(std::string_view text) noexcept {
    if (text == "household") {
        return Unit::household;
    }
    if (text == "individual") {
        return Unit::individual;
    }
    return std::nullopt;
}

bool applies_to(Applicability applicability, Unit unit) noexcept {
    switch (applicability) {
    case Applicability::both:
        return true;
    case Applicability::household:
        return unit == Unit::household;
    case Applicability::individual:
        return unit == Unit::individual;
    }
    return false;
}

std::span<const EvaluatorInfo> evaluator_registry() noexcept { return registry; }

const EvaluatorInfo &evaluator_info(EvaluatorKey key) noexcept {
    return registry[static_cast<std::size_t>(key)];
}

std::optional<EvaluatorKey> find_evaluator(std::string_view name) noexcept {
    const auto it = std::ranges::find(registry, name, &EvaluatorInfo::name);
    if (it == registry.end()) {
        return std::nullopt;
    }
    return it->key;
}

std::string_view to_string(EvaluatorKey key) noexcept { return evaluator_info(key).name; }

bool is_empowerment(EvaluatorKey key) noexcept {
    switch (key) {
    case travel_market:
    case travel_health_facility:
    case travel_natal_home:
    case travel_outside_village:
    case health_decision:
        return true;
    default:
        return false;
    }
}

} // namespace afmpi
