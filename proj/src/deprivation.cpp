#include "afmpi/deprivation.hpp"
#include "afmpi/csv.hpp"
#include "afmpi/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>

namespace afmpi {

namespace {

template <typename T>
const T &need(const std::optional<T> &value, std::string_view field, std::string_view unit_id) {
    if (!value) {
        throw Error{ErrorCode::IntegrityError,
                    "field '" + std::string{field} + "' is missing for '" + std::string{unit_id} +
                        "'; ingest with a policy that requires it",
                    {"missing_field"},
                    {{"field", std::string{field}}, {"unit", std::string{unit_id}}}};
    }
    return *value;
}

bool travel_deprived(const std::optional<bool> &allowed_alone, std::string_view field,
                     std::string_view id) {
    return !need(allowed_alone, field, id);
}

// Empowerment cell from the female respondent's answers; non-deprived when
// the household has no female respondent.
bool empowerment_cell(EvaluatorKey key, const PersonRecord *respondent) {
    if (respondent == nullptr) {
        return false;
    }
    const auto &id = respondent->person_id;
    const Mobility mob = respondent->mobility.value_or(Mobility{});
    switch (key) {
    case EvaluatorKey::travel_market:
        return travel_deprived(mob.market_alone, "mob_market", id);
    case EvaluatorKey::travel_health_facility:
        return travel_deprived(mob.health_facility_alone, "mob_health_facility", id);
    case EvaluatorKey::travel_natal_home:
        return travel_deprived(mob.natal_home_alone, "mob_natal_home", id);
    case EvaluatorKey::travel_outside_village:
        return travel_deprived(mob.outside_village_alone, "mob_outside_village", id);
    case EvaluatorKey::health_decision:
        return need(mob.own_health_decision, "health_decision", id) != HealthDecision::self;
    default:
        return false;
    }
}

bool household_cell(EvaluatorKey key, const HouseholdRecord &hh,
                    std::span<const PersonRecord> members, const PersonRecord *respondent) {
    const auto &id = hh.hh_id;
    switch (key) {
    case EvaluatorKey::schooling_any_adult:
        return std::ranges::none_of(members, [](const PersonRecord &p) {
            return p.is_adult() && need(p.education_years, "education_years", p.person_id) >= 5;
        });
    case EvaluatorKey::child_enrollment: {
        const auto &children = need(hh.children_5_9, "enrolled", id);
        return std::ranges::any_of(children, [](const ChildEnrollment &c) { return !c.enrolled; });
    }
    case EvaluatorKey::electricity:
        return !need(hh.has_electricity, "has_electricity", id);
    case EvaluatorKey::floor:
        return need(hh.floor_material, "floor_material", id) == FloorMaterial::earth_mud;
    case EvaluatorKey::sanitation: {
        const auto toilet = need(hh.toilet, "toilet", id);
        return toilet == Toilet::none || toilet == Toilet::shared;
    }
    case EvaluatorKey::water:
        switch (need(hh.water_source, "water_source", id)) {
        case WaterSource::piped:
        case WaterSource::borewell:
        case WaterSource::closed_well:
        case WaterSource::open_well:
            return false;
        default:
            return true;
        }
    case EvaluatorKey::cooking_fuel:
        switch (need(hh.cooking_fuel, "cooking_fuel", id)) {
        case CookingFuel::electricity:
        case CookingFuel::lpg:
        case CookingFuel::biogas:
            return false;
        default:
            return true;
        }
    case EvaluatorKey::consumer_durables:
        return need(hh.durables_owned, "durables", id).size() < 2 &&
               !need(hh.owns_four_wheeler, "owns_four_wheeler", id);
    case EvaluatorKey::household_assets:
        return !need(hh.owns_agri_land, "owns_agri_land", id) &&
               !need(hh.owns_residence, "owns_residence", id);
    case EvaluatorKey::travel_market:
    case EvaluatorKey::travel_health_facility:
    case EvaluatorKey::travel_natal_home:
    case EvaluatorKey::travel_outside_village:
    case EvaluatorKey::health_decision:
        return empowerment_cell(key, respondent);
    case EvaluatorKey::own_education:
    case EvaluatorKey::individual_assets:
        break;
    }
    throw Error{ErrorCode::SchemeMismatch,
                "evaluator '" + std::string{to_string(key)} + "' has no household-level rule",
                {"evaluator_unit"}};
}

void require_unit(const MeasurementScheme &scheme, Unit unit) {
    if (scheme.unit != unit) {
        throw Error{ErrorCode::SchemeMismatch,
                    "scheme '" + scheme.id + "' is " + std::string{to_string(scheme.unit)} +
                        "-level but " + std::string{to_string(unit)} + "-level evaluation was requested",
                    {"unit"},
                    {{"scheme", scheme.id}}};
    }
}

bool has_empowerment(const MeasurementScheme &scheme) {
    return std::ranges::any_of(scheme.indicators,
                               [](const IndicatorSpec &i) { return is_empowerment(i.evaluator); });
}

void count_respondents(EvaluationWarnings &warnings, std::span<const PersonRecord> members) {
    const auto n = count_female_respondents(members);
    if (n == 0) {
        ++warnings.households_without_female_respondent;
    } else if (n > 1) {
        ++warnings.households_with_multiple_female_respondents;
    }
}

DeprivationMatrix empty_matrix(const Population &pop, const MeasurementScheme &scheme, Unit unit) {
    (void)pop;
    DeprivationMatrix mat;
    mat.unit_level = unit;
    mat.scheme_id = scheme.id;
    mat.indicator_ids = scheme.indicator_ids();
    return mat;
}

} // namespace

std::size_t DeprivationMatrix::indicator_index(std::string_view indicator_id) const {
    const auto it = std::ranges::find(indicator_ids, indicator_id);
    if (it == indicator_ids.end()) {
        throw Error{ErrorCode::NotFound, "matrix has no indicator '" + std::string{indicator_id} + "'",
                    {"indicator"}, {{"indicator", std::string{indicator_id}}}};
    }
    return static_cast<std::size_t>(it - indicator_ids.begin());
}

DeprivationMatrix evaluate_household(const Population &pop, const MeasurementScheme &scheme) {
    require_unit(scheme, Unit::household);
    auto mat = empty_matrix(pop, scheme, Unit::household);
    const bool empowerment = has_empowerment(scheme);
    const auto &households = pop.households();
    mat.unit_ids.reserve(households.size());
    mat.attributes.reserve(households.size());
    mat.cells.reserve(households.size() * scheme.indicators.size());

    for (std::size_t h = 0; h < households.size(); ++h) {
        const auto &hh = households[h];
        const auto members = pop.members(h);
        const auto *respondent = female_respondent(members);
        if (empowerment) {
            count_respondents(mat.warnings, members);
        }
        for (const auto &ind : scheme.indicators) {
            mat.cells.push_back(household_cell(ind.evaluator, hh, members, respondent) ? 1 : 0);
        }
        mat.unit_ids.push_back(hh.hh_id);
        mat.attributes.push_back(UnitAttributes{hh.hh_id, hh.head_sex, {}, {}, {}, {}});
    }
    return mat;
}

DeprivationMatrix evaluate_individual(const Population &pop, const MeasurementScheme &scheme) {
    require_unit(scheme, Unit::individual);
    auto mat = empty_matrix(pop, scheme, Unit::individual);
    const bool empowerment = has_empowerment(scheme);
    const auto &households = pop.households();
    const auto width = scheme.indicators.size();
    std::vector<std::uint8_t> household_row(width, 0);

    for (std::size_t h = 0; h < households.size(); ++h) {
        const auto &hh = households[h];
        const auto members = pop.members(h);
        const auto *respondent = female_respondent(members);
        if (empowerment) {
            count_respondents(mat.warnings, members);
        }
        // Shared cells: evaluated once per household, then copied to members.
        for (std::size_t j = 0; j < width; ++j) {
            const auto key = scheme.indicators[j].evaluator;
            household_row[j] = evaluator_info(key).applies_to == Applicability::both &&
                                       household_cell(key, hh, members, respondent)
                                   ? 1
                                   : 0;
        }
        for (const auto &p : members) {
            if (!p.is_adult()) {
                continue;
            }
            for (std::size_t j = 0; j < width; ++j) {
                const auto key = scheme.indicators[j].evaluator;
                bool deprived = false;
                if (key == EvaluatorKey::own_education) {
                    deprived = need(p.education_years, "education_years", p.person_id) < 5;
                } else if (key == EvaluatorKey::individual_assets) {
                    deprived = !need(p.owns_residence_any, "owns_residence_any", p.person_id) &&
                               !need(p.owns_agri_land_any, "owns_agri_land_any", p.person_id);
                } else if (is_empowerment(key)) {
                    deprived = p.sex == Sex::female && household_row[j] != 0;
                } else {
                    deprived = household_row[j] != 0;
                }
                mat.cells.push_back(deprived ? 1 : 0);
            }
            mat.unit_ids.push_back(p.person_id);
            mat.attributes.push_back(
                UnitAttributes{hh.hh_id, hh.head_sex, p.sex, p.age, p.marital_status, {}});
        }
    }
    return mat;
}

DeprivationMatrix evaluate(const Population &pop, const MeasurementScheme &scheme) {
    return scheme.unit == Unit::household ? evaluate_household(pop, scheme)
                                          : evaluate_individual(pop, scheme);
}

std::optional<RateTable> deprivation_rates(const DeprivationMatrix &mat, const UnitPredicate &subset) {
    RateTable table;
    std::vector<std::size_t> counts(mat.indicators(), 0);
    for (std::size_t i = 0; i < mat.units(); ++i) {
        if (!subset(i)) {
            continue;
        }
        ++table.units;
        const auto row = mat.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            counts[j] += row[j];
        }
    }
    if (table.units == 0) {
        return std::nullopt;
    }
    const auto n = static_cast<std::int64_t>(table.units);
    for (std::size_t j = 0; j < counts.size(); ++j) {
        table.rows.push_back(
            {mat.indicator_ids[j], counts[j], Rational{static_cast<std::int64_t>(counts[j]), n}});
    }
    return table;
}

namespace {

constexpr std::array<std::string_view, 7> matrix_prefix{
    "unit_id", "hh_id", "head_sex", "sex", "age", "marital_status", "household_poor"};

} // namespace

std::string write_matrix_csv(const DeprivationMatrix &mat) {
    std::string out;
    std::vector<std::string> cells{matrix_prefix.begin(), matrix_prefix.end()};
    cells.insert(cells.end(), mat.indicator_ids.begin(), mat.indicator_ids.end());
    csv::append_row(out, cells);
    for (std::size_t i = 0; i < mat.units(); ++i) {
        const auto &a = mat.attributes[i];
        cells[0] = mat.unit_ids[i];
        cells[1] = a.hh_id;
        cells[2] = std::string{to_string(a.head_sex)};
        cells[3] = a.sex ? std::string{to_string(*a.sex)} : "";
        cells[4] = a.age ? std::to_string(*a.age) : "";
        cells[5] = a.marital_status ? std::string{to_string(*a.marital_status)} : "";
        cells[6] = a.household_poor ? (*a.household_poor ? "1" : "0") : "";
        const auto row = mat.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            cells[matrix_prefix.size() + j] = row[j] != 0 ? "1" : "0";
        }
        csv::append_row(out, cells);
    }
    return out;
}

DeprivationMatrix read_matrix_csv(std::string_view text, Unit unit_level, std::string_view scheme_id) {
    const auto table = csv::parse(text, "matrix.csv");
    const auto bad = [&](std::size_t r, std::string_view column, const std::string &value) {
        const auto line = r < table.lines.size() ? std::to_string(table.lines[r]) : "1";
        return Error{ErrorCode::IngestError,
                     "matrix.csv:" + line + ": bad value '" + value + "' in column '" +
                         std::string{column} + "'",
                     {"cell"},
                     {{"row", line}, {"column", std::string{column}}}};
    };
    if (table.header.size() < matrix_prefix.size() ||
        !std::equal(matrix_prefix.begin(), matrix_prefix.end(), table.header.begin())) {
        throw Error{ErrorCode::IngestError, "matrix.csv: unexpected header", {"header"}};
    }
    DeprivationMatrix mat;
    mat.unit_level = unit_level;
    mat.scheme_id = std::string{scheme_id};
    mat.indicator_ids.assign(table.header.begin() + matrix_prefix.size(), table.header.end());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto &row = table.rows[r];
        UnitAttributes a;
        a.hh_id = row[1];
        const auto head = parse_token<Sex>(row[2]);
        if (!head) {
            throw bad(r, "head_sex", row[2]);
        }
        a.head_sex = *head;
        if (!row[3].empty()) {
            a.sex = parse_token<Sex>(row[3]);
            if (!a.sex) {
                throw bad(r, "sex", row[3]);
            }
        }
        if (!row[4].empty()) {
            int age = 0;
            const auto [ptr, ec] = std::from_chars(row[4].data(), row[4].data() + row[4].size(), age);
            if (ec != std::errc{} || ptr != row[4].data() + row[4].size()) {
                throw bad(r, "age", row[4]);
            }
            a.age = age;
        }
        if (!row[5].empty()) {
            a.marital_status = parse_token<MaritalStatus>(row[5]);
            if (!a.marital_status) {
                throw bad(r, "marital_status", row[5]);
            }
        }
        if (!row[6].empty()) {
            if (row[6] != "0" && row[6] != "1") {
                throw bad(r, "household_poor", row[6]);
            }
            a.household_poor = row[6] == "1";
        }
        for (std::size_t j = matrix_prefix.size(); j < row.size(); ++j) {
            if (row[j] != "0" && row[j] != "1") {
                throw bad(r, table.header[j], row[j]);
            }
            mat.cells.push_back(row[j] == "1" ? 1 : 0);
        }
        mat.unit_ids.push_back(row[0]);
        mat.attributes.push_back(std::move(a));
    }
    return mat;
}

} // namespace afmpi
