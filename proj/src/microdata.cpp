#include "afmpi/microdata.hpp"
#include "afmpi/csv.hpp"
#include "afmpi/digest.hpp"
#include "afmpi/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <utility>

namespace afmpi {

namespace {

template <typename Enum, std::size_t N>
using TokenTable = std::array<std::pair<Enum, std::string_view>, N>;

constexpr TokenTable<Sex, 2> sex_tokens{{{Sex::male, "male"}, {Sex::female, "female"}}};
constexpr TokenTable<MaritalStatus, 5> marital_tokens{{
    {MaritalStatus::never_married, "never_married"},
    {MaritalStatus::currently_married, "currently_married"},
    {MaritalStatus::widowed, "widowed"},
    {MaritalStatus::deserted, "deserted"},
    {MaritalStatus::other, "other"},
}};
constexpr TokenTable<FloorMaterial, 3> floor_tokens{{
    {FloorMaterial::earth_mud, "earth_mud"},
    {FloorMaterial::finished, "finished"},
    {FloorMaterial::other, "other"},
}};
constexpr TokenTable<Toilet, 3> toilet_tokens{{
    {Toilet::none, "none"},
    {Toilet::shared, "shared"},
    {Toilet::private_toilet, "private"},
}};
constexpr TokenTable<WaterSource, 7> water_tokens{{
    {WaterSource::piped, "piped"},
    {WaterSource::borewell, "borewell"},
    {WaterSource::closed_well, "closed_well"},
    {WaterSource::open_well, "open_well"},
    {WaterSource::surface, "surface"},
    {WaterSource::tanker, "tanker"},
    {WaterSource::other, "other"},
}};
constexpr TokenTable<CookingFuel, 7> fuel_tokens{{
    {CookingFuel::electricity, "electricity"},
    {CookingFuel::lpg, "lpg"},
    {CookingFuel::biogas, "biogas"},
    {CookingFuel::wood, "wood"},
    {CookingFuel::charcoal, "charcoal"},
    {CookingFuel::dung, "dung"},
    {CookingFuel::other, "other"},
}};
constexpr TokenTable<Durable, 6> durable_tokens{{
    {Durable::fan, "fan"},
    {Durable::tv, "tv"},
    {Durable::cell_phone, "cell_phone"},
    {Durable::cycle, "cycle"},
    {Durable::refrigerator, "refrigerator"},
    {Durable::two_wheeler, "two_wheeler"},
}};
constexpr TokenTable<HealthDecision, 3> decision_tokens{{
    {HealthDecision::self, "self"},
    {HealthDecision::with_permission, "with_permission"},
    {HealthDecision::someone_else, "someone_else"},
}};

template <typename Enum, std::size_t N>
std::string_view lookup(const TokenTable<Enum, N> &table, Enum value) noexcept {
    for (const auto &[e, token] : table) {
        if (e == value) {
            return token;
        }
    }
    return "?";
}

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const TokenTable<Enum, N> &table, std::string_view token) noexcept {
    for (const auto &[e, t] : table) {
        if (t == token) {
            return e;
        }
    }
    return std::nullopt;
}

} // namespace

template <> std::optional<Sex> parse_token<Sex>(std::string_view t) noexcept {
    return lookup(sex_tokens, t);
}
template <> std::optional<MaritalStatus> parse_token<MaritalStatus>(std::string_view t) noexcept {
    return lookup(marital_tokens, t);
}
template <> std::optional<FloorMaterial> parse_token<FloorMaterial>(std::string_view t) noexcept {
    return lookup(floor_tokens, t);
}
template <> std::optional<Toilet> parse_token<Toilet>(std::string_view t) noexcept {
    return lookup(toilet_tokens, t);
}
template <> std::optional<WaterSource> parse_token<WaterSource>(std::string_view t) noexcept {
    return lookup(water_tokens, t);
}
template <> std::optional<CookingFuel> parse_token<CookingFuel>(std::string_view t) noexcept {
    return lookup(fuel_tokens, t);
}
template <> std::optional<Durable> parse_token<Durable>(std::string_view t) noexcept {
    return lookup(durable_tokens, t);
}
template <>
std::optional<HealthDecision> parse_token<HealthDecision>(std::string_view t) noexcept {
    return lookup(decision_tokens, t);
}

namespace {

constexpr std::array<std::string_view, 16> hh_columns{
    "hh_id",         "head_sex",      "has_electricity",      "floor_material",
    "toilet",        "water_source",  "cooking_fuel",         "durable_fan",
    "durable_tv",    "durable_cell_phone", "durable_cycle",   "durable_refrigerator",
    "durable_two_wheeler", "owns_four_wheeler", "owns_agri_land", "owns_residence",
};

constexpr std::array<std::string_view, 16> person_cols{
    "person_id",          "hh_id",          "sex",
    "age",                "marital_status", "education_years",
    "owns_residence_any", "owns_agri_land_any", "enrolled",
    "is_female_respondent", "is_primary_respondent", "mob_market",
    "mob_health_facility", "mob_natal_home", "mob_outside_village",
    "health_decision",
};

constexpr std::array<std::string_view, 29> field_names{
    "head_sex",           "has_electricity",     "floor_material",     "toilet",
    "water_source",       "cooking_fuel",        "durable_fan",        "durable_tv",
    "durable_cell_phone", "durable_cycle",       "durable_refrigerator", "durable_two_wheeler",
    "owns_four_wheeler",  "owns_agri_land",      "owns_residence",     "sex",
    "age",                "marital_status",      "education_years",    "owns_residence_any",
    "owns_agri_land_any", "enrolled",            "is_female_respondent", "is_primary_respondent",
    "mob_market",         "mob_health_facility", "mob_natal_home",     "mob_outside_village",
    "health_decision",
};

constexpr std::array<Field, 6> durable_fields{Field::durable_fan,   Field::durable_tv,
                                              Field::durable_cell_phone, Field::durable_cycle,
                                              Field::durable_refrigerator,
                                              Field::durable_two_wheeler};

// Cursor over one CSV row that converts cells and reports bad values with
// the row and column.
class RowReader {
  public:
    RowReader(const csv::Table &table, std::size_t row, std::string_view source)
        : table_{table}, row_{row}, source_{source} {}

    const std::string &cell(std::string_view column) const {
        return table_.rows[row_][table_.column(column)];
    }

    std::string required_id(std::string_view column) const {
        const auto &value = cell(column);
        if (value.empty()) {
            fail(column, value, "identifier must not be empty");
        }
        return value;
    }

    std::optional<bool> flag(std::string_view column) const {
        const auto &value = cell(column);
        if (value.empty()) {
            return std::nullopt;
        }
        if (value == "0") {
            return false;
        }
        if (value == "1") {
            return true;
        }
        fail(column, value, "expected 0 or 1");
    }

    std::optional<int> count(std::string_view column) const {
        const auto &value = cell(column);
        if (value.empty()) {
            return std::nullopt;
        }
        int parsed = 0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
        if (ec != std::errc{} || ptr != value.data() + value.size() || parsed < 0) {
            fail(column, value, "expected a non-negative integer");
        }
        return parsed;
    }

    template <typename Enum> std::optional<Enum> token(std::string_view column) const {
        const auto &value = cell(column);
        if (value.empty()) {
            return std::nullopt;
        }
        const auto parsed = parse_token<Enum>(value);
        if (!parsed) {
            fail(column, value, "unknown token");
        }
        return parsed;
    }

    [[noreturn]] void fail(std::string_view column, std::string_view value,
                           std::string_view what) const {
        const auto line = std::to_string(table_.lines[row_]);
        throw Error{ErrorCode::IngestError,
                    std::string{source_} + ":" + line + ": column '" + std::string{column} +
                        "': " + std::string{what} + " (got '" + std::string{value} + "')",
                    {"cell"},
                    {{"source", std::string{source_}},
                     {"row", line},
                     {"column", std::string{column}},
                     {"value", std::string{value}}}};
    }

  private:
    const csv::Table &table_;
    std::size_t row_;
    std::string_view source_;
};

void check_header(const csv::Table &table, std::span<const std::string_view> expected,
                  std::string_view source) {
    for (const auto &name : expected) {
        if (table.column(name) == std::string_view::npos) {
            throw Error{ErrorCode::IngestError,
                        std::string{source} + ": missing column '" + std::string{name} + "'",
                        {"header"},
                        {{"source", std::string{source}}, {"row", "1"}, {"column", std::string{name}}}};
        }
    }
    for (const auto &name : table.header) {
        if (std::ranges::find(expected, name) == expected.end()) {
            throw Error{ErrorCode::IngestError,
                        std::string{source} + ": unknown column '" + name + "'",
                        {"header"},
                        {{"source", std::string{source}}, {"row", "1"}, {"column", name}}};
        }
    }
}

// Household rows keep head_sex optional until the deletion pass.
struct RawHousehold {
    HouseholdRecord record;
    bool head_sex_missing = false;
    std::optional<Field> blank_durable;
};

struct RawPerson {
    PersonRecord record;
    std::optional<Sex> sex;
    std::optional<int> age;
    std::optional<MaritalStatus> marital_status;
    std::optional<bool> is_female_respondent;
    std::optional<bool> is_primary_respondent;
};

std::vector<RawHousehold> read_households(std::string_view text, std::string_view source) {
    const auto table = csv::parse(text, source);
    check_header(table, hh_columns, source);
    std::vector<RawHousehold> out;
    out.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const RowReader row{table, i, source};
        RawHousehold raw;
        auto &hh = raw.record;
        hh.hh_id = row.required_id("hh_id");
        const auto head = row.token<Sex>("head_sex");
        raw.head_sex_missing = !head.has_value();
        hh.head_sex = head.value_or(Sex::male);
        hh.has_electricity = row.flag("has_electricity");
        hh.floor_material = row.token<FloorMaterial>("floor_material");
        hh.toilet = row.token<Toilet>("toilet");
        hh.water_source = row.token<WaterSource>("water_source");
        hh.cooking_fuel = row.token<CookingFuel>("cooking_fuel");
        std::set<Durable> owned;
        bool durables_complete = true;
        for (std::size_t d = 0; d < durable_count; ++d) {
            const auto value = row.flag(to_string(durable_fields[d]));
            if (!value) {
                durables_complete = false;
                if (!raw.blank_durable) {
                    raw.blank_durable = durable_fields[d];
                }
            } else if (*value) {
                owned.insert(static_cast<Durable>(d));
            }
        }
        if (durables_complete) {
            hh.durables_owned = std::move(owned);
        }
        hh.owns_four_wheeler = row.flag("owns_four_wheeler");
        hh.owns_agri_land = row.flag("owns_agri_land");
        hh.owns_residence = row.flag("owns_residence");
        out.push_back(std::move(raw));
    }
    return out;
}

std::vector<RawPerson> read_persons(std::string_view text, std::string_view source) {
    const auto table = csv::parse(text, source);
    check_header(table, person_cols, source);
    std::vector<RawPerson> out;
    out.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const RowReader row{table, i, source};
        RawPerson raw;
        auto &p = raw.record;
        p.person_id = row.required_id("person_id");
        p.hh_id = row.required_id("hh_id");
        raw.sex = row.token<Sex>("sex");
        raw.age = row.count("age");
        raw.marital_status = row.token<MaritalStatus>("marital_status");
        p.education_years = row.count("education_years");
        p.owns_residence_any = row.flag("owns_residence_any");
        p.owns_agri_land_any = row.flag("owns_agri_land_any");
        p.enrolled = row.flag("enrolled");
        raw.is_female_respondent = row.flag("is_female_respondent");
        raw.is_primary_respondent = row.flag("is_primary_respondent");
        Mobility mob{row.flag("mob_market"), row.flag("mob_health_facility"),
                     row.flag("mob_natal_home"), row.flag("mob_outside_village"),
                     row.token<HealthDecision>("health_decision")};
        if (mob.any()) {
            p.mobility = mob;
        }
        p.sex = raw.sex.value_or(Sex::male);
        p.age = raw.age.value_or(0);
        p.marital_status = raw.marital_status.value_or(MaritalStatus::other);
        p.is_female_respondent = raw.is_female_respondent.value_or(false);
        p.is_primary_respondent = raw.is_primary_respondent.value_or(false);
        out.push_back(std::move(raw));
    }
    return out;
}

[[noreturn]] void integrity(const std::string &message, std::map<std::string, std::string> context) {
    throw Error{ErrorCode::IntegrityError, message, {"integrity"}, std::move(context)};
}

bool is_child_5_9(const PersonRecord &p) noexcept { return p.age >= 5 && p.age <= 9; }

std::optional<std::vector<ChildEnrollment>> children_of(std::span<const PersonRecord> members) {
    std::vector<ChildEnrollment> children;
    for (const auto &p : members) {
        if (!is_child_5_9(p)) {
            continue;
        }
        if (!p.enrolled) {
            return std::nullopt;
        }
        children.push_back({p.person_id, *p.enrolled});
    }
    return children;
}

// First missing required field for this household, in canonical column
// order (household columns, then members in (person_id) order).
std::optional<Field> first_missing(const RawHousehold &hh, std::span<const RawPerson> members,
                                   const std::set<Field> &required) {
    const auto need = [&](Field f) { return required.contains(f); };
    const auto &r = hh.record;
    if (hh.head_sex_missing) {
        return Field::head_sex;
    }
    const std::array<std::pair<Field, bool>, 9> household_checks{{
        {Field::has_electricity, r.has_electricity.has_value()},
        {Field::floor_material, r.floor_material.has_value()},
        {Field::toilet, r.toilet.has_value()},
        {Field::water_source, r.water_source.has_value()},
        {Field::cooking_fuel, r.cooking_fuel.has_value()},
        {Field::durable_fan, r.durables_owned.has_value()},
        {Field::owns_four_wheeler, r.owns_four_wheeler.has_value()},
        {Field::owns_agri_land, r.owns_agri_land.has_value()},
        {Field::owns_residence, r.owns_residence.has_value()},
    }};
    for (const auto &[field, present] : household_checks) {
        if (present) {
            continue;
        }
        if (field == Field::durable_fan) {
            if (hh.blank_durable && need(*hh.blank_durable)) {
                return *hh.blank_durable;
            }
            continue;
        }
        if (need(field)) {
            return field;
        }
    }

    std::vector<PersonRecord> records;
    records.reserve(members.size());
    for (const auto &m : members) {
        if (!m.sex) {
            return Field::sex;
        }
        if (!m.age) {
            return Field::age;
        }
        if (!m.marital_status) {
            return Field::marital_status;
        }
        if (!m.is_female_respondent) {
            return Field::is_female_respondent;
        }
        if (!m.is_primary_respondent) {
            return Field::is_primary_respondent;
        }
        records.push_back(m.record);
    }
    for (const auto &p : records) {
        if (p.is_adult()) {
            if (need(Field::education_years) && !p.education_years) {
                return Field::education_years;
            }
            if (need(Field::owns_residence_any) && !p.owns_residence_any) {
                return Field::owns_residence_any;
            }
            if (need(Field::owns_agri_land_any) && !p.owns_agri_land_any) {
                return Field::owns_agri_land_any;
            }
        }
        if (is_child_5_9(p) && need(Field::enrolled) && !p.enrolled) {
            return Field::enrolled;
        }
    }
    if (const auto *resp = female_respondent(records)) {
        const Mobility mob = resp->mobility.value_or(Mobility{});
        const std::array<std::pair<Field, bool>, 5> mobility_checks{{
            {Field::mob_market, mob.market_alone.has_value()},
            {Field::mob_health_facility, mob.health_facility_alone.has_value()},
            {Field::mob_natal_home, mob.natal_home_alone.has_value()},
            {Field::mob_outside_village, mob.outside_village_alone.has_value()},
            {Field::health_decision, mob.own_health_decision.has_value()},
        }};
        for (const auto &[field, present] : mobility_checks) {
            if (!present && need(field)) {
                return field;
            }
        }
    }
    return std::nullopt;
}

} // namespace

std::string_view to_string(Sex v) noexcept { return lookup(sex_tokens, v); }
std::string_view to_string(MaritalStatus v) noexcept { return lookup(marital_tokens, v); }
std::string_view to_string(FloorMaterial v) noexcept { return lookup(floor_tokens, v); }
std::string_view to_string(Toilet v) noexcept { return lookup(toilet_tokens, v); }
std::string_view to_string(WaterSource v) noexcept { return lookup(water_tokens, v); }
std::string_view to_string(CookingFuel v) noexcept { return lookup(fuel_tokens, v); }
std::string_view to_string(Durable v) noexcept { return lookup(durable_tokens, v); }
std::string_view to_string(HealthDecision v) noexcept { return lookup(decision_tokens, v); }

std::string_view to_string(Field field) noexcept {
    return field_names[static_cast<std::size_t>(field)];
}

std::string_view to_string(DeletionMode mode) noexcept {
    return mode == DeletionMode::household_listwise ? "listwise" : "per-analysis";
}

std::set<Field> required_fields(const MeasurementScheme &scheme) {
    std::set<Field> out;
    for (const auto &ind : scheme.indicators) {
        switch (ind.evaluator) {
        case EvaluatorKey::schooling_any_adult:
        case EvaluatorKey::own_education:
            out.insert(Field::education_years);
            break;
        case EvaluatorKey::child_enrollment:
            out.insert(Field::enrolled);
            break;
        case EvaluatorKey::electricity:
            out.insert(Field::has_electricity);
            break;
        case EvaluatorKey::floor:
            out.insert(Field::floor_material);
            break;
        case EvaluatorKey::sanitation:
            out.insert(Field::toilet);
            break;
        case EvaluatorKey::water:
            out.insert(Field::water_source);
            break;
        case EvaluatorKey::cooking_fuel:
            out.insert(Field::cooking_fuel);
            break;
        case EvaluatorKey::consumer_durables:
            out.insert(durable_fields.begin(), durable_fields.end());
            out.insert(Field::owns_four_wheeler);
            break;
        case EvaluatorKey::household_assets:
            out.insert(Field::owns_agri_land);
            out.insert(Field::owns_residence);
            break;
        case EvaluatorKey::individual_assets:
            out.insert(Field::owns_residence_any);
            out.insert(Field::owns_agri_land_any);
            break;
        case EvaluatorKey::travel_market:
            out.insert(Field::mob_market);
            break;
        case EvaluatorKey::travel_health_facility:
            out.insert(Field::mob_health_facility);
            break;
        case EvaluatorKey::travel_natal_home:
            out.insert(Field::mob_natal_home);
            break;
        case EvaluatorKey::travel_outside_village:
            out.insert(Field::mob_outside_village);
            break;
        case EvaluatorKey::health_decision:
            out.insert(Field::health_decision);
            break;
        }
    }
    return out;
}

MissingDataPolicy MissingDataPolicy::standard() {
    const std::array schemes{builtin_scheme(khas_household), builtin_scheme(khas_individual)};
    return listwise(schemes);
}

MissingDataPolicy MissingDataPolicy::listwise(std::span<const MeasurementScheme> schemes) {
    MissingDataPolicy policy{DeletionMode::household_listwise, {}};
    for (const auto &s : schemes) {
        policy.required.merge(required_fields(s));
    }
    return policy;
}

MissingDataPolicy MissingDataPolicy::per_analysis(const MeasurementScheme &scheme) {
    return {DeletionMode::per_analysis, required_fields(scheme)};
}

std::map<std::string, std::size_t> Provenance::dropped_by_reason() const {
    std::map<std::string, std::size_t> out;
    for (const auto &d : dropped) {
        ++out[d.reason];
    }
    return out;
}

std::string Provenance::to_json() const {
    nlohmann::ordered_json doc;
    doc["households_source"] = households_source;
    doc["persons_source"] = persons_source;
    doc["policy"] = policy;
    doc["household_rows"] = household_rows;
    doc["person_rows"] = person_rows;
    doc["retained_households"] = retained_households;
    doc["retained_persons"] = retained_persons;
    doc["dropped_households"] = dropped.size();
    doc["dropped_persons"] = dropped_persons;
    auto by_reason = nlohmann::ordered_json::object();
    for (const auto &[reason, n] : dropped_by_reason()) {
        by_reason[reason] = n;
    }
    doc["dropped_by_reason"] = std::move(by_reason);
    auto list = nlohmann::ordered_json::array();
    for (const auto &d : dropped) {
        list.push_back({{"hh_id", d.hh_id}, {"reason", d.reason}});
    }
    doc["dropped"] = std::move(list);
    return doc.dump(2) + "\n";
}

Population Population::from_records(std::vector<HouseholdRecord> households,
                                    std::vector<PersonRecord> persons, Provenance provenance) {
    Population pop;
    std::ranges::sort(households, {}, &HouseholdRecord::hh_id);
    for (std::size_t i = 1; i < households.size(); ++i) {
        if (households[i].hh_id == households[i - 1].hh_id) {
            integrity("duplicate household id '" + households[i].hh_id + "'",
                      {{"hh_id", households[i].hh_id}});
        }
    }
    std::ranges::sort(persons, [](const PersonRecord &a, const PersonRecord &b) {
        return std::tie(a.hh_id, a.person_id) < std::tie(b.hh_id, b.person_id);
    });
    {
        std::vector<const std::string *> ids;
        ids.reserve(persons.size());
        for (const auto &p : persons) {
            ids.push_back(&p.person_id);
        }
        std::ranges::sort(ids, [](const auto *a, const auto *b) { return *a < *b; });
        for (std::size_t i = 1; i < ids.size(); ++i) {
            if (*ids[i] == *ids[i - 1]) {
                integrity("duplicate person id '" + *ids[i] + "'", {{"person_id", *ids[i]}});
            }
        }
    }
    for (const auto &p : persons) {
        if (p.mobility && p.mobility->any() && !(p.sex == Sex::female && p.is_female_respondent)) {
            integrity("person '" + p.person_id +
                          "' has mobility answers but is not a female respondent",
                      {{"person_id", p.person_id}});
        }
        if (p.is_female_respondent && p.sex != Sex::female) {
            integrity("person '" + p.person_id + "' is flagged female respondent but is male",
                      {{"person_id", p.person_id}});
        }
    }

    pop.member_offsets_.reserve(households.size() + 1);
    std::size_t cursor = 0;
    for (auto &hh : households) {
        pop.member_offsets_.push_back(cursor);
        const auto begin = cursor;
        while (cursor < persons.size() && persons[cursor].hh_id == hh.hh_id) {
            ++cursor;
        }
        if (cursor == begin) {
            integrity("household '" + hh.hh_id + "' has no members", {{"hh_id", hh.hh_id}});
        }
        hh.children_5_9 = children_of(std::span{persons}.subspan(begin, cursor - begin));
        if (cursor < persons.size() && persons[cursor].hh_id < hh.hh_id) {
            integrity("person '" + persons[cursor].person_id + "' references unknown household '" +
                          persons[cursor].hh_id + "'",
                      {{"person_id", persons[cursor].person_id}, {"hh_id", persons[cursor].hh_id}});
        }
    }
    pop.member_offsets_.push_back(cursor);
    if (cursor != persons.size()) {
        integrity("person '" + persons[cursor].person_id + "' references unknown household '" +
                      persons[cursor].hh_id + "'",
                  {{"person_id", persons[cursor].person_id}, {"hh_id", persons[cursor].hh_id}});
    }
    pop.households_ = std::move(households);
    pop.persons_ = std::move(persons);
    pop.provenance_ = std::move(provenance);
    return pop;
}

std::span<const PersonRecord> Population::members(std::size_t household_index) const {
    const auto begin = member_offsets_.at(household_index);
    const auto end = member_offsets_.at(household_index + 1);
    return std::span{persons_}.subspan(begin, end - begin);
}

std::size_t Population::household_index(std::string_view hh_id) const {
    const auto it = std::ranges::lower_bound(households_, hh_id, {}, &HouseholdRecord::hh_id);
    if (it == households_.end() || it->hh_id != hh_id) {
        throw Error{ErrorCode::NotFound, "unknown household '" + std::string{hh_id} + "'",
                    {"household"}, {{"hh_id", std::string{hh_id}}}};
    }
    return static_cast<std::size_t>(it - households_.begin());
}

const HouseholdRecord &Population::household(std::string_view hh_id) const {
    return households_[household_index(hh_id)];
}

Population ingest(std::string_view households_csv, std::string_view persons_csv,
                  const MissingDataPolicy &policy, std::string_view households_source,
                  std::string_view persons_source) {
    auto raw_households = read_households(households_csv, households_source);
    auto raw_persons = read_persons(persons_csv, persons_source);

    Provenance prov;
    prov.households_source = std::string{households_source};
    prov.persons_source = std::string{persons_source};
    prov.policy = std::string{to_string(policy.mode)};
    prov.household_rows = raw_households.size();
    prov.person_rows = raw_persons.size();

    // Integrity is checked on the full input, before any deletion.
    std::ranges::sort(raw_households, {}, [](const RawHousehold &h) { return h.record.hh_id; });
    for (std::size_t i = 1; i < raw_households.size(); ++i) {
        if (raw_households[i].record.hh_id == raw_households[i - 1].record.hh_id) {
            integrity("duplicate household id '" + raw_households[i].record.hh_id + "'",
                      {{"hh_id", raw_households[i].record.hh_id}});
        }
    }
    std::ranges::sort(raw_persons, [](const RawPerson &a, const RawPerson &b) {
        return std::tie(a.record.hh_id, a.record.person_id) <
               std::tie(b.record.hh_id, b.record.person_id);
    });

    std::vector<HouseholdRecord> kept_households;
    std::vector<PersonRecord> kept_persons;
    kept_households.reserve(raw_households.size());
    kept_persons.reserve(raw_persons.size());

    std::size_t cursor = 0;
    for (auto &hh : raw_households) {
        if (cursor < raw_persons.size() && raw_persons[cursor].record.hh_id < hh.record.hh_id) {
            const auto &orphan = raw_persons[cursor].record;
            integrity("person '" + orphan.person_id + "' references unknown household '" +
                          orphan.hh_id + "'",
                      {{"person_id", orphan.person_id}, {"hh_id", orphan.hh_id}});
        }
        const auto begin = cursor;
        while (cursor < raw_persons.size() && raw_persons[cursor].record.hh_id == hh.record.hh_id) {
            ++cursor;
        }
        const auto members = std::span{raw_persons}.subspan(begin, cursor - begin);
        if (members.empty()) {
            prov.dropped.push_back({hh.record.hh_id, "no_members"});
            continue;
        }
        if (auto missing = first_missing(hh, members, policy.required)) {
            prov.dropped.push_back({hh.record.hh_id, "missing:" + std::string{to_string(*missing)}});
            prov.dropped_persons += members.size();
            continue;
        }
        kept_households.push_back(std::move(hh.record));
        for (auto &m : members) {
            kept_persons.push_back(std::move(m.record));
        }
    }
    if (cursor != raw_persons.size()) {
        const auto &orphan = raw_persons[cursor].record;
        integrity("person '" + orphan.person_id + "' references unknown household '" +
                      orphan.hh_id + "'",
                  {{"person_id", orphan.person_id}, {"hh_id", orphan.hh_id}});
    }

    prov.retained_households = kept_households.size();
    prov.retained_persons = kept_persons.size();
    return Population::from_records(std::move(kept_households), std::move(kept_persons),
                                    std::move(prov));
}

Population ingest_files(const std::filesystem::path &households_csv,
                        const std::filesystem::path &persons_csv, const MissingDataPolicy &policy) {
    for (const auto &path : {households_csv, persons_csv}) {
        if (!std::filesystem::exists(path)) {
            throw Error{ErrorCode::NotFound, "no such file: " + path.string(), {"missing_file"},
                        {{"path", path.string()}}};
        }
    }
    const auto hh_text = read_file(households_csv);
    const auto person_text = read_file(persons_csv);
    return ingest(hh_text, person_text, policy, households_csv.string(), persons_csv.string());
}

std::vector<const PersonRecord *> adults(const Population &pop) {
    std::vector<const PersonRecord *> out;
    for (const auto &p : pop.persons()) {
        if (p.is_adult()) {
            out.push_back(&p);
        }
    }
    return out;
}

Sex headship(const Population &pop, std::string_view hh_id) { return pop.household(hh_id).head_sex; }

const PersonRecord *female_respondent(std::span<const PersonRecord> members) noexcept {
    const PersonRecord *best = nullptr;
    for (const auto &p : members) {
        if (!p.is_female_respondent || p.sex != Sex::female) {
            continue;
        }
        if (best == nullptr) {
            best = &p;
            continue;
        }
        if (p.is_primary_respondent != best->is_primary_respondent) {
            if (p.is_primary_respondent) {
                best = &p;
            }
        } else if (p.person_id < best->person_id) {
            best = &p;
        }
    }
    return best;
}

std::size_t count_female_respondents(std::span<const PersonRecord> members) noexcept {
    return static_cast<std::size_t>(std::ranges::count_if(
        members, [](const PersonRecord &p) { return p.is_female_respondent && p.sex == Sex::female; }));
}

std::span<const std::string_view> household_columns() noexcept { return hh_columns; }
std::span<const std::string_view> person_columns() noexcept { return person_cols; }

namespace {

std::string cell(const std::optional<bool> &v) {
    if (!v) {
        return {};
    }
    return *v ? "1" : "0";
}

template <typename Enum> std::string cell(const std::optional<Enum> &v) {
    return v ? std::string{to_string(*v)} : std::string{};
}

std::string cell(const std::optional<int> &v) { return v ? std::to_string(*v) : std::string{}; }

} // namespace

std::string write_households_csv(std::span<const HouseholdRecord> households) {
    std::string out;
    out.reserve(households.size() * 96 + 256);
    csv::append_row(out, {hh_columns.begin(), hh_columns.end()});
    std::vector<std::string> cells(hh_columns.size());
    for (const auto &hh : households) {
        cells[0] = hh.hh_id;
        cells[1] = std::string{to_string(hh.head_sex)};
        cells[2] = cell(hh.has_electricity);
        cells[3] = cell(hh.floor_material);
        cells[4] = cell(hh.toilet);
        cells[5] = cell(hh.water_source);
        cells[6] = cell(hh.cooking_fuel);
        for (std::size_t d = 0; d < durable_count; ++d) {
            cells[7 + d] = hh.durables_owned
                               ? (hh.durables_owned->contains(static_cast<Durable>(d)) ? "1" : "0")
                               : "";
        }
        cells[13] = cell(hh.owns_four_wheeler);
        cells[14] = cell(hh.owns_agri_land);
        cells[15] = cell(hh.owns_residence);
        csv::append_row(out, cells);
    }
    return out;
}

std::string write_persons_csv(std::span<const PersonRecord> persons) {
    std::string out;
    out.reserve(persons.size() * 80 + 256);
    csv::append_row(out, {person_cols.begin(), person_cols.end()});
    std::vector<std::string> cells(person_cols.size());
    for (const auto &p : persons) {
        const Mobility mob = p.mobility.value_or(Mobility{});
        cells[0] = p.person_id;
        cells[1] = p.hh_id;
        cells[2] = std::string{to_string(p.sex)};
        cells[3] = std::to_string(p.age);
        cells[4] = std::string{to_string(p.marital_status)};
        cells[5] = cell(p.education_years);
        cells[6] = cell(p.owns_residence_any);
        cells[7] = cell(p.owns_agri_land_any);
        cells[8] = cell(p.enrolled);
        cells[9] = p.is_female_respondent ? "1" : "0";
        cells[10] = p.is_primary_respondent ? "1" : "0";
        cells[11] = cell(mob.market_alone);
        cells[12] = cell(mob.health_facility_alone);
        cells[13] = cell(mob.natal_home_alone);
        cells[14] = cell(mob.outside_village_alone);
        cells[15] = cell(mob.own_health_decision);
        csv::append_row(out, cells);
    }
    return out;
}

} // namespace afmpi
