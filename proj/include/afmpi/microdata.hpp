#pragma once

#include "afmpi/scheme.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace afmpi {

enum class Sex { male, female };
enum class MaritalStatus { never_married, currently_married, widowed, deserted, other };
enum class FloorMaterial { earth_mud, finished, other };
enum class Toilet { none, shared, private_toilet };
enum class WaterSource { piped, borewell, closed_well, open_well, surface, tanker, other };
enum class CookingFuel { electricity, lpg, biogas, wood, charcoal, dung, other };
enum class Durable { fan, tv, cell_phone, cycle, refrigerator, two_wheeler };
enum class HealthDecision { self, with_permission, someone_else };

// Lowercase CSV tokens ("private" for Toilet::private_toilet).
std::string_view to_string(Sex v) noexcept;
std::string_view to_string(MaritalStatus v) noexcept;
std::string_view to_string(FloorMaterial v) noexcept;
std::string_view to_string(Toilet v) noexcept;
std::string_view to_string(WaterSource v) noexcept;
std::string_view to_string(CookingFuel v) noexcept;
std::string_view to_string(Durable v) noexcept;
std::string_view to_string(HealthDecision v) noexcept;

template <typename Enum> std::optional<Enum> parse_token(std::string_view token) noexcept;

inline constexpr std::size_t durable_count = 6;

/// Travel answers are true when the woman may go alone.
struct Mobility {
    std::optional<bool> market_alone;
    std::optional<bool> health_facility_alone;
    std::optional<bool> natal_home_alone;
    std::optional<bool> outside_village_alone;
    std::optional<HealthDecision> own_health_decision;

    bool any() const noexcept {
        return market_alone || health_facility_alone || natal_home_alone ||
               outside_village_alone || own_health_decision;
    }
    friend bool operator==(const Mobility &, const Mobility &) = default;
};

struct ChildEnrollment {
    std::string child_id;
    bool enrolled = false;

    friend bool operator==(const ChildEnrollment &, const ChildEnrollment &) = default;
};

/// Raw household answers. Optional fields are empty only when the active
/// missing-data policy did not require them.
struct HouseholdRecord {
    std::string hh_id;
    Sex head_sex{Sex::male};
    std::optional<bool> has_electricity;
    std::optional<FloorMaterial> floor_material;
    std::optional<Toilet> toilet;
    std::optional<WaterSource> water_source;
    std::optional<CookingFuel> cooking_fuel;
    std::optional<std::set<Durable>> durables_owned;
    std::optional<bool> owns_four_wheeler;
    std::optional<bool> owns_agri_land;
    std::optional<bool> owns_residence;
    /// Derived from member rows aged 5-9; empty optional if any such child
    /// lacks an enrollment answer.
    std::optional<std::vector<ChildEnrollment>> children_5_9;

    friend bool operator==(const HouseholdRecord &, const HouseholdRecord &) = default;
};

struct PersonRecord {
    std::string person_id;
    std::string hh_id;
    Sex sex{Sex::male};
    int age = 0;
    MaritalStatus marital_status{MaritalStatus::other};
    std::optional<int> education_years;
    std::optional<bool> owns_residence_any;
    std::optional<bool> owns_agri_land_any;
    std::optional<bool> enrolled;
    bool is_female_respondent = false;
    bool is_primary_respondent = false;
    std::optional<Mobility> mobility;

    bool is_adult() const noexcept { return age >= adult_age; }

    static constexpr int adult_age = 18;

    friend bool operator==(const PersonRecord &, const PersonRecord &) = default;
};

/// CSV columns that can be missing (empty cell) and trigger deletion.
enum class Field {
    head_sex,
    has_electricity,
    floor_material,
    toilet,
    water_source,
    cooking_fuel,
    durable_fan,
    durable_tv,
    durable_cell_phone,
    durable_cycle,
    durable_refrigerator,
    durable_two_wheeler,
    owns_four_wheeler,
    owns_agri_land,
    owns_residence,
    sex,
    age,
    marital_status,
    education_years,
    owns_residence_any,
    owns_agri_land_any,
    enrolled,
    is_female_respondent,
    is_primary_respondent,
    mob_market,
    mob_health_facility,
    mob_natal_home,
    mob_outside_village,
    health_decision,
};

std::string_view to_string(Field field) noexcept;

/// Raw fields consumed by the scheme's evaluators.
std::set<Field> required_fields(const MeasurementScheme &scheme);

enum class DeletionMode { household_listwise, per_analysis };

std::string_view to_string(DeletionMode mode) noexcept;

/// Household-level deletion: a household and all of its members are dropped
/// when any field in `required` is missing for it or for a member to whom
/// the field applies. `household_listwise` requires the fields of every
/// scheme being compared so all analyses share one sample; `per_analysis`
/// requires only the active scheme's fields.
struct MissingDataPolicy {
    DeletionMode mode{DeletionMode::household_listwise};
    std::set<Field> required;

    /// Listwise over both built-in schemes.
    static MissingDataPolicy standard();
    static MissingDataPolicy listwise(std::span<const MeasurementScheme> schemes);
    static MissingDataPolicy per_analysis(const MeasurementScheme &scheme);
};

struct DroppedHousehold {
    std::string hh_id;
    std::string reason;

    friend bool operator==(const DroppedHousehold &, const DroppedHousehold &) = default;
};

struct Provenance {
    std::string households_source;
    std::string persons_source;
    std::string policy;
    std::size_t household_rows = 0;
    std::size_t person_rows = 0;
    std::size_t retained_households = 0;
    std::size_t retained_persons = 0;
    std::size_t dropped_persons = 0;
    std::vector<DroppedHousehold> dropped;

    std::map<std::string, std::size_t> dropped_by_reason() const;
    std::string to_json() const;

    friend bool operator==(const Provenance &, const Provenance &) = default;
};

/// Households sorted by hh_id and persons sorted by (hh_id, person_id), each
/// household owning a contiguous run of members. Immutable once built.
class Population {
  public:
    /// Sorts and checks referential integrity: unique ids, every person in a
    /// known household, every household with at least one member, mobility
    /// answers only on female respondents. Violations throw IntegrityError.
    static Population from_records(std::vector<HouseholdRecord> households,
                                   std::vector<PersonRecord> persons, Provenance provenance = {});

    const std::vector<HouseholdRecord> &households() const noexcept { return households_; }
    const std::vector<PersonRecord> &persons() const noexcept { return persons_; }
    const Provenance &provenance() const noexcept { return provenance_; }

    std::span<const PersonRecord> members(std::size_t household_index) const;
    std::size_t household_index(std::string_view hh_id) const;
    const HouseholdRecord &household(std::string_view hh_id) const;

    friend bool operator==(const Population &, const Population &) = default;

  private:
    std::vector<HouseholdRecord> households_;
    std::vector<PersonRecord> persons_;
    std::vector<std::size_t> member_offsets_;
    Provenance provenance_;
};

/// Parses both CSV documents, enforces integrity, then applies household
/// deletion per `policy`. Bad cells throw IngestError (row, column);
/// orphans and duplicate ids throw IntegrityError.
Population ingest(std::string_view households_csv, std::string_view persons_csv,
                  const MissingDataPolicy &policy, std::string_view households_source = "households.csv",
                  std::string_view persons_source = "persons.csv");

Population ingest_files(const std::filesystem::path &households_csv,
                        const std::filesystem::path &persons_csv, const MissingDataPolicy &policy);

/// Persons aged 18 or over, in (hh_id, person_id) order.
std::vector<const PersonRecord *> adults(const Population &pop);

Sex headship(const Population &pop, std::string_view hh_id);

/// The member whose mobility answers speak for the household: the primary
/// female respondent if any, otherwise the female respondent with the
/// smallest person_id. nullptr when the household has none.
const PersonRecord *female_respondent(std::span<const PersonRecord> members) noexcept;

std::size_t count_female_respondents(std::span<const PersonRecord> members) noexcept;

/// Header rows of the two CSV files, in canonical column order.
std::span<const std::string_view> household_columns() noexcept;
std::span<const std::string_view> person_columns() noexcept;

/// Serializes records in the ingest dialect; empty optionals become empty
/// cells. `children_5_9` is not written (it is derived from member rows).
std::string write_households_csv(std::span<const HouseholdRecord> households);
std::string write_persons_csv(std::span<const PersonRecord> persons);

} // namespace afmpi
