#include "afmpi/synthgen.hpp"
#include "afmpi/digest.hpp"
#include "afmpi/error.hpp"
#include "afmpi/microdata.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <numeric>

namespace afmpi {

using json = nlohmann::ordered_json;

std::size_t Rng::categorical(std::span<const double> weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    const double x = uniform() * total;
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) {
            continue;
        }
        acc += weights[i];
        last = i;
        if (x < acc) {
            return i;
        }
    }
    return last;
}

namespace {

[[noreturn]] void config_error(const std::string &message, const std::string &key = {}) {
    std::map<std::string, std::string> ctx;
    if (!key.empty()) {
        ctx["key"] = key;
    }
    throw Error{ErrorCode::ConfigError, message, {"config"}, std::move(ctx)};
}

void reject_unknown(const json &obj, std::initializer_list<std::string_view> known, const std::string &where) {
    for (const auto &[key, value] : obj.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            config_error("unknown key '" + where + key + "'", where + key);
        }
    }
}

double number(const json &obj, std::string_view key, double fallback, const std::string &where = {}) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        return fallback;
    }
    if (!it->is_number()) {
        config_error("'" + where + std::string{key} + "' must be a number", where + std::string{key});
    }
    return it->get<double>();
}

} // namespace

GeneratorConfig GeneratorConfig::from_json(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error &e) {
        config_error(std::string{"config is not valid JSON: "} + e.what());
    }
    if (!doc.is_object()) {
        config_error("config must be a JSON object");
    }
    reject_unknown(doc,
                   {"seed", "n_households", "household_size_distribution", "female_head_share",
                    "base_rates", "gender_gaps", "missingness_rate", "incomplete_households",
                    "intra_household_correlation"},
                   "");
    GeneratorConfig cfg;
    if (const auto it = doc.find("seed"); it != doc.end()) {
        if (!it->is_number_unsigned()) {
            config_error("'seed' must be a non-negative integer", "seed");
        }
        cfg.seed = it->get<std::uint64_t>();
    }
    if (const auto it = doc.find("n_households"); it != doc.end()) {
        if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
            config_error("'n_households' must be a non-negative integer", "n_households");
        }
        cfg.n_households = it->get<std::size_t>();
    }
    if (const auto it = doc.find("household_size_distribution"); it != doc.end()) {
        if (!it->is_array() || it->size() != cfg.household_size_distribution.size()) {
            config_error("'household_size_distribution' must list 10 weights (sizes 1..10)",
                         "household_size_distribution");
        }
        for (std::size_t i = 0; i < cfg.household_size_distribution.size(); ++i) {
            if (!(*it)[i].is_number()) {
                config_error("household size weights must be numbers", "household_size_distribution");
            }
            cfg.household_size_distribution[i] = (*it)[i].get<double>();
        }
    }
    cfg.female_head_share = number(doc, "female_head_share", cfg.female_head_share);
    cfg.missingness_rate = number(doc, "missingness_rate", cfg.missingness_rate);
    cfg.intra_household_correlation =
        number(doc, "intra_household_correlation", cfg.intra_household_correlation);
    if (const auto it = doc.find("incomplete_households"); it != doc.end() && !it->is_null()) {
        if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
            config_error("'incomplete_households' must be a non-negative integer", "incomplete_households");
        }
        cfg.incomplete_households = it->get<std::size_t>();
    }
    if (const auto it = doc.find("base_rates"); it != doc.end()) {
        if (!it->is_object()) {
            config_error("'base_rates' must be an object", "base_rates");
        }
        const std::string w = "base_rates.";
        reject_unknown(*it,
                       {"electricity", "floor", "sanitation", "water", "cooking_fuel", "durables",
                        "household_assets", "child_enrollment", "education", "individual_assets",
                        "health_decision"},
                       w);
        auto &b = cfg.base_rates;
        b.electricity = number(*it, "electricity", b.electricity, w);
        b.floor = number(*it, "floor", b.floor, w);
        b.sanitation = number(*it, "sanitation", b.sanitation, w);
        b.water = number(*it, "water", b.water, w);
        b.cooking_fuel = number(*it, "cooking_fuel", b.cooking_fuel, w);
        b.durables = number(*it, "durables", b.durables, w);
        b.household_assets = number(*it, "household_assets", b.household_assets, w);
        b.child_enrollment = number(*it, "child_enrollment", b.child_enrollment, w);
        b.education = number(*it, "education", b.education, w);
        b.individual_assets = number(*it, "individual_assets", b.individual_assets, w);
        b.health_decision = number(*it, "health_decision", b.health_decision, w);
    }
    if (const auto it = doc.find("gender_gaps"); it != doc.end()) {
        if (!it->is_object()) {
            config_error("'gender_gaps' must be an object", "gender_gaps");
        }
        const std::string w = "gender_gaps.";
        reject_unknown(*it, {"education_gap", "individual_asset_gap", "mobility_restriction_rate"}, w);
        auto &g = cfg.gender_gaps;
        g.education_gap = number(*it, "education_gap", g.education_gap, w);
        g.individual_asset_gap = number(*it, "individual_asset_gap", g.individual_asset_gap, w);
        g.mobility_restriction_rate = number(*it, "mobility_restriction_rate", g.mobility_restriction_rate, w);
    }
    return cfg;
}

GeneratorConfig GeneratorConfig::from_file(const std::filesystem::path &path) {
    return from_json(read_file(path));
}

std::string GeneratorConfig::to_json() const {
    json doc;
    doc["seed"] = seed;
    doc["n_households"] = n_households;
    doc["household_size_distribution"] = json::array();
    for (const auto w : household_size_distribution) {
        doc["household_size_distribution"].push_back(w);
    }
    doc["female_head_share"] = female_head_share;
    const auto &b = base_rates;
    doc["base_rates"] = {{"electricity", b.electricity},
                         {"floor", b.floor},
                         {"sanitation", b.sanitation},
                         {"water", b.water},
                         {"cooking_fuel", b.cooking_fuel},
                         {"durables", b.durables},
                         {"household_assets", b.household_assets},
                         {"child_enrollment", b.child_enrollment},
                         {"education", b.education},
                         {"individual_assets", b.individual_assets},
                         {"health_decision", b.health_decision}};
    doc["gender_gaps"] = {{"education_gap", gender_gaps.education_gap},
                          {"individual_asset_gap", gender_gaps.individual_asset_gap},
                          {"mobility_restriction_rate", gender_gaps.mobility_restriction_rate}};
    doc["missingness_rate"] = missingness_rate;
    doc["incomplete_households"] = incomplete_households ? json(*incomplete_households) : json(nullptr);
    doc["intra_household_correlation"] = intra_household_correlation;
    return doc.dump(2) + "\n";
}

namespace {

void require_probability(double p, const std::string &key) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
        config_error("'" + key + "' must be a probability in [0, 1]", key);
    }
}

void require_delta(double d, const std::string &key) {
    if (!std::isfinite(d) || d < -1.0 || d > 1.0) {
        config_error("'" + key + "' must be in [-1, 1]", key);
    }
}

// Female rate = base + gap, clipped into [0, 1].
double clipped(double base, double gap, const std::string &what, std::vector<std::string> *warnings) {
    const double p = base + gap;
    if (p < 0.0 || p > 1.0) {
        const double c = std::clamp(p, 0.0, 1.0);
        if (warnings != nullptr) {
            warnings->push_back(what + " probability " + std::to_string(p) + " clipped to " +
                                std::to_string(c));
        }
        return c;
    }
    return p;
}

} // namespace

std::vector<std::string> validate(const GeneratorConfig &cfg) {
    if (cfg.n_households == 0) {
        config_error("'n_households' must be at least 1", "n_households");
    }
    double total = 0.0;
    for (const auto w : cfg.household_size_distribution) {
        if (!std::isfinite(w) || w < 0.0) {
            config_error("household size weights must be finite and non-negative",
                         "household_size_distribution");
        }
        total += w;
    }
    if (total <= 0.0) {
        config_error("household size distribution puts no mass on any size (zero-size households)",
                     "household_size_distribution");
    }
    require_probability(cfg.female_head_share, "female_head_share");
    require_probability(cfg.missingness_rate, "missingness_rate");
    require_probability(cfg.intra_household_correlation, "intra_household_correlation");
    const auto &b = cfg.base_rates;
    const std::array<std::pair<double, const char *>, 11> rates{{
        {b.electricity, "base_rates.electricity"},
        {b.floor, "base_rates.floor"},
        {b.sanitation, "base_rates.sanitation"},
        {b.water, "base_rates.water"},
        {b.cooking_fuel, "base_rates.cooking_fuel"},
        {b.durables, "base_rates.durables"},
        {b.household_assets, "base_rates.household_assets"},
        {b.child_enrollment, "base_rates.child_enrollment"},
        {b.education, "base_rates.education"},
        {b.individual_assets, "base_rates.individual_assets"},
        {b.health_decision, "base_rates.health_decision"},
    }};
    for (const auto &[p, key] : rates) {
        require_probability(p, key);
    }
    require_delta(cfg.gender_gaps.education_gap, "gender_gaps.education_gap");
    require_delta(cfg.gender_gaps.individual_asset_gap, "gender_gaps.individual_asset_gap");
    require_probability(cfg.gender_gaps.mobility_restriction_rate, "gender_gaps.mobility_restriction_rate");
    if (cfg.incomplete_households && *cfg.incomplete_households > cfg.n_households) {
        config_error("'incomplete_households' exceeds 'n_households'", "incomplete_households");
    }
    std::vector<std::string> warnings;
    clipped(b.education, cfg.gender_gaps.education_gap, "female education deprivation", &warnings);
    clipped(b.individual_assets, cfg.gender_gaps.individual_asset_gap, "female individual-asset deprivation",
            &warnings);
    return warnings;
}

namespace {

class Household {
  public:
    Household(Rng &rng, double rho) : rng_{rng}, rho_{rho}, latent_{rng.uniform()} {}

    /// Deprived with probability p; the draw reuses the household latent
    /// uniform with probability rho, so marginals stay exactly p.
    bool deprived(double p) {
        const bool shared = rng_.bernoulli(rho_);
        const double u = shared ? latent_ : rng_.uniform();
        return u < p;
    }

  private:
    Rng &rng_;
    double rho_;
    double latent_;
};

template <typename T> T pick(Rng &rng, std::initializer_list<T> options) {
    const auto i = static_cast<std::size_t>(rng.range(0, static_cast<int>(options.size()) - 1));
    return *(options.begin() + i);
}

std::string padded_id(char prefix, std::size_t index, std::size_t width) {
    auto digits = std::to_string(index);
    if (digits.size() < width) {
        digits.insert(0, width - digits.size(), '0');
    }
    return prefix + digits;
}

void blank_one_field(HouseholdRecord &hh, Rng &rng) {
    switch (rng.range(0, 8)) {
    case 0:
        hh.has_electricity.reset();
        break;
    case 1:
        hh.floor_material.reset();
        break;
    case 2:
        hh.toilet.reset();
        break;
    case 3:
        hh.water_source.reset();
        break;
    case 4:
        hh.cooking_fuel.reset();
        break;
    case 5:
        hh.durables_owned.reset();
        break;
    case 6:
        hh.owns_four_wheeler.reset();
        break;
    case 7:
        hh.owns_agri_land.reset();
        break;
    default:
        hh.owns_residence.reset();
        break;
    }
}

} // namespace

GeneratedData generate(const GeneratorConfig &cfg) {
    GeneratedData out;
    out.warnings = validate(cfg);
    const auto &b = cfg.base_rates;
    const auto &gaps = cfg.gender_gaps;
    const double edu_female = clipped(b.education, gaps.education_gap, "", nullptr);
    const double assets_female = clipped(b.individual_assets, gaps.individual_asset_gap, "", nullptr);

    Rng rng{cfg.seed};
    const std::size_t width = std::max<std::size_t>(5, std::to_string(cfg.n_households).size());
    std::vector<HouseholdRecord> households;
    std::vector<PersonRecord> persons;
    households.reserve(cfg.n_households);
    persons.reserve(cfg.n_households * 5);

    for (std::size_t h = 0; h < cfg.n_households; ++h) {
        Household draw{rng, cfg.intra_household_correlation};
        HouseholdRecord hh;
        hh.hh_id = padded_id('H', h + 1, width);
        const auto size = 1 + rng.categorical(cfg.household_size_distribution);
        hh.head_sex = rng.bernoulli(cfg.female_head_share) ? Sex::female : Sex::male;

        // Amenities.
        hh.has_electricity = !draw.deprived(b.electricity);
        hh.floor_material = draw.deprived(b.floor)
                                ? FloorMaterial::earth_mud
                                : (rng.bernoulli(0.1) ? FloorMaterial::other : FloorMaterial::finished);
        hh.toilet = draw.deprived(b.sanitation) ? pick(rng, {Toilet::none, Toilet::shared})
                                                : Toilet::private_toilet;
        hh.water_source = draw.deprived(b.water)
                              ? pick(rng, {WaterSource::surface, WaterSource::tanker, WaterSource::other})
                              : pick(rng, {WaterSource::piped, WaterSource::borewell,
                                           WaterSource::closed_well, WaterSource::open_well});
        hh.cooking_fuel = draw.deprived(b.cooking_fuel)
                              ? pick(rng, {CookingFuel::wood, CookingFuel::charcoal, CookingFuel::dung,
                                           CookingFuel::other})
                              : pick(rng, {CookingFuel::lpg, CookingFuel::electricity, CookingFuel::biogas});
        {
            std::set<Durable> owned;
            const bool poor_in_durables = draw.deprived(b.durables);
            const int count = poor_in_durables ? rng.range(0, 1) : rng.range(2, 5);
            while (static_cast<int>(owned.size()) < count) {
                owned.insert(static_cast<Durable>(rng.range(0, static_cast<int>(durable_count) - 1)));
            }
            hh.durables_owned = std::move(owned);
            hh.owns_four_wheeler = !poor_in_durables && rng.bernoulli(0.05);
        }
        const bool asset_poor = draw.deprived(b.household_assets);
        bool owns_residence = false;
        bool owns_land = false;
        if (!asset_poor) {
            owns_residence = rng.bernoulli(0.85);
            owns_land = rng.bernoulli(0.45);
            if (!owns_residence && !owns_land) {
                owns_residence = true;
            }
        }
        hh.owns_residence = owns_residence;
        hh.owns_agri_land = owns_land;

        // Members: head, spouse when the head is a man, then others.
        std::vector<PersonRecord> members;
        const auto add_person = [&](Sex sex, int age, MaritalStatus marital) {
            PersonRecord p;
            p.person_id = hh.hh_id + padded_id('-', members.size() + 1, 2);
            p.hh_id = hh.hh_id;
            p.sex = sex;
            p.age = age;
            p.marital_status = marital;
            members.push_back(std::move(p));
        };
        const int head_age = rng.range(25, 75);
        if (hh.head_sex == Sex::male) {
            add_person(Sex::male, head_age,
                       size >= 2 ? MaritalStatus::currently_married
                                 : pick(rng, {MaritalStatus::never_married, MaritalStatus::widowed}));
            if (size >= 2) {
                add_person(Sex::female, std::clamp(head_age - rng.range(0, 8), 18, 90),
                           MaritalStatus::currently_married);
            }
        } else {
            const std::array<double, 4> marital_weights{0.6, 0.25, 0.1, 0.05};
            constexpr std::array<MaritalStatus, 4> marital_options{
                MaritalStatus::widowed, MaritalStatus::currently_married, MaritalStatus::deserted,
                MaritalStatus::other};
            add_person(Sex::female, head_age, marital_options[rng.categorical(marital_weights)]);
        }
        while (members.size() < size) {
            const Sex sex = rng.bernoulli(0.5) ? Sex::female : Sex::male;
            if (rng.bernoulli(0.5)) {
                add_person(sex, rng.range(0, 17), MaritalStatus::never_married);
            } else {
                const int age = rng.range(18, 45);
                add_person(sex, age,
                           age >= 25 && rng.bernoulli(0.7) ? MaritalStatus::currently_married
                                                           : MaritalStatus::never_married);
            }
        }

        PersonRecord *respondent = nullptr;
        for (auto &p : members) {
            if (p.is_adult()) {
                const bool female = p.sex == Sex::female;
                const bool edu_poor = draw.deprived(female ? edu_female : b.education);
                p.education_years = edu_poor ? rng.range(0, 4) : rng.range(5, 15);
                bool res = false;
                bool land = false;
                if (!asset_poor && !draw.deprived(female ? assets_female : b.individual_assets)) {
                    if (owns_residence && owns_land) {
                        res = rng.bernoulli(0.7);
                        land = !res || rng.bernoulli(0.3);
                    } else {
                        res = owns_residence;
                        land = owns_land;
                    }
                }
                p.owns_residence_any = res;
                p.owns_agri_land_any = land;
                if (female && respondent == nullptr) {
                    respondent = &p;
                }
            } else {
                p.education_years = p.age >= 6 ? rng.range(0, p.age - 5) : 0;
                if (p.age >= 5) {
                    p.enrolled = !draw.deprived(b.child_enrollment);
                }
            }
        }
        if (respondent != nullptr) {
            respondent->is_female_respondent = true;
            respondent->is_primary_respondent = true;
            Mobility m;
            const double r = gaps.mobility_restriction_rate;
            m.market_alone = !draw.deprived(r);
            m.health_facility_alone = !draw.deprived(r);
            m.natal_home_alone = !draw.deprived(r);
            m.outside_village_alone = !draw.deprived(r);
            m.own_health_decision = draw.deprived(b.health_decision)
                                        ? pick(rng, {HealthDecision::with_permission,
                                                     HealthDecision::someone_else})
                                        : HealthDecision::self;
            respondent->mobility = m;
        }
        households.push_back(std::move(hh));
        persons.insert(persons.end(), std::make_move_iterator(members.begin()),
                       std::make_move_iterator(members.end()));
    }

    // Blank cells come from their own stream so toggling missingness leaves
    // every other value unchanged.
    Rng holes{cfg.seed ^ 0x9e3779b97f4a7c15ULL};
    if (cfg.incomplete_households) {
        std::vector<std::size_t> order(households.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = 0; i < *cfg.incomplete_households; ++i) {
            const auto j = i + static_cast<std::size_t>(holes.range(0, static_cast<int>(order.size() - i) - 1));
            std::swap(order[i], order[j]);
            blank_one_field(households[order[i]], holes);
        }
    } else if (cfg.missingness_rate > 0.0) {
        for (auto &hh : households) {
            if (holes.bernoulli(cfg.missingness_rate)) {
                blank_one_field(hh, holes);
            }
        }
    }

    out.households_csv = write_households_csv(households);
    out.persons_csv = write_persons_csv(persons);
    return out;
}

GeneratedData mini_fixture() {
    GeneratedData out;
    out.households_csv =
        R"(hh_id,head_sex,has_electricity,floor_material,toilet,water_source,cooking_fuel,durable_fan,durable_tv,durable_cell_phone,durable_cycle,durable_refrigerator,durable_two_wheeler,owns_four_wheeler,owns_agri_land,owns_residence
H1,male,1,finished,private,piped,wood,1,1,1,0,0,0,0,0,1
H2,male,0,earth_mud,none,surface,dung,0,0,0,1,0,0,0,0,1
H3,female,1,finished,shared,tanker,wood,1,1,1,0,0,0,0,0,1
H4,male,0,earth_mud,none,open_well,wood,0,0,0,0,0,0,0,1,0
H5,male,1,finished,private,borewell,lpg,1,1,0,0,1,1,0,0,1
H6,male,1,finished,private,closed_well,electricity,0,0,1,0,0,0,1,0,1
)";
    out.persons_csv =
        R"(person_id,hh_id,sex,age,marital_status,education_years,owns_residence_any,owns_agri_land_any,enrolled,is_female_respondent,is_primary_respondent,mob_market,mob_health_facility,mob_natal_home,mob_outside_village,health_decision
P01,H1,male,38,currently_married,10,1,0,,0,0,,,,,
P02,H1,female,33,currently_married,3,0,0,,1,1,1,1,1,1,self
P03,H1,female,7,never_married,1,,,1,0,0,,,,,
P04,H2,male,45,currently_married,8,1,0,,0,0,,,,,
P05,H2,female,40,currently_married,0,0,0,,1,1,0,1,0,1,self
P06,H2,male,12,never_married,5,,,1,0,0,,,,,
P07,H3,female,62,widowed,0,1,0,,1,1,1,1,0,0,with_permission
P08,H3,male,30,never_married,7,0,0,,0,0,,,,,
P09,H3,male,6,never_married,0,,,0,0,0,,,,,
P10,H4,male,50,never_married,2,0,1,,0,0,,,,,
P11,H4,male,35,never_married,0,0,0,,0,0,,,,,
P12,H5,male,55,widowed,12,1,0,,0,0,,,,,
P13,H5,female,45,deserted,4,0,0,,1,1,1,1,1,1,self
P14,H6,male,70,widowed,0,1,0,,0,0,,,,,
)";
    return out;
}

} // namespace afmpi
