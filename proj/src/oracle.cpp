#include "afmpi/oracle.hpp"
#include "afmpi/error.hpp"

#include <map>

namespace afmpi {

namespace {

// Everything below deliberately re-reads raw records per unit and per
// indicator; no caching, no common denominators.

bool is_set(const std::optional<bool> &v, const std::string &what) {
    if (!v) {
        throw Error{ErrorCode::IntegrityError, "oracle: missing " + what, {"missing_field"}};
    }
    return *v;
}

const PersonRecord *respondent_of(const std::vector<const PersonRecord *> &members) {
    const PersonRecord *best = nullptr;
    for (const auto *p : members) {
        if (!p->is_female_respondent) {
            continue;
        }
        if (p->is_primary_respondent) {
            return p;
        }
    }
    for (const auto *p : members) {
        if (p->is_female_respondent && (best == nullptr || p->person_id < best->person_id)) {
            best = p;
        }
    }
    return best;
}

bool women_deprived(EvaluatorKey key, const PersonRecord *r) {
    if (r == nullptr || !r->mobility) {
        return false;
    }
    const auto &m = *r->mobility;
    switch (key) {
    case EvaluatorKey::travel_market:
        return !is_set(m.market_alone, "mob_market");
    case EvaluatorKey::travel_health_facility:
        return !is_set(m.health_facility_alone, "mob_health_facility");
    case EvaluatorKey::travel_natal_home:
        return !is_set(m.natal_home_alone, "mob_natal_home");
    case EvaluatorKey::travel_outside_village:
        return !is_set(m.outside_village_alone, "mob_outside_village");
    case EvaluatorKey::health_decision:
        if (!m.own_health_decision) {
            throw Error{ErrorCode::IntegrityError, "oracle: missing health_decision", {"missing_field"}};
        }
        return *m.own_health_decision == HealthDecision::with_permission ||
               *m.own_health_decision == HealthDecision::someone_else;
    default:
        return false;
    }
}

bool household_deprived(EvaluatorKey key, const HouseholdRecord &hh,
                        const std::vector<const PersonRecord *> &members) {
    switch (key) {
    case EvaluatorKey::schooling_any_adult: {
        for (const auto *p : members) {
            if (p->age >= 18 && p->education_years.value() >= 5) {
                return false;
            }
        }
        return true;
    }
    case EvaluatorKey::child_enrollment: {
        for (const auto *p : members) {
            if (p->age >= 5 && p->age <= 9 && !p->enrolled.value()) {
                return true;
            }
        }
        return false;
    }
    case EvaluatorKey::electricity:
        return !hh.has_electricity.value();
    case EvaluatorKey::floor:
        return hh.floor_material.value() == FloorMaterial::earth_mud;
    case EvaluatorKey::sanitation:
        return hh.toilet.value() != Toilet::private_toilet;
    case EvaluatorKey::water: {
        const auto w = hh.water_source.value();
        return !(w == WaterSource::piped || w == WaterSource::borewell || w == WaterSource::closed_well ||
                 w == WaterSource::open_well);
    }
    case EvaluatorKey::cooking_fuel: {
        const auto f = hh.cooking_fuel.value();
        return !(f == CookingFuel::electricity || f == CookingFuel::lpg || f == CookingFuel::biogas);
    }
    case EvaluatorKey::consumer_durables: {
        int owned = 0;
        for (const auto d : hh.durables_owned.value()) {
            (void)d;
            ++owned;
        }
        return owned < 2 && !hh.owns_four_wheeler.value();
    }
    case EvaluatorKey::household_assets:
        return !hh.owns_agri_land.value() && !hh.owns_residence.value();
    default:
        return women_deprived(key, respondent_of(members));
    }
}

} // namespace

OracleReport oracle_report(const Population &pop, const MeasurementScheme &scheme, std::optional<Rational> k) {
    const Rational cutoff = k.value_or(scheme.poverty_cutoff);
    if (cutoff <= Rational{0} || cutoff > Rational{1}) {
        throw Error{ErrorCode::BadCutoffs, "oracle: cutoff out of range", {"range"}};
    }

    std::map<std::string, std::vector<const PersonRecord *>> members;
    for (const auto &p : pop.persons()) {
        members[p.hh_id].push_back(&p);
    }

    OracleReport rep;
    for (const auto &hh : pop.households()) {
        const auto &mem = members[hh.hh_id];
        if (scheme.unit == Unit::household) {
            OracleUnit u{hh.hh_id, hh.hh_id, hh.head_sex, std::nullopt, std::nullopt, {}};
            for (const auto &ind : scheme.indicators) {
                u.deprived.push_back(household_deprived(ind.evaluator, hh, mem) ? 1 : 0);
            }
            rep.units.push_back(std::move(u));
        } else {
            for (const auto *p : mem) {
                if (p->age < 18) {
                    continue;
                }
                OracleUnit u{p->person_id, hh.hh_id, hh.head_sex, p->sex, p->marital_status, {}};
                for (const auto &ind : scheme.indicators) {
                    bool d = false;
                    switch (ind.evaluator) {
                    case EvaluatorKey::own_education:
                        d = p->education_years.value() < 5;
                        break;
                    case EvaluatorKey::individual_assets:
                        d = !p->owns_residence_any.value() && !p->owns_agri_land_any.value();
                        break;
                    case EvaluatorKey::travel_market:
                    case EvaluatorKey::travel_health_facility:
                    case EvaluatorKey::travel_natal_home:
                    case EvaluatorKey::travel_outside_village:
                    case EvaluatorKey::health_decision:
                        d = p->sex == Sex::female && women_deprived(ind.evaluator, respondent_of(mem));
                        break;
                    default:
                        d = household_deprived(ind.evaluator, hh, mem);
                    }
                    u.deprived.push_back(d ? 1 : 0);
                }
                rep.units.push_back(std::move(u));
            }
        }
        if (rep.units.size() > oracle_unit_cap) {
            throw Error{ErrorCode::TooLarge,
                        "oracle is limited to " + std::to_string(oracle_unit_cap) + " units",
                        {"cap"}, {{"cap", std::to_string(oracle_unit_cap)}}};
        }
    }

    auto &r = rep.result;
    r.scheme_id = scheme.id;
    r.unit_level = scheme.unit;
    r.k = cutoff;
    r.n = rep.units.size();
    Rational poor_total;
    for (const auto &u : rep.units) {
        Rational s;
        for (std::size_t j = 0; j < scheme.indicators.size(); ++j) {
            if (u.deprived[j] != 0) {
                s = s + scheme.indicators[j].weight;
            }
        }
        const bool poor = !(s < cutoff);
        r.unit_ids.push_back(u.unit_id);
        r.scores.push_back(s);
        r.poor_flags.push_back(poor ? 1 : 0);
        r.censored_scores.push_back(poor ? s : Rational{});
        if (poor) {
            ++r.q;
            poor_total = poor_total + s;
        }
    }
    if (r.n == 0) {
        throw Error{ErrorCode::Usage, "oracle: no units", {"empty"}};
    }
    r.H = Rational{static_cast<std::int64_t>(r.q), static_cast<std::int64_t>(r.n)};
    r.M0 = poor_total / Rational{static_cast<std::int64_t>(r.n)};
    if (r.q > 0) {
        r.A = poor_total / Rational{static_cast<std::int64_t>(r.q)};
    }
    return rep;
}

PovertyResult oracle_measure(const Population &pop, const MeasurementScheme &scheme, std::optional<Rational> k) {
    return oracle_report(pop, scheme, k).result;
}

std::optional<OracleDecomposition> oracle_decompose(const OracleReport &report, const MeasurementScheme &scheme,
                                                    const std::function<bool(const OracleUnit &)> &keep,
                                                    std::string label) {
    OracleDecomposition d;
    d.label = std::move(label);
    const auto m = scheme.indicators.size();
    std::vector<std::int64_t> poor_deprived(m, 0);
    Rational censored_total;
    for (std::size_t i = 0; i < report.units.size(); ++i) {
        const auto &u = report.units[i];
        if (!keep(u)) {
            continue;
        }
        ++d.n;
        if (report.result.poor_flags[i] == 0) {
            continue;
        }
        ++d.q;
        censored_total = censored_total + report.result.scores[i];
        for (std::size_t j = 0; j < m; ++j) {
            poor_deprived[j] += u.deprived[j];
        }
    }
    if (d.n == 0 || d.q == 0) {
        return std::nullopt;
    }
    const Rational n{static_cast<std::int64_t>(d.n)};
    d.M0 = censored_total / n;
    for (std::size_t j = 0; j < m; ++j) {
        const Rational ch = Rational{poor_deprived[j]} / n;
        d.censored_headcount.push_back(ch);
        d.contribution.push_back(scheme.indicators[j].weight * ch / d.M0);
    }
    for (const auto &dim : scheme.dimensions) {
        Rational c;
        for (std::size_t j = 0; j < m; ++j) {
            if (scheme.indicators[j].dimension_id == dim.id) {
                c = c + d.contribution[j];
            }
        }
        d.dimension_contribution.push_back(c);
    }
    return d;
}

} // namespace afmpi
