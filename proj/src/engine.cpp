#include "afmpi/engine.hpp"
#include "afmpi/error.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

namespace afmpi {

namespace {

void check_cutoff(const Rational &k) {
    if (k <= Rational{0} || k > Rational{1}) {
        throw Error{ErrorCode::BadCutoffs, "poverty cutoff " + k.str() + " is outside (0, 1]",
                    {"range"}, {{"k", k.str()}}};
    }
}

void check_columns(const DeprivationMatrix &mat, const MeasurementScheme &scheme) {
    const auto ids = scheme.indicator_ids();
    if (ids != mat.indicator_ids) {
        throw Error{ErrorCode::SchemeMismatch,
                    "matrix columns do not match the indicators of scheme '" + scheme.id + "'",
                    {"indicators"},
                    {{"scheme", scheme.id}}};
    }
    if (mat.cells.size() != mat.units() * mat.indicators() || mat.attributes.size() != mat.units()) {
        throw Error{ErrorCode::IntegrityError, "deprivation matrix is malformed", {"shape"}};
    }
}

void check_result(const PovertyResult &result, const DeprivationMatrix &mat) {
    if (result.n != mat.units() || result.unit_ids != mat.unit_ids) {
        throw Error{ErrorCode::SchemeMismatch, "poverty result was not computed from this matrix",
                    {"units"}};
    }
}

Rational ratio(std::size_t a, std::size_t b) {
    return {static_cast<std::int64_t>(a), static_cast<std::int64_t>(b)};
}

} // namespace

ScoreVector score(const DeprivationMatrix &mat, const MeasurementScheme &scheme) {
    check_columns(mat, scheme);
    ScoreVector sv;
    sv.unit_ids = mat.unit_ids;

    std::int64_t lcd = 1;
    for (const auto &ind : scheme.indicators) {
        lcd = std::lcm(lcd, ind.weight.den());
    }
    std::vector<std::int64_t> w;
    w.reserve(scheme.indicators.size());
    for (const auto &ind : scheme.indicators) {
        w.push_back(ind.weight.num() * (lcd / ind.weight.den()));
    }
    sv.denominator = lcd;

    const auto width = mat.indicators();
    sv.numerators.resize(mat.units());
    for (std::size_t i = 0; i < mat.units(); ++i) {
        const auto *row = mat.cells.data() + i * width;
        std::int64_t s = 0;
        for (std::size_t j = 0; j < width; ++j) {
            s += row[j] != 0 ? w[j] : 0;
        }
        sv.numerators[i] = s;
    }
    return sv;
}

std::vector<std::uint8_t> identify(const ScoreVector &sv, const Rational &k) {
    check_cutoff(k);
    // score >= k  <=>  num * k.den >= k.num * den (all positive).
    const __int128 rhs = static_cast<__int128>(k.num()) * sv.denominator;
    std::vector<std::uint8_t> flags(sv.size());
    for (std::size_t i = 0; i < sv.size(); ++i) {
        flags[i] = static_cast<__int128>(sv.numerators[i]) * k.den() >= rhs ? 1 : 0;
    }
    return flags;
}

PovertyResult measure(const ScoreVector &sv, const Rational &k, std::string scheme_id, Unit unit_level) {
    if (sv.size() == 0) {
        throw Error{ErrorCode::Usage, "cannot measure poverty over zero units", {"empty"}};
    }
    PovertyResult r;
    r.scheme_id = std::move(scheme_id);
    r.unit_level = unit_level;
    r.k = k;
    r.n = sv.size();
    r.unit_ids = sv.unit_ids;
    r.poor_flags = identify(sv, k);

    std::int64_t poor_sum = 0;
    r.scores.reserve(r.n);
    r.censored_scores.reserve(r.n);
    for (std::size_t i = 0; i < r.n; ++i) {
        r.scores.push_back(sv.score(i));
        if (r.poor_flags[i] != 0) {
            ++r.q;
            poor_sum += sv.numerators[i];
            r.censored_scores.push_back(r.scores.back());
        } else {
            r.censored_scores.emplace_back(0);
        }
    }
    const auto n = static_cast<std::int64_t>(r.n);
    const auto q = static_cast<std::int64_t>(r.q);
    r.H = Rational{q, n};
    r.M0 = Rational{poor_sum, n} / Rational{sv.denominator};
    if (q > 0) {
        r.A = Rational{poor_sum, q} / Rational{sv.denominator};
    }
    return r;
}

PovertyResult measure(const DeprivationMatrix &mat, const MeasurementScheme &scheme,
                      std::optional<Rational> k) {
    return measure(score(mat, scheme), k.value_or(scheme.poverty_cutoff), scheme.id, mat.unit_level);
}

std::optional<GroupMeasure> group_measure(const PovertyResult &result, const UnitPredicate &subset,
                                          std::string label) {
    GroupMeasure g;
    g.label = std::move(label);
    Rational poor_sum;
    for (std::size_t i = 0; i < result.n; ++i) {
        if (!subset(i)) {
            continue;
        }
        ++g.n;
        if (result.poor(i)) {
            ++g.q;
            poor_sum += result.scores[i];
        }
    }
    if (g.n == 0) {
        return std::nullopt;
    }
    g.H = ratio(g.q, g.n);
    g.M0 = poor_sum / Rational{static_cast<std::int64_t>(g.n)};
    if (g.q > 0) {
        g.A = poor_sum / Rational{static_cast<std::int64_t>(g.q)};
    }
    return g;
}

// --- grouping ---------------------------------------------------------------

std::string_view to_string(Attribute a) noexcept {
    switch (a) {
    case Attribute::sex:
        return "sex";
    case Attribute::marital_status:
        return "marital_status";
    case Attribute::head_sex:
        return "head_sex";
    case Attribute::household_poor:
        return "household_poor";
    }
    return "?";
}

std::optional<Attribute> parse_attribute(std::string_view token) noexcept {
    for (const auto a : {Attribute::sex, Attribute::marital_status, Attribute::head_sex,
                         Attribute::household_poor}) {
        if (to_string(a) == token) {
            return a;
        }
    }
    return std::nullopt;
}

std::vector<Attribute> parse_attributes(std::string_view list) {
    std::vector<Attribute> out;
    while (!list.empty()) {
        const auto comma = list.find(',');
        const auto token = list.substr(0, comma);
        const auto a = parse_attribute(token);
        if (!a) {
            throw Error{ErrorCode::Usage, "unknown group key '" + std::string{token} + "'",
                        {"group_by"}, {{"key", std::string{token}}}};
        }
        if (std::ranges::find(out, *a) != out.end()) {
            throw Error{ErrorCode::Usage, "group key '" + std::string{token} + "' repeated",
                        {"group_by"}, {{"key", std::string{token}}}};
        }
        out.push_back(*a);
        list = comma == std::string_view::npos ? std::string_view{} : list.substr(comma + 1);
    }
    return out;
}

namespace {

// Ordinal of the attribute value, or -1 when absent.
int attribute_ordinal(const UnitAttributes &attrs, Attribute a) {
    switch (a) {
    case Attribute::sex:
        return attrs.sex ? static_cast<int>(*attrs.sex) : -1;
    case Attribute::marital_status:
        return attrs.marital_status ? static_cast<int>(*attrs.marital_status) : -1;
    case Attribute::head_sex:
        return static_cast<int>(attrs.head_sex);
    case Attribute::household_poor:
        // Poor households first, matching the report layout.
        return attrs.household_poor ? (*attrs.household_poor ? 0 : 1) : -1;
    }
    return -1;
}

} // namespace

std::string attribute_label(const UnitAttributes &attrs, Attribute a) {
    switch (a) {
    case Attribute::sex:
        return attrs.sex ? std::string{to_string(*attrs.sex)} : "";
    case Attribute::marital_status:
        return attrs.marital_status ? std::string{to_string(*attrs.marital_status)} : "";
    case Attribute::head_sex:
        return std::string{to_string(attrs.head_sex)} + "_head";
    case Attribute::household_poor:
        return attrs.household_poor ? (*attrs.household_poor ? "poor_household" : "non_poor_household")
                                    : "";
    }
    return {};
}

std::vector<Subgroup> partition_by(const DeprivationMatrix &mat, std::span<const Attribute> attributes) {
    for (const auto a : attributes) {
        if ((a == Attribute::sex || a == Attribute::marital_status ||
             a == Attribute::household_poor) &&
            mat.unit_level != Unit::individual) {
            throw Error{ErrorCode::Usage,
                        "group key '" + std::string{to_string(a)} + "' applies at individual level only",
                        {"group_by"}, {{"key", std::string{to_string(a)}}}};
        }
    }
    std::map<std::vector<int>, Subgroup> groups;
    std::vector<int> key(attributes.size());
    for (std::size_t i = 0; i < mat.units(); ++i) {
        const auto &attrs = mat.attributes[i];
        for (std::size_t a = 0; a < attributes.size(); ++a) {
            key[a] = attribute_ordinal(attrs, attributes[a]);
            if (key[a] < 0) {
                throw Error{ErrorCode::Usage,
                            "unit '" + mat.unit_ids[i] + "' has no value for '" +
                                std::string{to_string(attributes[a])} + "'",
                            {"group_by"}, {{"key", std::string{to_string(attributes[a])}}}};
            }
        }
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) {
            for (std::size_t a = 0; a < attributes.size(); ++a) {
                if (a > 0) {
                    it->second.label += '|';
                }
                it->second.label += attribute_label(attrs, attributes[a]);
            }
            if (attributes.empty()) {
                it->second.label = "all";
            }
        }
        it->second.units.push_back(i);
    }
    std::vector<Subgroup> out;
    out.reserve(groups.size());
    for (auto &[k, g] : groups) {
        out.push_back(std::move(g));
    }
    return out;
}

// --- decompositions --------------------------------------------------------

DecompositionTable decompose_indicators(const PovertyResult &result, const DeprivationMatrix &mat,
                                        const MeasurementScheme &scheme, const UnitPredicate &subset,
                                        std::string label) {
    check_columns(mat, scheme);
    check_result(result, mat);

    DecompositionTable t;
    t.label = std::move(label);
    std::vector<std::size_t> counts(mat.indicators(), 0);
    Rational censored_sum;
    for (std::size_t i = 0; i < mat.units(); ++i) {
        if (!subset(i)) {
            continue;
        }
        ++t.n;
        if (!result.poor(i)) {
            continue;
        }
        ++t.q;
        censored_sum += result.censored_scores[i];
        const auto row = mat.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            counts[j] += row[j];
        }
    }
    if (t.n == 0 || t.q == 0) {
        throw Error{ErrorCode::EmptyPoorSet,
                    t.n == 0 ? "subgroup '" + t.label + "' is empty"
                             : "subgroup '" + t.label + "' has no poor units (M0 = 0)",
                    {t.n == 0 ? "empty" : "no_poor"},
                    {{"group", t.label}}};
    }
    const Rational n{static_cast<std::int64_t>(t.n)};
    t.M0 = censored_sum / n;

    for (std::size_t j = 0; j < scheme.indicators.size(); ++j) {
        const auto &ind = scheme.indicators[j];
        IndicatorShare s;
        s.indicator_id = ind.id;
        s.dimension_id = ind.dimension_id;
        s.weight = ind.weight;
        s.censored_count = counts[j];
        s.censored_headcount = ratio(counts[j], t.n);
        s.contribution = ind.weight * s.censored_headcount / t.M0;
        t.indicators.push_back(std::move(s));
    }
    for (const auto &dim : scheme.dimensions) {
        DimensionShare d;
        d.dimension_id = dim.id;
        for (const auto &s : t.indicators) {
            if (s.dimension_id == dim.id) {
                d.weight += s.weight;
                d.weighted_headcount += s.weight * s.censored_headcount;
                d.contribution += s.contribution;
            }
        }
        t.dimensions.push_back(std::move(d));
    }
    return t;
}

DecompositionTable decompose_indicators(const PovertyResult &result, const DeprivationMatrix &mat,
                                        const MeasurementScheme &scheme) {
    return decompose_indicators(result, mat, scheme, [](std::size_t) { return true; });
}

SubgroupDecomposition decompose_subgroups(const PovertyResult &result, std::span<const Subgroup> groups) {
    std::vector<std::uint8_t> seen(result.n, 0);
    for (const auto &g : groups) {
        for (const auto i : g.units) {
            if (i >= result.n || seen[i] != 0) {
                throw Error{ErrorCode::PartitionError,
                            i >= result.n ? "group '" + g.label + "' names a unit out of range"
                                          : "unit '" + result.unit_ids[i] + "' is in more than one group",
                            {i >= result.n ? "range" : "overlap"},
                            {{"group", g.label}}};
            }
            seen[i] = 1;
        }
    }
    if (const auto it = std::ranges::find(seen, std::uint8_t{0}); it != seen.end()) {
        const auto i = static_cast<std::size_t>(it - seen.begin());
        throw Error{ErrorCode::PartitionError, "unit '" + result.unit_ids[i] + "' is in no group",
                    {"cover"}, {{"unit", result.unit_ids[i]}}};
    }

    SubgroupDecomposition d;
    d.n = result.n;
    d.M0 = result.M0;
    const Rational n{static_cast<std::int64_t>(result.n)};
    for (const auto &g : groups) {
        std::vector<std::uint8_t> member(result.n, 0);
        for (const auto i : g.units) {
            member[i] = 1;
        }
        const auto gm = group_measure(result, [&](std::size_t i) { return member[i] != 0; }, g.label);
        SubgroupRow row;
        row.label = g.label;
        row.n = g.units.size();
        row.population_share = Rational{static_cast<std::int64_t>(row.n)} / n;
        if (gm) {
            row.M0 = gm->M0;
            row.q = gm->q;
            row.H = gm->H;
            row.A = gm->A;
        }
        row.weighted_M0 = row.population_share * row.M0;
        if (!d.M0.is_zero()) {
            row.contribution = row.weighted_M0 / d.M0;
        }
        d.reconstructed_M0 += row.weighted_M0;
        d.rows.push_back(std::move(row));
    }
    return d;
}

SubgroupDecomposition decompose_subgroups(std::span<const SubgroupSummary> groups) {
    SubgroupDecomposition d;
    std::int64_t n = 0;
    for (const auto &g : groups) {
        if (g.n <= 0) {
            throw Error{ErrorCode::PartitionError, "group '" + g.label + "' has no units", {"empty"}};
        }
        n += g.n;
    }
    if (n == 0) {
        throw Error{ErrorCode::PartitionError, "no groups given", {"empty"}};
    }
    d.n = static_cast<std::size_t>(n);
    for (const auto &g : groups) {
        SubgroupRow row;
        row.label = g.label;
        row.n = static_cast<std::size_t>(g.n);
        row.population_share = Rational{g.n, n};
        row.M0 = g.M0;
        row.weighted_M0 = row.population_share * g.M0;
        d.reconstructed_M0 += row.weighted_M0;
        d.rows.push_back(std::move(row));
    }
    d.M0 = d.reconstructed_M0;
    for (auto &row : d.rows) {
        if (!d.M0.is_zero()) {
            row.contribution = row.weighted_M0 / d.M0;
        }
    }
    return d;
}

// --- individual x household ------------------------------------------------

std::vector<std::uint8_t> household_status_of(const DeprivationMatrix &individual_mat,
                                              const PovertyResult &household_result) {
    if (individual_mat.unit_level != Unit::individual || household_result.unit_level != Unit::household) {
        throw Error{ErrorCode::SchemeMismatch,
                    "join needs an individual matrix and a household result", {"unit"}};
    }
    std::unordered_map<std::string_view, std::uint8_t> status;
    status.reserve(household_result.n);
    for (std::size_t h = 0; h < household_result.n; ++h) {
        status.emplace(household_result.unit_ids[h], household_result.poor_flags[h]);
    }
    std::vector<std::uint8_t> out(individual_mat.units());
    for (std::size_t i = 0; i < individual_mat.units(); ++i) {
        const auto &hh_id = individual_mat.attributes[i].hh_id;
        const auto it = status.find(hh_id);
        if (it == status.end()) {
            throw Error{ErrorCode::IntegrityError,
                        "individual '" + individual_mat.unit_ids[i] + "' belongs to household '" + hh_id +
                            "', which is not in the household result",
                        {"join"},
                        {{"unit", individual_mat.unit_ids[i]}, {"hh_id", hh_id}}};
        }
        out[i] = it->second;
    }
    return out;
}

void join_household_status(DeprivationMatrix &individual_mat, const PovertyResult &household_result) {
    const auto status = household_status_of(individual_mat, household_result);
    for (std::size_t i = 0; i < status.size(); ++i) {
        individual_mat.attributes[i].household_poor = status[i] != 0;
    }
}

CrossTab crosstab(const PovertyResult &individual_result, const DeprivationMatrix &individual_mat,
                  const PovertyResult &household_result, CrosstabOptions options) {
    check_result(individual_result, individual_mat);
    const auto hh_status = household_status_of(individual_mat, household_result);

    CrossTab t;
    const std::array<std::string_view, 2> status_labels{"poor", "non_poor"};
    std::vector<std::string> sex_labels{""};
    if (options.by_sex) {
        sex_labels = {"", "male", "female"};
    }
    for (const auto status : status_labels) {
        for (const auto &sex : sex_labels) {
            t.column_labels.push_back(sex.empty() ? std::string{status}
                                                  : std::string{status} + ":" + sex);
        }
    }
    std::vector<std::string> head_labels{""};
    if (options.by_head_sex) {
        head_labels = {"male_head", "female_head"};
    }
    for (const auto &head : head_labels) {
        for (const auto status : status_labels) {
            const auto row = std::string{status} + "_household";
            t.row_labels.push_back(head.empty() ? row : head + ":" + row);
        }
    }

    const auto cols = t.column_labels.size();
    t.counts.assign(t.row_labels.size() * cols, 0);
    const auto per_status = sex_labels.size();
    for (std::size_t i = 0; i < individual_mat.units(); ++i) {
        const auto &attrs = individual_mat.attributes[i];
        const std::size_t head_block = options.by_head_sex && attrs.head_sex == Sex::female ? 1 : 0;
        const std::size_t row = head_block * 2 + (hh_status[i] != 0 ? 0 : 1);
        const std::size_t status_block = individual_result.poor(i) ? 0 : 1;
        ++t.counts[row * cols + status_block * per_status];
        if (options.by_sex) {
            const std::size_t sex_col = attrs.sex == Sex::female ? 2 : 1;
            ++t.counts[row * cols + status_block * per_status + sex_col];
        }
        ++t.total;
    }
    t.column_totals.assign(cols, 0);
    for (std::size_t r = 0; r < t.row_labels.size(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            t.column_totals[c] += t.counts[r * cols + c];
        }
    }
    t.shares.resize(t.counts.size());
    for (std::size_t r = 0; r < t.row_labels.size(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (t.column_totals[c] > 0) {
                t.shares[r * cols + c] = ratio(t.counts[r * cols + c], t.column_totals[c]);
            }
        }
    }
    return t;
}

// --- sweep -----------------------------------------------------------------

std::vector<Rational> default_cutoffs() {
    std::vector<Rational> ks;
    for (std::int64_t i = 1; i <= 10; ++i) {
        ks.emplace_back(i, 10);
    }
    return ks;
}

void check_cutoffs(std::span<const Rational> cutoffs) {
    if (cutoffs.empty()) {
        throw Error{ErrorCode::BadCutoffs, "no cutoffs given", {"empty"}};
    }
    for (std::size_t i = 0; i < cutoffs.size(); ++i) {
        check_cutoff(cutoffs[i]);
        if (i > 0 && cutoffs[i] <= cutoffs[i - 1]) {
            throw Error{ErrorCode::BadCutoffs,
                        "cutoffs must be strictly ascending (" + cutoffs[i - 1].str() + " then " +
                            cutoffs[i].str() + ")",
                        {"order"}};
        }
    }
}

SweepCurve sweep(const DeprivationMatrix &mat, const MeasurementScheme &scheme,
                 std::span<const Rational> cutoffs, std::span<const Attribute> group_by) {
    check_cutoffs(cutoffs);
    const auto sv = score(mat, scheme);

    std::vector<Subgroup> groups{{"all", {}}};
    groups[0].units.resize(mat.units());
    std::iota(groups[0].units.begin(), groups[0].units.end(), std::size_t{0});
    if (!group_by.empty()) {
        auto parts = partition_by(mat, group_by);
        groups.insert(groups.end(), std::make_move_iterator(parts.begin()),
                      std::make_move_iterator(parts.end()));
    }

    SweepCurve curve;
    curve.cutoffs.assign(cutoffs.begin(), cutoffs.end());
    for (const auto &g : groups) {
        curve.groups.push_back(g.label);
    }
    for (const auto &k : cutoffs) {
        const auto result = measure(sv, k, scheme.id, mat.unit_level);
        for (const auto &g : groups) {
            std::vector<std::uint8_t> member(result.n, 0);
            for (const auto i : g.units) {
                member[i] = 1;
            }
            auto gm = group_measure(result, [&](std::size_t i) { return member[i] != 0; }, g.label);
            curve.points.push_back({k, std::move(*gm)});
        }
    }
    return curve;
}

// --- identities ------------------------------------------------------------

std::vector<IdentityCheck> verify_identities(const PovertyResult &result, const DeprivationMatrix &mat,
                                             const MeasurementScheme &scheme,
                                             std::span<const Subgroup> partition) {
    std::vector<IdentityCheck> checks;
    const auto add = [&](std::string name, bool holds, std::string detail) {
        checks.push_back({std::move(name), holds, std::move(detail)});
    };

    bool censoring = true;
    for (std::size_t i = 0; i < result.n; ++i) {
        const auto &expect = result.poor(i) ? result.scores[i] : Rational{};
        censoring = censoring && result.censored_scores[i] == expect &&
                    result.censored_scores[i] <= result.scores[i];
    }
    add("censoring", censoring, "censored score = score if poor else 0");

    if (result.A) {
        const auto ha = result.H * *result.A;
        add("M0 = H*A", ha == result.M0, ha.str() + " vs " + result.M0.str());
    } else {
        add("M0 = H*A", result.M0.is_zero() && result.q == 0, "no poor units; M0 = " + result.M0.str());
    }

    // Censored headcounts over the full set.
    Rational weighted;
    const Rational n{static_cast<std::int64_t>(result.n)};
    for (std::size_t j = 0; j < scheme.indicators.size(); ++j) {
        std::int64_t c = 0;
        for (std::size_t i = 0; i < mat.units(); ++i) {
            c += result.poor(i) && mat.deprived(i, j) ? 1 : 0;
        }
        weighted += scheme.indicators[j].weight * Rational{c} / n;
    }
    add("M0 = sum w_j*CH_j", weighted == result.M0, weighted.str() + " vs " + result.M0.str());

    if (result.q > 0) {
        const auto t = decompose_indicators(result, mat, scheme);
        Rational by_indicator;
        Rational by_dimension;
        for (const auto &s : t.indicators) {
            by_indicator += s.contribution;
        }
        for (const auto &d : t.dimensions) {
            by_dimension += d.contribution;
        }
        add("indicator shares sum to 1", by_indicator == Rational{1}, by_indicator.str());
        add("dimension shares sum to 1", by_dimension == Rational{1}, by_dimension.str());
    }

    if (!partition.empty()) {
        const auto d = decompose_subgroups(result, partition);
        std::string labels;
        for (const auto &g : partition) {
            labels += (labels.empty() ? "" : "/") + g.label;
        }
        add("M0 = sum (n_g/n)*M0_g [" + labels + "]", d.reconstructed_M0 == result.M0,
            d.reconstructed_M0.str() + " vs " + result.M0.str());
        if (!result.M0.is_zero()) {
            Rational total;
            for (const auto &row : d.rows) {
                total += row.contribution.value_or(Rational{});
            }
            add("subgroup contributions sum to 1", total == Rational{1}, total.str());
        }
    }
    return checks;
}

} // namespace afmpi
