#include "afmpi/cli.hpp"
#include "afmpi/deprivation.hpp"
#include "afmpi/digest.hpp"
#include "afmpi/engine.hpp"
#include "afmpi/microdata.hpp"
#include "afmpi/paper_check.hpp"
#include "afmpi/report.hpp"
#include "afmpi/scheme.hpp"
#include "afmpi/synthgen.hpp"
#include "afmpi/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace afmpi::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

int exit_code(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::EmptyPoorSet:
    case ErrorCode::PartitionError:
    case ErrorCode::ContractViolation:
        return 1;
    default:
        return 2;
    }
}

std::string error_json(const Error &error) {
    json doc;
    doc["code"] = to_string(error.code());
    doc["message"] = error.what();
    json ctx = json::object();
    for (const auto &[k, v] : error.context()) {
        ctx[k] = v;
    }
    if (!error.reasons().empty()) {
        ctx["reasons"] = error.reasons();
    }
    doc["context"] = std::move(ctx);
    return doc.dump();
}

namespace {

constexpr std::string_view default_out_dir = "afmpi-out";

struct Options {
    std::string households;
    std::string persons;
    std::string scheme;
    std::string household_scheme;
    std::string individual_scheme;
    std::string level;
    std::string k;
    std::string exclude_dimension;
    std::string exclude_indicator;
    std::string policy = "listwise";
    std::string out;
    std::string format = "both";
    bool units = false;
    bool rates = false;
    std::string group_by;
    std::vector<std::string> where;
    std::string by;
    std::string cutoffs;
    std::string config;
    bool list = false;
    bool join_household = false;
};

[[noreturn]] void usage(const std::string &message, std::map<std::string, std::string> context = {}) {
    throw Error{ErrorCode::Usage, message, {"usage"}, std::move(context)};
}

Rational parse_cutoff(const std::string &text) {
    try {
        return Rational::parse(text);
    } catch (const std::exception &) {
        throw Error{ErrorCode::BadCutoffs, "cannot read cutoff '" + text + "'", {"format"},
                    {{"k", text}}};
    }
}

std::optional<Unit> requested_level(const Options &o) {
    if (o.level.empty()) {
        return std::nullopt;
    }
    const auto unit = parse_unit(o.level);
    if (!unit) {
        usage("unknown level '" + o.level + "' (household, individual)", {{"level", o.level}});
    }
    return unit;
}

MeasurementScheme apply_flags(MeasurementScheme scheme, const Options &o, bool lenient_indicator = false) {
    if (!o.exclude_dimension.empty()) {
        scheme = exclude_dimension(scheme, o.exclude_dimension);
    }
    if (!o.exclude_indicator.empty()) {
        const auto ids = scheme.indicator_ids();
        const bool present = std::ranges::find(ids, o.exclude_indicator) != ids.end();
        if (present || !lenient_indicator) {
            scheme = exclude_indicator(scheme, o.exclude_indicator);
        }
    }
    if (!o.k.empty()) {
        scheme = with_cutoff(scheme, parse_cutoff(o.k));
    }
    return scheme;
}

MeasurementScheme scheme_for(const Options &o) {
    const auto level = requested_level(o);
    MeasurementScheme scheme;
    if (!o.scheme.empty()) {
        scheme = resolve_scheme(o.scheme);
        if (level && *level != scheme.unit) {
            throw Error{ErrorCode::SchemeMismatch,
                        "scheme '" + scheme.id + "' is " + std::string{to_string(scheme.unit)} +
                            "-level but --level " + o.level + " was given",
                        {"unit"},
                        {{"scheme", scheme.id}, {"level", o.level}}};
        }
    } else {
        scheme = builtin_scheme(level == Unit::individual ? khas_individual : khas_household);
    }
    return apply_flags(std::move(scheme), o);
}

MeasurementScheme level_scheme(const std::string &name, Unit unit, const Options &o) {
    auto scheme = resolve_scheme(name.empty() ? (unit == Unit::household ? khas_household : khas_individual)
                                              : std::string_view{name});
    if (scheme.unit != unit) {
        throw Error{ErrorCode::SchemeMismatch,
                    "scheme '" + scheme.id + "' must be " + std::string{to_string(unit)} + "-level",
                    {"unit"},
                    {{"scheme", scheme.id}}};
    }
    return apply_flags(std::move(scheme), o, true);
}

MissingDataPolicy policy_for(const Options &o, std::span<const MeasurementScheme> active) {
    MissingDataPolicy policy;
    if (o.policy == "listwise") {
        std::vector<MeasurementScheme> schemes{builtin_scheme(khas_household), builtin_scheme(khas_individual)};
        schemes.insert(schemes.end(), active.begin(), active.end());
        policy = MissingDataPolicy::listwise(schemes);
    } else if (o.policy == "per-analysis") {
        policy.mode = DeletionMode::per_analysis;
        for (const auto &s : active) {
            const auto fields = required_fields(s);
            policy.required.insert(fields.begin(), fields.end());
        }
    } else {
        usage("unknown policy '" + o.policy + "' (listwise, per-analysis)", {{"policy", o.policy}});
    }
    return policy;
}

void require_inputs(const Options &o) {
    for (const auto &[flag, path] : {std::pair{"--households", &o.households}, {"--persons", &o.persons}}) {
        if (path->empty()) {
            usage(std::string{flag} + " is required");
        }
        if (!fs::exists(*path)) {
            throw Error{ErrorCode::NotFound, "input file '" + *path + "' does not exist", {"input"},
                        {{"path", *path}}};
        }
    }
}

Population load(const Options &o, const MissingDataPolicy &policy) {
    require_inputs(o);
    return ingest_files(o.households, o.persons, policy);
}

fs::path out_dir(const Options &o) {
    fs::path dir = o.out;
    if (dir.empty()) {
        const char *env = std::getenv("AFMPI_OUT_DIR");
        dir = env != nullptr && *env != '\0' ? fs::path{env} : fs::path{default_out_dir};
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error{ErrorCode::Io, "cannot create output directory '" + dir.string() + "'", {"write"},
                    {{"path", dir.string()}}};
    }
    return dir;
}

report::RunManifest manifest_for(std::string command, const Options &o, const MeasurementScheme *scheme) {
    report::RunManifest m;
    m.command = std::move(command);
    if (scheme != nullptr) {
        m.scheme_id = scheme->id;
        m.scheme_hash = to_hex(scheme_hash(*scheme));
        m.scheme_json = serialize_scheme(*scheme);
        m.k = scheme->poverty_cutoff;
    }
    if (!o.households.empty()) {
        m.inputs.push_back({"households", o.households, to_hex(file_digest(o.households))});
    }
    if (!o.persons.empty()) {
        m.inputs.push_back({"persons", o.persons, to_hex(file_digest(o.persons))});
    }
    m.flags["policy"] = o.policy;
    m.flags["format"] = o.format;
    const auto set = [&](const char *name, const std::string &value) {
        if (!value.empty()) {
            m.flags[name] = value;
        }
    };
    set("exclude_dimension", o.exclude_dimension);
    set("exclude_indicator", o.exclude_indicator);
    m.timestamp = report::utc_timestamp();
    m.tool_version = std::string{tool_version};
    return m;
}

void finish(const fs::path &dir, report::RunManifest &m, std::vector<std::string> outputs, std::ostream &out) {
    m.outputs = std::move(outputs);
    report::write_text(dir / "manifest.json", m.to_json());
    out << "run " << m.run_id() << ": wrote";
    for (const auto &f : m.outputs) {
        out << ' ' << (dir / f).string();
    }
    out << ' ' << (dir / "manifest.json").string() << '\n';
}

std::string pct(const Rational &r) { return report::percent(r) + "%"; }

std::string pct(const std::optional<Rational> &r) { return r ? pct(*r) : "undefined"; }

void print_measure(std::ostream &out, const GroupMeasure &g) {
    out << "  " << std::left << std::setw(22) << g.label << std::right << " n=" << std::setw(6) << g.n
        << " q=" << std::setw(6) << g.q << "  H=" << std::setw(6) << pct(g.H) << "  A=" << std::setw(9)
        << pct(g.A) << "  M0=" << report::decimal(g.M0) << " (" << g.M0.str() << ")\n";
}

void check_identities(const PovertyResult &result, const DeprivationMatrix &mat, const MeasurementScheme &scheme,
                      std::span<const Subgroup> partition) {
    for (const auto &c : verify_identities(result, mat, scheme, partition)) {
        if (!c.holds) {
            throw Error{ErrorCode::ContractViolation, "identity '" + c.name + "' failed: " + c.detail,
                        {"identity"}, {{"identity", c.name}}};
        }
    }
}

std::vector<GroupMeasure> measures_by(const PovertyResult &result, std::span<const Subgroup> groups) {
    std::vector<GroupMeasure> out;
    out.push_back(*group_measure(result, [](std::size_t) { return true; }, "all"));
    for (const auto &g : groups) {
        std::vector<std::uint8_t> member(result.n, 0);
        for (const auto i : g.units) {
            member[i] = 1;
        }
        out.push_back(*group_measure(result, [&](std::size_t i) { return member[i] != 0; }, g.label));
    }
    return out;
}

void print_warnings(std::ostream &err, const DeprivationMatrix &mat) {
    if (mat.warnings.households_without_female_respondent > 0) {
        err << "warning: " << mat.warnings.households_without_female_respondent
            << " household(s) without a female respondent; empowerment set to non-deprived\n";
    }
    if (mat.warnings.households_with_multiple_female_respondents > 0) {
        err << "warning: " << mat.warnings.households_with_multiple_female_respondents
            << " household(s) with several female respondents; the primary's answers were used\n";
    }
}

void print_provenance(std::ostream &out, const Provenance &p) {
    out << "ingest: " << p.retained_households << " of " << p.household_rows << " households and "
        << p.retained_persons << " of " << p.person_rows << " persons kept (policy " << p.policy << ")\n";
    for (const auto &[reason, count] : p.dropped_by_reason()) {
        out << "  dropped " << count << " household(s): " << reason << '\n';
    }
}

// --- commands -----------------------------------------------------------------

int cmd_compute(const Options &o, std::ostream &out, std::ostream &err) {
    const auto scheme = scheme_for(o);
    const std::array schemes{scheme};
    const auto pop = load(o, policy_for(o, schemes));
    const auto mat = evaluate(pop, scheme);
    const auto result = measure(mat, scheme);

    std::vector<Subgroup> by_sex;
    if (scheme.unit == Unit::individual) {
        const std::array attrs{Attribute::sex};
        by_sex = partition_by(mat, attrs);
    } else {
        const std::array attrs{Attribute::head_sex};
        by_sex = partition_by(mat, attrs);
    }
    check_identities(result, mat, scheme, by_sex);
    const auto groups = measures_by(result, by_sex);

    const auto dir = out_dir(o);
    const auto format = report::parse_format(o.format);
    auto m = manifest_for("compute", o, &scheme);
    m.flags["units"] = o.units ? "1" : "0";
    m.flags["rates"] = o.rates ? "1" : "0";
    const auto run_id = m.run_id();

    std::vector<report::Table> tables{report::summary_table(result, groups)};
    auto files = report::write_tables(dir, "summary", tables, format, run_id);
    if (o.units) {
        const std::array t{report::units_table(result, mat)};
        const auto more = report::write_tables(dir, "units", t, format, run_id);
        files.insert(files.end(), more.begin(), more.end());
    }
    if (o.rates) {
        std::vector<std::pair<std::string, std::optional<RateTable>>> rates;
        const auto add = [&](std::string label, const UnitPredicate &pred) {
            rates.emplace_back(std::move(label), deprivation_rates(mat, pred));
        };
        add("all", [](std::size_t) { return true; });
        add("poor", [&](std::size_t i) { return result.poor(i); });
        for (const auto &g : by_sex) {
            std::vector<std::uint8_t> member(result.n, 0);
            for (const auto i : g.units) {
                member[i] = 1;
            }
            add(g.label, [&](std::size_t i) { return member[i] != 0; });
            add("poor|" + g.label, [&](std::size_t i) { return member[i] != 0 && result.poor(i); });
        }
        const std::array t{report::rates_table(rates)};
        const auto more = report::write_tables(dir, "rates", t, format, run_id);
        files.insert(files.end(), more.begin(), more.end());
    }

    print_provenance(out, pop.provenance());
    print_warnings(err, mat);
    out << "scheme " << scheme.id << " (" << to_string(scheme.unit) << "), k = " << scheme.poverty_cutoff.str()
        << '\n';
    for (const auto &g : groups) {
        print_measure(out, g);
    }
    finish(dir, m, std::move(files), out);
    return 0;
}

bool excluded_marital(const std::string &label) {
    std::string_view rest = label;
    while (!rest.empty()) {
        const auto bar = rest.find('|');
        const auto part = rest.substr(0, bar);
        if (part == "deserted" || part == "other") {
            return true;
        }
        rest = bar == std::string_view::npos ? std::string_view{} : rest.substr(bar + 1);
    }
    return false;
}

int cmd_decompose(const Options &o, std::ostream &out, std::ostream &err) {
    const auto attributes = parse_attributes(o.group_by);
    std::vector<std::pair<Attribute, std::string>> filters;
    for (const auto &w : o.where) {
        const auto eq = w.find('=');
        const auto key = parse_attribute(std::string_view{w}.substr(0, eq));
        if (eq == std::string::npos || !key) {
            usage("bad --where '" + w + "' (expected key=value, key one of sex, marital_status, head_sex, "
                                        "household_poor)",
                  {{"where", w}});
        }
        filters.emplace_back(*key, w.substr(eq + 1));
    }
    const auto needs = [&](Attribute a) {
        return std::ranges::find(attributes, a) != attributes.end() ||
               std::ranges::any_of(filters, [&](const auto &f) { return f.first == a; });
    };

    const auto scheme = scheme_for(o);
    std::vector<MeasurementScheme> active{scheme};
    std::optional<MeasurementScheme> hh_scheme;
    if (needs(Attribute::household_poor)) {
        if (scheme.unit != Unit::individual) {
            usage("group key 'household_poor' applies at individual level only", {{"key", "household_poor"}});
        }
        hh_scheme = level_scheme(o.household_scheme, Unit::household, o);
        active.push_back(*hh_scheme);
    }
    const auto pop = load(o, policy_for(o, active));
    auto mat = evaluate(pop, scheme);
    const auto result = measure(mat, scheme);
    if (hh_scheme) {
        const auto hh_mat = evaluate(pop, *hh_scheme);
        join_household_status(mat, measure(hh_mat, *hh_scheme));
    }

    std::vector<std::uint8_t> keep(mat.units(), 1);
    for (const auto &[attr, value] : filters) {
        const std::array one{attr};
        (void)partition_by(mat, one); // validates the key at this level
        for (std::size_t i = 0; i < mat.units(); ++i) {
            if (attribute_label(mat.attributes[i], attr) != value) {
                keep[i] = 0;
            }
        }
    }

    std::vector<Subgroup> groups = partition_by(mat, attributes);
    std::vector<std::string> notes;
    const bool by_marital = needs(Attribute::marital_status);
    std::size_t dropped_marital = 0;
    std::map<std::string, std::size_t> dropped_by_status;
    std::vector<report::DecompositionGroup> rows;
    for (const auto &g : groups) {
        std::vector<std::uint8_t> member(mat.units(), 0);
        std::size_t n = 0;
        for (const auto i : g.units) {
            if (keep[i] != 0) {
                member[i] = 1;
                ++n;
            }
        }
        if (n == 0) {
            continue;
        }
        if (by_marital && excluded_marital(g.label)) {
            for (std::size_t i = 0; i < member.size(); ++i) {
                if (member[i] != 0) {
                    ++dropped_by_status[std::string{to_string(*mat.attributes[i].marital_status)}];
                }
            }
            dropped_marital += n;
            continue;
        }
        report::DecompositionGroup row;
        row.label = g.label;
        const UnitPredicate pred = [&](std::size_t i) { return member[i] != 0; };
        const auto gm = group_measure(result, pred, g.label);
        row.n = gm->n;
        row.q = gm->q;
        row.M0 = gm->M0;
        try {
            row.table = decompose_indicators(result, mat, scheme, pred, g.label);
        } catch (const Error &e) {
            if (e.code() != ErrorCode::EmptyPoorSet) {
                throw;
            }
            err << "warning: " << e.what() << '\n';
        }
        rows.push_back(std::move(row));
    }
    if (by_marital && dropped_marital > 0) {
        std::string detail;
        for (const auto &[status, count] : dropped_by_status) {
            detail += (detail.empty() ? "" : ", ") + std::to_string(count) + " " + status;
        }
        notes.push_back("marital_status: " + std::to_string(dropped_marital) +
                        " unit(s) not in never_married/currently_married/widowed are not reported (" +
                        detail + ")");
    }
    if (rows.empty()) {
        throw Error{ErrorCode::EmptyPoorSet, "no units match the requested groups", {"empty"}};
    }

    const auto dir = out_dir(o);
    const auto format = report::parse_format(o.format);
    auto m = manifest_for("decompose", o, &scheme);
    m.flags["group_by"] = o.group_by;
    std::string where;
    for (const auto &w : o.where) {
        where += (where.empty() ? "" : ";") + w;
    }
    if (!where.empty()) {
        m.flags["where"] = where;
    }
    if (hh_scheme) {
        m.flags["household_scheme"] = hh_scheme->id + "@" + to_hex(scheme_hash(*hh_scheme));
    }
    const auto run_id = m.run_id();
    const auto tables = report::decomposition_tables(rows);
    auto files = report::write_tables(dir, "decomposition", tables, format, run_id, notes);

    // Population-share decomposition is only meaningful over a full partition.
    if (!attributes.empty() && filters.empty() && !by_marital) {
        const auto d = decompose_subgroups(result, groups);
        if (d.reconstructed_M0 != result.M0) {
            throw Error{ErrorCode::ContractViolation, "subgroup reconstruction differs from M0", {"identity"}};
        }
        const std::array t{report::subgroup_table(d)};
        const auto more = report::write_tables(dir, "subgroups", t, format, run_id);
        files.insert(files.end(), more.begin(), more.end());
    }

    print_warnings(err, mat);
    out << "scheme " << scheme.id << " (" << to_string(scheme.unit) << "), k = " << scheme.poverty_cutoff.str()
        << '\n';
    for (const auto &row : rows) {
        out << "  " << row.label << ": n=" << row.n << " q=" << row.q << " M0=" << report::decimal(row.M0);
        if (!row.table) {
            out << "  EmptyPoorSet\n";
            continue;
        }
        out << '\n';
        for (const auto &d : row.table->dimensions) {
            out << "    " << std::left << std::setw(20) << d.dimension_id << std::right << std::setw(7)
                << pct(d.contribution) << '\n';
        }
    }
    for (const auto &n : notes) {
        out << "note: " << n << '\n';
    }
    finish(dir, m, std::move(files), out);
    return 0;
}

int cmd_crosstab(const Options &o, std::ostream &out, std::ostream &err) {
    CrosstabOptions options;
    for (const auto a : parse_attributes(o.by)) {
        if (a == Attribute::sex) {
            options.by_sex = true;
        } else if (a == Attribute::head_sex) {
            options.by_head_sex = true;
        } else {
            usage("--by accepts sex and head_sex", {{"by", o.by}});
        }
    }
    const auto hh_scheme = level_scheme(o.household_scheme, Unit::household, o);
    const auto ind_scheme = level_scheme(o.individual_scheme, Unit::individual, o);
    const std::array active{hh_scheme, ind_scheme};
    const auto pop = load(o, policy_for(o, active));
    const auto hh_mat = evaluate(pop, hh_scheme);
    const auto hh_result = measure(hh_mat, hh_scheme);
    const auto ind_mat = evaluate(pop, ind_scheme);
    const auto ind_result = measure(ind_mat, ind_scheme);
    const auto table = crosstab(ind_result, ind_mat, hh_result, options);

    const auto dir = out_dir(o);
    const auto format = report::parse_format(o.format);
    auto m = manifest_for("crosstab", o, &ind_scheme);
    m.flags["household_scheme"] = hh_scheme.id + "@" + to_hex(scheme_hash(hh_scheme));
    if (!o.by.empty()) {
        m.flags["by"] = o.by;
    }
    const auto run_id = m.run_id();
    const std::array t{report::crosstab_table(table)};
    auto files = report::write_tables(dir, "crosstab", t, format, run_id);

    print_warnings(err, ind_mat);
    out << "individuals " << table.total << " (H " << pct(ind_result.H) << "), households " << hh_result.n
        << " (H " << pct(hh_result.H) << ")\n";
    out << "  " << std::left << std::setw(34) << "" << std::right;
    for (const auto &c : table.column_labels) {
        out << std::setw(16) << c;
    }
    out << '\n';
    for (std::size_t r = 0; r < table.row_labels.size(); ++r) {
        out << "  " << std::left << std::setw(34) << table.row_labels[r] << std::right;
        for (std::size_t c = 0; c < table.column_labels.size(); ++c) {
            const auto &s = table.share(r, c);
            out << std::setw(16) << (std::to_string(table.count(r, c)) + " (" + (s ? pct(*s) : "-") + ")");
        }
        out << '\n';
    }
    finish(dir, m, std::move(files), out);
    return 0;
}

int cmd_sweep(const Options &o, std::ostream &out, std::ostream &err) {
    const auto scheme = scheme_for(o);
    std::vector<Rational> cutoffs;
    if (o.cutoffs.empty()) {
        cutoffs = default_cutoffs();
    } else {
        std::string_view rest = o.cutoffs;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            cutoffs.push_back(parse_cutoff(std::string{rest.substr(0, comma)}));
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
    }
    check_cutoffs(cutoffs);
    std::string group_by = o.group_by;
    if (group_by.empty()) {
        group_by = scheme.unit == Unit::individual ? "sex" : "head_sex";
    } else if (group_by == "none") {
        group_by.clear();
    }
    const auto attributes = parse_attributes(group_by);
    std::vector<MeasurementScheme> active{scheme};
    std::optional<MeasurementScheme> hh_scheme;
    if (std::ranges::find(attributes, Attribute::household_poor) != attributes.end()) {
        hh_scheme = level_scheme(o.household_scheme, Unit::household, o);
        active.push_back(*hh_scheme);
    }
    const auto pop = load(o, policy_for(o, active));
    auto mat = evaluate(pop, scheme);
    if (hh_scheme && scheme.unit == Unit::individual) {
        join_household_status(mat, measure(evaluate(pop, *hh_scheme), *hh_scheme));
    }
    const auto curve = sweep(mat, scheme, cutoffs, attributes);

    const auto dir = out_dir(o);
    const auto format = report::parse_format(o.format);
    auto m = manifest_for("sweep", o, &scheme);
    m.flags["group_by"] = group_by;
    std::string ks;
    for (const auto &k : cutoffs) {
        ks += (ks.empty() ? "" : ",") + k.str();
    }
    m.flags["cutoffs"] = ks;
    const auto run_id = m.run_id();
    const std::array t{report::sweep_table(curve)};
    auto files = report::write_tables(dir, "sweep", t, format, run_id);

    print_warnings(err, mat);
    out << "scheme " << scheme.id << " (" << to_string(scheme.unit) << "), headcount by cutoff\n";
    out << "  " << std::setw(8) << "k";
    for (const auto &g : curve.groups) {
        out << std::setw(16) << g;
    }
    out << '\n';
    for (std::size_t c = 0; c < curve.cutoffs.size(); ++c) {
        out << "  " << std::setw(8) << curve.cutoffs[c].str();
        for (std::size_t g = 0; g < curve.groups.size(); ++g) {
            out << std::setw(16) << pct(curve.points[c * curve.groups.size() + g].measure.H);
        }
        out << '\n';
    }
    finish(dir, m, std::move(files), out);
    return 0;
}

int cmd_check_paper(const Options &o, std::ostream &out) {
    const auto checks = paper_consistency_checks();
    bool all = true;
    report::Table t{"paper_check",
                    {"label", "kind", report::exact("computed"), report::exact("printed"),
                     report::exact("difference"), report::exact("tolerance"), "result"},
                    {}};
    for (const auto &c : checks) {
        all = all && c.pass;
        out << (c.pass ? "PASS" : "FAIL") << "  " << std::left << std::setw(46) << c.label << std::right
            << std::setw(10) << c.kind << "  computed " << report::decimal(c.computed) << "  printed "
            << report::decimal(c.printed) << "  |diff| " << report::decimal(c.difference) << " <= "
            << report::decimal(c.tolerance) << '\n';
        t.add({c.label, c.kind, c.computed, c.printed, c.difference, c.tolerance,
               std::string{c.pass ? "pass" : "fail"}});
    }
    const auto women = women_contribution_share();
    const auto note = "women's population-share contribution to individual M0: " + pct(women) +
                      " (the text states 91%; not a pass/fail check)";
    out << "info  " << note << '\n';
    out << (all ? "all checks passed" : "some checks failed") << '\n';
    if (!o.out.empty()) {
        const auto dir = out_dir(o);
        const std::array tables{t};
        const std::array notes{note};
        report::write_tables(dir, "paper_check", tables, report::parse_format(o.format), "check-paper", notes);
    }
    return all ? 0 : 1;
}

int cmd_generate(const Options &o, std::ostream &out, std::ostream &err) {
    if (o.config.empty()) {
        usage("--config is required");
    }
    if (!fs::exists(o.config)) {
        throw Error{ErrorCode::NotFound, "config file '" + o.config + "' does not exist", {"input"},
                    {{"path", o.config}}};
    }
    const auto cfg = GeneratorConfig::from_file(o.config);
    const auto data = generate(cfg);
    for (const auto &w : data.warnings) {
        err << "warning: " << w << '\n';
    }
    const auto dir = out_dir(o);
    report::write_text(dir / "households.csv", data.households_csv);
    report::write_text(dir / "persons.csv", data.persons_csv);

    report::RunManifest m;
    m.command = "generate";
    m.inputs.push_back({"config", o.config, to_hex(fnv1a64(cfg.to_json()))});
    m.flags["seed"] = std::to_string(cfg.seed);
    m.timestamp = report::utc_timestamp();
    m.tool_version = std::string{tool_version};
    out << "generated " << cfg.n_households << " households\n";
    finish(dir, m, {"households.csv", "persons.csv"}, out);
    return 0;
}

int cmd_validate(const Options &o, std::ostream &out) {
    std::vector<MeasurementScheme> active;
    if (!o.scheme.empty() || !o.level.empty()) {
        active.push_back(scheme_for(o));
    } else if (o.policy == "per-analysis") {
        usage("--policy per-analysis needs --scheme or --level");
    }
    const auto pop = load(o, policy_for(o, active));
    out << pop.provenance().to_json();
    return 0;
}

int cmd_fixture(const Options &o, std::ostream &out) {
    const auto data = mini_fixture();
    const auto dir = out_dir(o);
    report::write_text(dir / "households.csv", data.households_csv);
    report::write_text(dir / "persons.csv", data.persons_csv);
    out << "wrote " << (dir / "households.csv").string() << ' ' << (dir / "persons.csv").string() << '\n';
    return 0;
}

int cmd_scheme(const Options &o, std::ostream &out) {
    if (o.list) {
        out << khas_household << '\n' << khas_individual << '\n';
        return 0;
    }
    out << serialize_scheme(scheme_for(o));
    return 0;
}

int cmd_export_matrix(const Options &o, std::ostream &out, std::ostream &err) {
    const auto scheme = scheme_for(o);
    std::vector<MeasurementScheme> active{scheme};
    std::optional<MeasurementScheme> hh_scheme;
    if (o.join_household && scheme.unit == Unit::individual) {
        hh_scheme = level_scheme(o.household_scheme, Unit::household, o);
        active.push_back(*hh_scheme);
    }
    const auto pop = load(o, policy_for(o, active));
    auto mat = evaluate(pop, scheme);
    if (hh_scheme) {
        join_household_status(mat, measure(evaluate(pop, *hh_scheme), *hh_scheme));
    }
    const auto dir = out_dir(o);
    auto m = manifest_for("export-matrix", o, &scheme);
    report::write_text(dir / "matrix.csv", write_matrix_csv(mat));
    print_warnings(err, mat);
    finish(dir, m, {"matrix.csv"}, out);
    return 0;
}

// --- option wiring --------------------------------------------------------------

void add_inputs(CLI::App *app, Options &o) {
    app->add_option("--households", o.households, "households.csv");
    app->add_option("--persons", o.persons, "persons.csv");
    app->add_option("--policy", o.policy, "missing data: listwise (default) or per-analysis");
}

void add_scheme(CLI::App *app, Options &o) {
    app->add_option("--scheme", o.scheme, "builtin scheme name or JSON file");
    app->add_option("--level", o.level, "household or individual");
    app->add_option("-k,--k", o.k, "poverty cutoff, e.g. 3/10 or 0.3");
    app->add_option("--exclude-dimension", o.exclude_dimension, "drop a dimension, re-split weights equally");
    app->add_option("--exclude-indicator", o.exclude_indicator, "drop an indicator within its dimension");
}

void add_output(CLI::App *app, Options &o) {
    app->add_option("--out", o.out, "output directory (default $AFMPI_OUT_DIR or ./afmpi-out)");
    app->add_option("--format", o.format, "csv, json or both");
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Alkire-Foster multidimensional poverty at household and individual level", "afmpi"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string{tool_version});
    Options o;

    auto *compute = app.add_subcommand("compute", "H, A and M0 for one scheme");
    add_inputs(compute, o);
    add_scheme(compute, o);
    add_output(compute, o);
    compute->add_flag("--units", o.units, "also write per-unit scores");
    compute->add_flag("--rates", o.rates, "also write indicator deprivation rates");

    auto *decompose = app.add_subcommand("decompose", "indicator and dimension contributions by subgroup");
    add_inputs(decompose, o);
    add_scheme(decompose, o);
    add_output(decompose, o);
    decompose->add_option("--group-by", o.group_by, "comma list of sex, marital_status, head_sex, household_poor");
    decompose->add_option("--where", o.where, "keep units with key=value (repeatable)");
    decompose->add_option("--household-scheme", o.household_scheme, "scheme for household_poor");

    auto *xtab = app.add_subcommand("crosstab", "poor/non-poor individuals across poor/non-poor households");
    add_inputs(xtab, o);
    add_output(xtab, o);
    xtab->add_option("-k,--k", o.k, "poverty cutoff for both levels");
    xtab->add_option("--exclude-dimension", o.exclude_dimension, "applied at both levels");
    xtab->add_option("--exclude-indicator", o.exclude_indicator, "applied where the indicator exists");
    xtab->add_option("--household-scheme", o.household_scheme, "household scheme (default builtin)");
    xtab->add_option("--individual-scheme", o.individual_scheme, "individual scheme (default builtin)");
    xtab->add_option("--by", o.by, "sex and/or head_sex, comma separated");

    auto *sw = app.add_subcommand("sweep", "H, A, M0 over a range of poverty cutoffs");
    add_inputs(sw, o);
    add_scheme(sw, o);
    add_output(sw, o);
    sw->add_option("--cutoffs", o.cutoffs, "comma list, ascending (default 1/10..10/10)");
    sw->add_option("--group-by", o.group_by, "grouping (default sex, or head_sex for households; 'none')");
    sw->add_option("--household-scheme", o.household_scheme, "scheme for household_poor");

    auto *check = app.add_subcommand("check-paper", "consistency of the published KHAS triples");
    check->add_option("--out", o.out, "also write paper_check tables here");
    check->add_option("--format", o.format, "csv, json or both");

    auto *gen = app.add_subcommand("generate", "synthetic households.csv and persons.csv");
    gen->add_option("--config", o.config, "generator config (JSON)");
    gen->add_option("--out", o.out, "output directory");

    auto *val = app.add_subcommand("validate", "ingest and report dropped households");
    add_inputs(val, o);
    val->add_option("--scheme", o.scheme, "scheme whose fields per-analysis deletion requires");
    val->add_option("--level", o.level, "household or individual");

    auto *fix = app.add_subcommand("fixture", "write the 6-household mini fixture");
    fix->add_option("--out", o.out, "output directory");

    auto *sch = app.add_subcommand("scheme", "print a scheme as canonical JSON");
    sch->add_option("name", o.scheme, "builtin name or JSON file");
    sch->add_option("--level", o.level, "household or individual");
    sch->add_option("-k,--k", o.k, "poverty cutoff");
    sch->add_option("--exclude-dimension", o.exclude_dimension, "drop a dimension");
    sch->add_option("--exclude-indicator", o.exclude_indicator, "drop an indicator");
    sch->add_flag("--list", o.list, "list builtin schemes");

    auto *exp = app.add_subcommand("export-matrix", "write the deprivation matrix as CSV");
    add_inputs(exp, o);
    add_scheme(exp, o);
    exp->add_option("--out", o.out, "output directory");
    exp->add_flag("--join-household", o.join_household, "fill household_poor (individual level)");
    exp->add_option("--household-scheme", o.household_scheme, "scheme for household_poor");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion &) {
        out << tool_version << '\n';
        return 0;
    } catch (const CLI::ParseError &e) {
        err << error_json(Error{ErrorCode::Usage, e.what(), {"usage"}}) << '\n';
        return 2;
    }

    try {
        if (compute->parsed()) {
            return cmd_compute(o, out, err);
        }
        if (decompose->parsed()) {
            return cmd_decompose(o, out, err);
        }
        if (xtab->parsed()) {
            return cmd_crosstab(o, out, err);
        }
        if (sw->parsed()) {
            return cmd_sweep(o, out, err);
        }
        if (check->parsed()) {
            return cmd_check_paper(o, out);
        }
        if (gen->parsed()) {
            return cmd_generate(o, out, err);
        }
        if (val->parsed()) {
            return cmd_validate(o, out);
        }
        if (fix->parsed()) {
            return cmd_fixture(o, out);
        }
        if (sch->parsed()) {
            return cmd_scheme(o, out);
        }
        if (exp->parsed()) {
            return cmd_export_matrix(o, out, err);
        }
    } catch (const Error &e) {
        err << error_json(e) << '\n';
        return exit_code(e.code());
    } catch (const std::overflow_error &e) {
        err << error_json(Error{ErrorCode::ContractViolation, e.what(), {"overflow"}}) << '\n';
        return 1;
    } catch (const std::exception &e) {
        err << error_json(Error{ErrorCode::Io, e.what(), {"unexpected"}}) << '\n';
        return 2;
    }
    return 2;
}

} // namespace afmpi::cli
