// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.
//
//   acceptance                 all criteria
//   acceptance --criterion N   only criterion N (exit 1 if it fails)

#include "afmpi/cli.hpp"
#include "afmpi/engine.hpp"
#include "afmpi/paper_check.hpp"
#include "afmpi/report.hpp"
#include "afmpi/synthgen.hpp"

#include "golden_builder.hpp"
#include "oracle_compare.hpp"
#include "test_support.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

using namespace afmpi;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned limits.
constexpr double scheme_limit_ms = 1.0;
constexpr double oracle_limit_s = 60.0;
constexpr double scale_limit_s = 10.0;
constexpr int oracle_seeds = 100;
constexpr std::size_t oracle_households = 1000;
constexpr int dominance_seeds = 100;
constexpr int dominance_required = 99;
constexpr std::size_t dominance_households = 2000;
constexpr std::size_t scale_households = 100'000;
constexpr std::size_t scale_persons = 350'000;
const Rational divergence_ratio{3, 2};

struct Verdict {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 3) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(digits);
    s << v;
    return s.str();
}

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "afmpi");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    if (code != 0) {
        std::cerr << err.str();
    }
    return code;
}

// 1 ---------------------------------------------------------------------------
Verdict scheme_exactness() {
    const auto t0 = Clock::now();
    const std::map<std::string, std::int64_t> household_120{
        {"schooling", 15},   {"child_enrollment", 15}, {"electricity", 5},      {"floor", 5},
        {"sanitation", 5},   {"water", 5},             {"cooking_fuel", 5},     {"durables", 5},
        {"productive_assets", 30}, {"travel_market", 6}, {"travel_health_facility", 6},
        {"travel_natal_home", 6}, {"travel_outside_village", 6}, {"health_decision", 6}};
    const std::map<std::string, std::int64_t> individual_120{
        {"education", 30},   {"electricity", 5},       {"floor", 5},            {"sanitation", 5},
        {"water", 5},        {"cooking_fuel", 5},      {"durables", 5},         {"household_assets", 15},
        {"individual_assets", 15}, {"travel_market", 6}, {"travel_health_facility", 6},
        {"travel_natal_home", 6}, {"travel_outside_village", 6}, {"health_decision", 6}};
    bool ok = true;
    std::string why;
    for (const auto &[name, expected] : {std::pair{khas_household, &household_120}, {khas_individual, &individual_120}}) {
        const auto s = builtin_scheme(name);
        ok = ok && s.indicators.size() == 14 && s.total_weight() == Rational{1} && s.dimensions.size() == 4;
        for (const auto &d : s.dimensions) {
            ok = ok && s.dimension_weight(d.id) == Rational(1, 4);
        }
        for (const auto &ind : s.indicators) {
            const auto it = expected->find(ind.id);
            if (it == expected->end() || ind.weight != Rational(it->second, 120)) {
                ok = false;
                why += " " + ind.id;
            }
        }
        ok = ok && s.poverty_cutoff == Rational(3, 10);
    }
    const double ms = seconds_since(t0) * 1000.0;
    return {ok && ms < scheme_limit_ms, "14 indicators x2, dimensions 1/4, total 1" + (why.empty() ? "" : "; bad:" + why) +
                                            "; " + fmt(ms, 4) + " ms < " + fmt(scheme_limit_ms, 1) + " ms"};
}

// 2 ---------------------------------------------------------------------------
DeprivationMatrix one_adult(const MeasurementScheme &scheme, std::initializer_list<const char *> deprived) {
    DeprivationMatrix m;
    m.unit_level = Unit::individual;
    m.scheme_id = scheme.id;
    m.unit_ids = {"example"};
    m.indicator_ids = scheme.indicator_ids();
    m.cells.assign(m.indicator_ids.size(), 0);
    for (const auto *id : deprived) {
        m.cells[m.indicator_index(id)] = 1;
    }
    UnitAttributes a;
    a.hh_id = "H";
    a.sex = Sex::female;
    a.age = 30;
    m.attributes = {a};
    return m;
}

Verdict worked_example() {
    const auto full = builtin_scheme(khas_individual);
    const auto reduced = exclude_dimension(full, "empowerment");
    const auto a = measure(one_adult(full, {"education", "individual_assets"}), full);
    const auto b = measure(one_adult(full, {"education"}), full);
    const auto c = measure(one_adult(reduced, {"education"}), reduced);
    const bool ok = a.scores[0] == Rational(3, 8) && a.poor(0) && b.scores[0] == Rational(1, 4) && !b.poor(0) &&
                    c.scores[0] == Rational(1, 3) && c.poor(0);
    return {ok, "education+individual_assets = " + a.scores[0].str() + (a.poor(0) ? " poor" : " not poor") +
                    "; education only = " + b.scores[0].str() + (b.poor(0) ? " poor" : " not poor") +
                    "; without empowerment = " + c.scores[0].str() + (c.poor(0) ? " poor" : " not poor") +
                    " (k = 3/10)"};
}

// 3 ---------------------------------------------------------------------------
Verdict oracle_equivalence() {
    const auto t0 = Clock::now();
    std::size_t mismatches = 0;
    std::string first;
    for (int seed = 1; seed <= oracle_seeds; ++seed) {
        const auto pop =
            testkit::synthetic_population(testkit::gapped_config(static_cast<std::uint64_t>(seed), oracle_households));
        for (const auto name : {khas_household, khas_individual}) {
            const auto diffs = testkit::oracle_mismatches(pop, builtin_scheme(name));
            if (!diffs.empty() && first.empty()) {
                first = "seed " + std::to_string(seed) + ": " + diffs.front();
            }
            mismatches += diffs.size();
        }
    }
    const double s = seconds_since(t0);
    return {mismatches == 0 && s < oracle_limit_s,
            std::to_string(oracle_seeds) + " populations x " + std::to_string(oracle_households) +
                " households, both levels: " + std::to_string(mismatches) + " mismatches" +
                (first.empty() ? "" : " (" + first + ")") + "; " + fmt(s, 2) + " s < " + fmt(oracle_limit_s, 0) + " s"};
}

// 4 ---------------------------------------------------------------------------
Verdict exact_identities() {
    std::vector<std::pair<std::string, Population>> inputs;
    inputs.emplace_back("fixture", testkit::fixture_population());
    inputs.emplace_back("demo", testkit::synthetic_population(
                                    GeneratorConfig::from_file(testkit::data_dir() / "demo_config.json")));
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        inputs.emplace_back("seed " + std::to_string(seed),
                            testkit::synthetic_population(testkit::gapped_config(seed, 500)));
    }
    std::size_t runs = 0;
    std::size_t checks = 0;
    std::string failed;
    for (const auto &[label, pop] : inputs) {
        for (const auto name : {khas_household, khas_individual}) {
            for (const auto &scheme : {builtin_scheme(name), exclude_dimension(builtin_scheme(name), "empowerment")}) {
                const auto mat = evaluate(pop, scheme);
                const auto result = measure(mat, scheme);
                const std::array by{scheme.unit == Unit::individual ? Attribute::sex : Attribute::head_sex};
                for (const auto &c : verify_identities(result, mat, scheme, partition_by(mat, by))) {
                    ++checks;
                    if (!c.holds && failed.empty()) {
                        failed = label + " " + scheme.id + " " + c.name;
                    }
                }
                ++runs;
            }
        }
    }
    return {failed.empty(), std::to_string(checks) + " rational equalities over " + std::to_string(runs) +
                                " runs (M0 = H*A, M0 = sum w_j*CH_j, sex partition, shares sum to 1)" +
                                (failed.empty() ? "" : "; failed: " + failed)};
}

// 5 ---------------------------------------------------------------------------
Verdict paper_consistency() {
    bool ok = true;
    std::string failed;
    for (const auto &c : paper_consistency_checks()) {
        if (!c.pass) {
            ok = false;
            failed += "; " + c.label + " |" + c.kind + "| diff " + report::decimal(c.difference) + " > " +
                      report::decimal(c.tolerance);
        }
    }
    return {ok, "11 checks, |H*A - M0| <= 0.005, partition within 0.001" + failed};
}

// 6 ---------------------------------------------------------------------------
Verdict dominance() {
    // (a) monotone curves on every input tried
    std::size_t curves = 0;
    std::string broken;
    const auto monotone = [&](const DeprivationMatrix &mat, const MeasurementScheme &scheme,
                              std::span<const Attribute> by, const std::string &label) {
        const auto curve = sweep(mat, scheme, default_cutoffs(), by);
        const auto g = curve.groups.size();
        for (std::size_t k = 1; k < curve.cutoffs.size(); ++k) {
            for (std::size_t j = 0; j < g; ++j) {
                const auto &prev = curve.points[(k - 1) * g + j].measure;
                const auto &cur = curve.points[k * g + j].measure;
                if ((cur.H > prev.H || cur.M0 > prev.M0) && broken.empty()) {
                    broken = label + " " + cur.label;
                }
            }
        }
        curves += g;
        return curve;
    };
    const std::array sex{Attribute::sex};
    const std::array head{Attribute::head_sex};
    {
        const auto pop = testkit::fixture_population();
        for (const auto name : {khas_household, khas_individual}) {
            const auto scheme = builtin_scheme(name);
            monotone(evaluate(pop, scheme), scheme, scheme.unit == Unit::individual ? std::span<const Attribute>{sex}
                                                                                    : std::span<const Attribute>{head},
                     "fixture");
        }
    }

    // (b) women's H at or above men's at all ten cutoffs
    int dominated = 0;
    const auto ind = builtin_scheme(khas_individual);
    const auto hh = builtin_scheme(khas_household);
    for (int seed = 1; seed <= dominance_seeds; ++seed) {
        const auto pop = testkit::synthetic_population(
            testkit::gapped_config(static_cast<std::uint64_t>(1000 + seed), dominance_households));
        const auto label = "seed " + std::to_string(1000 + seed);
        monotone(evaluate(pop, hh), hh, head, label);
        const auto curve = monotone(evaluate(pop, ind), ind, sex, label);
        bool all = true;
        for (std::size_t k = 0; k < curve.cutoffs.size(); ++k) {
            all = all && curve.points[k * 3 + 2].measure.H >= curve.points[k * 3 + 1].measure.H;
        }
        dominated += all ? 1 : 0;
    }
    const bool ok = broken.empty() && dominated >= dominance_required;
    return {ok, std::to_string(curves) + " sweep curves non-increasing in H and M0" +
                    (broken.empty() ? "" : " (violated: " + broken + ")") + "; women H >= men H at all 10 cutoffs in " +
                    std::to_string(dominated) + "/" + std::to_string(dominance_seeds) + " seeds (need >= " +
                    std::to_string(dominance_required) + ", " + std::to_string(dominance_households) + " households)"};
}

// 7 ---------------------------------------------------------------------------
Verdict divergence() {
    const auto pop =
        testkit::synthetic_population(GeneratorConfig::from_file(testkit::data_dir() / "demo_config.json"));
    const auto hh_scheme = builtin_scheme(khas_household);
    const auto ind_scheme = builtin_scheme(khas_individual);
    const auto hh = measure(evaluate(pop, hh_scheme), hh_scheme);
    const auto ind_mat = evaluate(pop, ind_scheme);
    const auto ind = measure(ind_mat, ind_scheme);
    const auto ct = crosstab(ind, ind_mat, hh);
    // row 1 = non-poor household, column 0 = poor individual
    const auto cell = ct.count(1, 0);
    const bool ok = ind.H >= divergence_ratio * hh.H && cell > 0 && ct.row_labels[1] == "non_poor_household" &&
                    ct.column_labels[0] == "poor";
    return {ok, "demo config: individual H " + report::percent(ind.H) + "% vs household H " + report::percent(hh.H) +
                    "% (ratio " + fmt((ind.H / hh.H).to_double(), 2) + ", need >= 1.5); " + std::to_string(cell) +
                    " poor individuals in non-poor households"};
}

// 8 ---------------------------------------------------------------------------
Verdict goldens() {
    const auto fixture_dir = testkit::data_dir() / "fixture";
    const fs::path golden_dir = AFMPI_GOLDEN_DIR;
    const auto expected = testkit::oracle_goldens(fixture_dir);

    testkit::ScratchDir scratch{"acceptance"};
    const std::vector<std::string> inputs{"--households", (fixture_dir / "households.csv").string(), "--persons",
                                          (fixture_dir / "persons.csv").string()};
    const std::vector<std::pair<std::string, std::vector<std::string>>> runs{
        {"compute_household", {"compute"}},
        {"compute_individual", {"compute", "--level", "individual"}},
        {"decompose_sex", {"decompose", "--level", "individual", "--group-by", "sex"}},
        {"crosstab_sex", {"crosstab", "--by", "sex"}},
    };
    std::size_t compared = 0;
    std::string differs;
    for (auto [name, args] : runs) {
        const auto out = scratch.path() / name;
        args.insert(args.end(), inputs.begin(), inputs.end());
        args.insert(args.end(), {"--out", out.string()});
        if (run_cli(args) != 0) {
            differs += " " + name + "(exit)";
        }
    }
    for (const auto &[rel, content] : expected) {
        ++compared;
        const auto committed = golden_dir / rel;
        const auto produced = scratch.path() / rel;
        if (!fs::exists(committed) || read_file(committed) != content) {
            differs += " " + rel + "(golden!=oracle)";
        }
        if (!fs::exists(produced) || read_file(produced) != content) {
            differs += " " + rel + "(cli!=oracle)";
        }
    }
    return {differs.empty() && compared > 0,
            std::to_string(compared) + " files: compute/decompose/crosstab output byte-identical to oracle goldens" +
                (differs.empty() ? "" : "; differing:" + differs)};
}

// 9 ---------------------------------------------------------------------------
Verdict scale() {
    auto cfg = testkit::gapped_config(2024, scale_households);
    cfg.household_size_distribution = {0.12, 0.19, 0.22, 0.21, 0.13, 0.07, 0.03, 0.02, 0.01, 0.0};
    const auto data = generate(cfg);
    const auto persons = static_cast<std::size_t>(std::count(data.persons_csv.begin(), data.persons_csv.end(), '\n')) - 1;

    testkit::ScratchDir scratch{"scale"};
    report::write_text(scratch.path() / "households.csv", data.households_csv);
    report::write_text(scratch.path() / "persons.csv", data.persons_csv);
    const std::vector<std::string> inputs{"--households", (scratch.path() / "households.csv").string(), "--persons",
                                          (scratch.path() / "persons.csv").string()};

    const auto t0 = Clock::now();
    auto args = std::vector<std::string>{"compute", "--level", "individual", "--out", (scratch.path() / "out").string()};
    args.insert(args.end(), inputs.begin(), inputs.end());
    const int code = run_cli(args);
    const double s = seconds_since(t0);
    const bool ok = code == 0 && persons >= scale_persons && s < scale_limit_s;
    return {ok, std::to_string(scale_households) + " households / " + std::to_string(persons) +
                    " persons, individual-level compute (ingest, score, identities, write): " + fmt(s, 2) + " s < " +
                    fmt(scale_limit_s, 0) + " s" + (code == 0 ? "" : "; exit " + std::to_string(code))};
}

const std::vector<std::pair<std::string, std::function<Verdict()>>> &criteria() {
    static const std::vector<std::pair<std::string, std::function<Verdict()>>> list{
        {"scheme exactness", scheme_exactness},
        {"worked example", worked_example},
        {"oracle equivalence", oracle_equivalence},
        {"exact identities", exact_identities},
        {"published-triple consistency", paper_consistency},
        {"dominance", dominance},
        {"household/individual divergence", divergence},
        {"mini-fixture goldens", goldens},
        {"scale", scale},
    };
    return list;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"acceptance criteria"};
    int only = 0;
    app.add_option("--criterion", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    int failures = 0;
    for (std::size_t i = 0; i < criteria().size(); ++i) {
        const int number = static_cast<int>(i) + 1;
        if (only != 0 && only != number) {
            continue;
        }
        Verdict v;
        try {
            v = criteria()[i].second();
        } catch (const std::exception &e) {
            v = {false, std::string{"exception: "} + e.what()};
        }
        failures += v.pass ? 0 : 1;
        std::cout << "criterion " << number << " " << (v.pass ? "PASS" : "FAIL") << "  " << criteria()[i].first
                  << ": " << v.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
