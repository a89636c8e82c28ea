#include "afmpi/csv.hpp"
#include "afmpi/error.hpp"
#include "afmpi/report.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

using namespace afmpi;
using json = nlohmann::json;

namespace {

struct FixtureRun {
    Population pop = testkit::fixture_population();
    MeasurementScheme scheme = builtin_scheme(khas_individual);
    DeprivationMatrix mat = evaluate(pop, scheme);
    PovertyResult result = measure(mat, scheme);
};

/// Every CSV cell must be recoverable from the JSON rendering and vice versa.
void expect_equivalent(const report::Table &table) {
    const auto csv_text = report::to_csv(table, "r1");
    const std::array tables{table};
    const auto doc = json::parse(report::to_json(tables, "r1"));
    const auto parsed = csv::parse(csv_text);
    const auto &rows = doc["tables"][table.name];
    ASSERT_EQ(parsed.rows.size(), rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto &csv_row = parsed.rows[r];
        EXPECT_EQ(csv_row[0], "r1");
        std::size_t c = 1;
        for (const auto &col : table.columns) {
            const auto &cell = rows[r][col.name];
            if (col.rational) {
                if (cell.is_null()) {
                    EXPECT_EQ(csv_row[c], "");
                    EXPECT_EQ(csv_row[c + 1], "");
                } else {
                    EXPECT_EQ(csv_row[c], cell["decimal"].get<std::string>()) << col.name;
                    EXPECT_EQ(csv_row[c + 1], std::to_string(cell["num"].get<std::int64_t>()));
                    EXPECT_EQ(csv_row[c + 2], std::to_string(cell["den"].get<std::int64_t>()));
                }
                c += 3;
                continue;
            }
            if (cell.is_null()) {
                EXPECT_EQ(csv_row[c], "") << col.name;
            } else if (cell.is_string()) {
                EXPECT_EQ(csv_row[c], cell.get<std::string>()) << col.name;
            } else {
                EXPECT_EQ(csv_row[c], std::to_string(cell.get<std::int64_t>())) << col.name;
            }
            ++c;
        }
        EXPECT_EQ(c, csv_row.size());
    }
}

} // namespace

TEST(Render, DecimalAndPercent) {
    EXPECT_EQ(report::decimal(Rational(37, 132)), "0.280303");
    EXPECT_EQ(report::percent(Rational(6, 11)), "54.5");
    EXPECT_EQ(report::percent(Rational(1, 2000)), "0.1");
    EXPECT_EQ(report::percent(Rational(1)), "100.0");
}

TEST(Render, CsvHeaderExpandsExactColumns) {
    report::Table t{"t", {"label", report::exact("x"), "n"}, {}};
    t.add({std::string{"a,b"}, Rational(1, 3), std::int64_t{4}});
    t.add({std::string{"c"}, std::monostate{}, std::int64_t{0}});
    EXPECT_EQ(report::to_csv(t, "id"), "run_id,label,x,x_num,x_den,n\n"
                                       "id,\"a,b\",0.333333,1,3,4\n"
                                       "id,c,,,,0\n");
}

TEST(Equivalence, AllBuilders) {
    const FixtureRun run;
    const std::array by{Attribute::sex};
    const auto groups = partition_by(run.mat, by);
    std::vector<GroupMeasure> measures{*group_measure(run.result, [](std::size_t) { return true; }, "all")};
    expect_equivalent(report::summary_table(run.result, measures));
    expect_equivalent(report::units_table(run.result, run.mat));
    expect_equivalent(report::subgroup_table(decompose_subgroups(run.result, groups)));

    std::vector<report::DecompositionGroup> dg{
        {"all", run.result.n, run.result.q, run.result.M0, decompose_indicators(run.result, run.mat, run.scheme)},
        {"empty", 1, 0, Rational(0), std::nullopt},
    };
    for (const auto &t : report::decomposition_tables(dg)) {
        expect_equivalent(t);
    }

    const auto hh_scheme = builtin_scheme(khas_household);
    const auto hh = measure(evaluate(run.pop, hh_scheme), hh_scheme);
    expect_equivalent(report::crosstab_table(crosstab(run.result, run.mat, hh, {.by_sex = true})));
    expect_equivalent(report::sweep_table(sweep(run.mat, run.scheme, default_cutoffs(), by)));

    std::vector<std::pair<std::string, std::optional<RateTable>>> rates{
        {"all", deprivation_rates(run.mat, [](std::size_t) { return true; })},
        {"nobody", std::nullopt},
    };
    expect_equivalent(report::rates_table(rates));
}

TEST(Files, NamesFollowStemAndFormat) {
    testkit::ScratchDir dir{"report"};
    const report::Table a{"a", {"x"}, {}};
    const report::Table b{"b", {"y"}, {}};
    const std::array one{a};
    const std::array two{a, b};
    EXPECT_EQ(report::write_tables(dir.path(), "s", one, report::Format::both, "id"),
              (std::vector<std::string>{"s.csv", "s.json"}));
    EXPECT_EQ(report::write_tables(dir.path(), "d", two, report::Format::csv, "id"),
              (std::vector<std::string>{"d_a.csv", "d_b.csv"}));
    EXPECT_EQ(report::write_tables(dir.path(), "j", two, report::Format::json, "id"),
              (std::vector<std::string>{"j.json"}));
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "d_b.csv"));
    EXPECT_THROW(report::parse_format("xml"), Error);
    EXPECT_THROW(report::write_text(dir.path() / "missing" / "x.csv", "x"), Error);
}

TEST(Manifest, RunIdIgnoresTimestampAndPaths) {
    report::RunManifest m;
    m.command = "compute";
    m.scheme_hash = "abc";
    m.inputs = {{"households", "/a/households.csv", "111"}};
    m.flags = {{"policy", "listwise"}};
    m.k = Rational(3, 10);
    m.tool_version = "0.1.0";
    m.timestamp = "2026-01-01T00:00:00Z";
    const auto id = m.run_id();

    auto moved = m;
    moved.inputs[0].path = "/elsewhere/hh.csv";
    moved.timestamp = "2030-01-01T00:00:00Z";
    moved.outputs = {"summary.csv"};
    EXPECT_EQ(moved.run_id(), id);

    auto changed = m;
    changed.flags["policy"] = "per-analysis";
    EXPECT_NE(changed.run_id(), id);
    changed = m;
    changed.inputs[0].hash = "112";
    EXPECT_NE(changed.run_id(), id);
    changed = m;
    changed.k = Rational(1, 3);
    EXPECT_NE(changed.run_id(), id);

    const auto doc = json::parse(m.to_json());
    EXPECT_EQ(doc["run_id"], id);
    EXPECT_EQ(doc["k"]["num"], 3);
    EXPECT_EQ(doc["inputs"][0]["hash"], "111");
}
