#include "afmpi/cli.hpp"
#include "afmpi/digest.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

using namespace afmpi;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "afmpi");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    Outcome o;
    o.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

std::vector<std::string> fixture_inputs() {
    const auto dir = testkit::data_dir() / "fixture";
    return {"--households", (dir / "households.csv").string(), "--persons", (dir / "persons.csv").string()};
}

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string> &tail) {
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
}

std::string error_code(const Outcome &o) {
    const auto doc = json::parse(o.err.substr(o.err.rfind('{', o.err.find("\"code\""))));
    return doc["code"].get<std::string>();
}

void expect_matches_golden(const fs::path &out, const std::string &golden_case) {
    const fs::path golden = fs::path{AFMPI_GOLDEN_DIR} / golden_case;
    ASSERT_TRUE(fs::is_directory(golden)) << golden;
    std::set<std::string> expected{"manifest.json"};
    for (const auto &entry : fs::directory_iterator(golden)) {
        const auto name = entry.path().filename().string();
        expected.insert(name);
        ASSERT_TRUE(fs::exists(out / name)) << name;
        EXPECT_EQ(read_file(out / name), read_file(entry.path())) << golden_case << "/" << name;
    }
    std::set<std::string> produced;
    for (const auto &entry : fs::directory_iterator(out)) {
        produced.insert(entry.path().filename().string());
    }
    EXPECT_EQ(produced, expected);
}

} // namespace

TEST(Golden, ComputeHousehold) {
    testkit::ScratchDir dir{"cli"};
    const auto o = run(with({"compute"}, with(fixture_inputs(), {"--out", dir.path().string()})));
    ASSERT_EQ(o.code, 0) << o.err;
    expect_matches_golden(dir.path(), "compute_household");
}

TEST(Golden, ComputeIndividual) {
    testkit::ScratchDir dir{"cli"};
    const auto o = run(with({"compute", "--level", "individual"}, with(fixture_inputs(), {"--out", dir.path().string()})));
    ASSERT_EQ(o.code, 0) << o.err;
    expect_matches_golden(dir.path(), "compute_individual");
}

TEST(Golden, DecomposeBySex) {
    testkit::ScratchDir dir{"cli"};
    const auto o = run(with({"decompose", "--level", "individual", "--group-by", "sex"},
                            with(fixture_inputs(), {"--out", dir.path().string()})));
    ASSERT_EQ(o.code, 0) << o.err;
    expect_matches_golden(dir.path(), "decompose_sex");
}

TEST(Golden, CrosstabBySex) {
    testkit::ScratchDir dir{"cli"};
    const auto o = run(with({"crosstab", "--by", "sex"}, with(fixture_inputs(), {"--out", dir.path().string()})));
    ASSERT_EQ(o.code, 0) << o.err;
    expect_matches_golden(dir.path(), "crosstab_sex");
}

TEST(Manifest, RecordsInputsAndIsStable) {
    testkit::ScratchDir a{"cli"};
    testkit::ScratchDir b{"cli"};
    ASSERT_EQ(run(with({"compute"}, with(fixture_inputs(), {"--out", a.path().string()}))).code, 0);
    ASSERT_EQ(run(with({"compute"}, with(fixture_inputs(), {"--out", b.path().string()}))).code, 0);
    const auto ma = json::parse(read_file(a.path() / "manifest.json"));
    const auto mb = json::parse(read_file(b.path() / "manifest.json"));
    EXPECT_EQ(ma["run_id"], mb["run_id"]);
    EXPECT_EQ(ma["inputs"][0]["hash"],
              to_hex(file_digest(testkit::data_dir() / "fixture" / "households.csv")));
    EXPECT_EQ(ma["scheme"]["id"], "khas_household");
    EXPECT_EQ(ma["tool_version"], "0.1.0");
    EXPECT_FALSE(ma["timestamp"].get<std::string>().empty());
    EXPECT_EQ(ma["outputs"].size(), 2u);

    testkit::ScratchDir c{"cli"};
    ASSERT_EQ(run(with({"compute", "--k", "0.4"}, with(fixture_inputs(), {"--out", c.path().string()}))).code, 0);
    EXPECT_NE(json::parse(read_file(c.path() / "manifest.json"))["run_id"], ma["run_id"]);
}

TEST(Output, EnvironmentDefaultDirectory) {
    testkit::ScratchDir dir{"cli"};
    ::setenv("AFMPI_OUT_DIR", dir.path().string().c_str(), 1);
    const auto o = run(with({"compute", "--format", "csv"}, fixture_inputs()));
    ::unsetenv("AFMPI_OUT_DIR");
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_TRUE(fs::exists(dir.path() / "summary.csv"));
    EXPECT_FALSE(fs::exists(dir.path() / "summary.json"));
}

TEST(Output, MaritalFootnote) {
    testkit::ScratchDir dir{"cli"};
    const auto o = run(with({"decompose", "--level", "individual", "--group-by", "marital_status"},
                            with(fixture_inputs(), {"--out", dir.path().string()})));
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_NE(o.out.find("1 deserted"), std::string::npos) << o.out;
    const auto doc = json::parse(read_file(dir.path() / "decomposition.json"));
    ASSERT_EQ(doc["notes"].size(), 1u);
    EXPECT_FALSE(fs::exists(dir.path() / "subgroups.csv"));
}

TEST(Output, EmptyPoorGroupIsAStatusRow) {
    testkit::ScratchDir dir{"cli"};
    const auto o = run(with({"decompose", "--level", "individual", "--group-by", "sex", "--k", "3/5"},
                            with(fixture_inputs(), {"--out", dir.path().string(), "--format", "csv"})));
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_NE(read_file(dir.path() / "decomposition_groups.csv").find("male,7,0,0.000000,0,1,EmptyPoorSet"),
              std::string::npos);
}

TEST(ExitCodes, InputErrorsAreTwo) {
    testkit::ScratchDir dir{"cli"};
    const auto out = std::vector<std::string>{"--out", dir.path().string()};
    auto o = run({"compute", "--households", "nope.csv", "--persons", "nope.csv"});
    EXPECT_EQ(o.code, 2);
    EXPECT_EQ(error_code(o), "NotFound");

    o = run(with({"compute", "--k", "0"}, with(fixture_inputs(), out)));
    EXPECT_EQ(o.code, 2);
    EXPECT_EQ(error_code(o), "SchemeInvalid");

    o = run(with({"compute", "--k", "three"}, with(fixture_inputs(), out)));
    EXPECT_EQ(error_code(o), "BadCutoffs");

    o = run(with({"sweep", "--cutoffs", "0.5,0.2"}, with(fixture_inputs(), out)));
    EXPECT_EQ(o.code, 2);
    EXPECT_EQ(error_code(o), "BadCutoffs");

    o = run(with({"decompose", "--group-by", "sex"}, with(fixture_inputs(), out)));
    EXPECT_EQ(o.code, 2);
    EXPECT_EQ(error_code(o), "Usage");

    o = run(with({"compute", "--scheme", "khas_household", "--level", "individual"}, with(fixture_inputs(), out)));
    EXPECT_EQ(error_code(o), "SchemeMismatch");

    o = run(with({"compute", "--exclude-dimension", "health"}, with(fixture_inputs(), out)));
    EXPECT_EQ(error_code(o), "NotFound");

    o = run({"frobnicate"});
    EXPECT_EQ(o.code, 2);
    EXPECT_EQ(error_code(o), "Usage");

    o = run(with({"compute", "--policy", "pairwise"}, with(fixture_inputs(), out)));
    EXPECT_EQ(error_code(o), "Usage");
}

TEST(ExitCodes, ContractFailuresAreOne) {
    testkit::ScratchDir dir{"cli"};
    const auto o = run(with({"decompose", "--level", "individual", "--where", "marital_status=other"},
                            with(fixture_inputs(), {"--out", dir.path().string()})));
    EXPECT_EQ(o.code, 1);
    EXPECT_EQ(error_code(o), "EmptyPoorSet");
}

TEST(ExitCodes, ErrorJsonShape) {
    const auto doc = json::parse(cli::error_json(Error{ErrorCode::IngestError, "bad", {"cell"}, {{"row", "3"}}}));
    EXPECT_EQ(doc["code"], "IngestError");
    EXPECT_EQ(doc["message"], "bad");
    EXPECT_EQ(doc["context"]["row"], "3");
    EXPECT_EQ(doc["context"]["reasons"][0], "cell");
    EXPECT_EQ(cli::exit_code(ErrorCode::PartitionError), 1);
    EXPECT_EQ(cli::exit_code(ErrorCode::ConfigError), 2);
}

TEST(Commands, CheckPaperReportsFailures) {
    const auto o = run({"check-paper"});
    EXPECT_EQ(o.code, 1);
    EXPECT_NE(o.out.find("FAIL  individual: women"), std::string::npos);
    EXPECT_NE(o.out.find("74.1%"), std::string::npos);
}

TEST(Commands, GenerateThenValidate) {
    testkit::ScratchDir dir{"cli"};
    const auto cfg = dir.path() / "cfg.json";
    std::ofstream{cfg} << R"({"seed": 4, "n_households": 50, "incomplete_households": 5})";
    auto o = run({"generate", "--config", cfg.string(), "--out", dir.path().string()});
    ASSERT_EQ(o.code, 0) << o.err;
    o = run({"validate", "--households", (dir.path() / "households.csv").string(), "--persons",
             (dir.path() / "persons.csv").string()});
    ASSERT_EQ(o.code, 0) << o.err;
    const auto prov = json::parse(o.out);
    EXPECT_EQ(prov["retained_households"], 45);

    std::ofstream{cfg} << R"({"seed": 4, "households": 50})";
    o = run({"generate", "--config", cfg.string(), "--out", dir.path().string()});
    EXPECT_EQ(o.code, 2);
    EXPECT_EQ(error_code(o), "ConfigError");
}

TEST(Commands, SchemeAndFixture) {
    auto o = run({"scheme", "khas_individual"});
    ASSERT_EQ(o.code, 0);
    EXPECT_EQ(o.out, read_file(testkit::data_dir() / "schemes" / "khas_individual.json"));
    o = run({"scheme", "--list"});
    EXPECT_EQ(o.out, "khas_household\nkhas_individual\n");

    testkit::ScratchDir dir{"cli"};
    o = run({"fixture", "--out", dir.path().string()});
    ASSERT_EQ(o.code, 0);
    EXPECT_EQ(read_file(dir.path() / "persons.csv"), read_file(testkit::data_dir() / "fixture" / "persons.csv"));
}

TEST(Commands, SweepAndExportMatrix) {
    testkit::ScratchDir dir{"cli"};
    auto o = run(with({"sweep", "--level", "individual", "--cutoffs", "1/10,3/10,1/2", "--format", "csv"},
                      with(fixture_inputs(), {"--out", dir.path().string()})));
    ASSERT_EQ(o.code, 0) << o.err;
    const auto sweep_csv = read_file(dir.path() / "sweep.csv");
    EXPECT_EQ(std::count(sweep_csv.begin(), sweep_csv.end(), '\n'), 10); // header + 3 cutoffs x 3 groups

    o = run(with({"export-matrix", "--level", "individual", "--join-household"},
                 with(fixture_inputs(), {"--out", dir.path().string()})));
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_NE(read_file(dir.path() / "matrix.csv").find("P05,H2,male,female,40,currently_married,1,"),
              std::string::npos);
}
