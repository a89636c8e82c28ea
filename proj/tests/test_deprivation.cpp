#include "afmpi/deprivation.hpp"
#include "afmpi/error.hpp"
#include "afmpi/scheme.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace afmpi;

namespace {

// Rows worked out by hand from the fixture records and the indicator rules.
const std::vector<std::pair<std::string, std::string>> household_rows{
    {"H1", "00000010000000"}, {"H2", "00111111010100"}, {"H3", "01001110000111"},
    {"H4", "10111011000000"}, {"H5", "00000000000000"}, {"H6", "10000000000000"},
};

const std::vector<std::pair<std::string, std::string>> individual_rows{
    {"P01", "00000100000000"}, {"P02", "10000100100000"}, {"P04", "01111110000000"},
    {"P05", "11111110110100"}, {"P07", "10011100000111"}, {"P08", "00011100100000"},
    {"P10", "11110110000000"}, {"P11", "11110110100000"}, {"P12", "00000000000000"},
    {"P13", "10000000100000"}, {"P14", "10000000000000"},
};

std::string row_string(const DeprivationMatrix &m, std::size_t i) {
    std::string s;
    for (const auto c : m.row(i)) {
        s += c != 0 ? '1' : '0';
    }
    return s;
}

std::string replaced(std::string text, std::string_view from, std::string_view to) {
    const auto at = text.find(from);
    EXPECT_NE(at, std::string::npos) << from;
    return text.replace(at, from.size(), to);
}

DeprivationMatrix household_matrix_for(const std::string &households) {
    const auto pop = ingest(households, mini_fixture().persons_csv, MissingDataPolicy::standard());
    return evaluate(pop, builtin_scheme(khas_household));
}

} // namespace

TEST(HouseholdMatrix, FixtureCells) {
    const auto m = evaluate(testkit::fixture_population(), builtin_scheme(khas_household));
    EXPECT_EQ(m.unit_level, Unit::household);
    EXPECT_EQ(m.indicator_ids, builtin_scheme(khas_household).indicator_ids());
    ASSERT_EQ(m.units(), household_rows.size());
    for (std::size_t i = 0; i < m.units(); ++i) {
        EXPECT_EQ(m.unit_ids[i], household_rows[i].first);
        EXPECT_EQ(row_string(m, i), household_rows[i].second) << m.unit_ids[i];
    }
    EXPECT_EQ(m.attributes[2].head_sex, Sex::female);
    EXPECT_EQ(m.warnings.households_without_female_respondent, 2u);
    EXPECT_EQ(m.warnings.households_with_multiple_female_respondents, 0u);
}

TEST(IndividualMatrix, FixtureCells) {
    const auto m = evaluate(testkit::fixture_population(), builtin_scheme(khas_individual));
    EXPECT_EQ(m.unit_level, Unit::individual);
    ASSERT_EQ(m.units(), individual_rows.size());
    for (std::size_t i = 0; i < m.units(); ++i) {
        EXPECT_EQ(m.unit_ids[i], individual_rows[i].first);
        EXPECT_EQ(row_string(m, i), individual_rows[i].second) << m.unit_ids[i];
    }
    // children are not units
    EXPECT_THROW((void)m.indicator_index("nope"), Error);
    for (std::size_t i = 0; i < m.units(); ++i) {
        EXPECT_GE(*m.attributes[i].age, 18);
    }
}

TEST(IndividualMatrix, LivingStandardsCopiedFromHousehold) {
    const auto pop = testkit::fixture_population();
    const auto hh = evaluate(pop, builtin_scheme(khas_household));
    const auto ind = evaluate(pop, builtin_scheme(khas_individual));
    for (const auto *id : {"electricity", "floor", "sanitation", "water", "cooking_fuel", "durables"}) {
        const auto hj = hh.indicator_index(id);
        const auto ij = ind.indicator_index(id);
        for (std::size_t i = 0; i < ind.units(); ++i) {
            const auto h = pop.household_index(ind.attributes[i].hh_id);
            EXPECT_EQ(ind.deprived(i, ij), hh.deprived(h, hj)) << ind.unit_ids[i] << " " << id;
        }
    }
}

TEST(IndividualMatrix, MenNeverDeprivedInEmpowerment) {
    const auto m = evaluate(testkit::fixture_population(), builtin_scheme(khas_individual));
    for (std::size_t i = 0; i < m.units(); ++i) {
        if (m.attributes[i].sex != Sex::male) {
            continue;
        }
        for (const auto *id : {"travel_market", "travel_health_facility", "travel_natal_home",
                               "travel_outside_village", "health_decision"}) {
            EXPECT_FALSE(m.deprived(i, m.indicator_index(id))) << m.unit_ids[i];
        }
    }
}

TEST(Rules, FiveYearsOfSchoolingIsEnough) {
    // H6's only adult has 0 years; give him exactly 5.
    auto persons = replaced(mini_fixture().persons_csv, "P14,H6,male,70,widowed,0,", "P14,H6,male,70,widowed,5,");
    const auto pop = ingest(mini_fixture().households_csv, persons, MissingDataPolicy::standard());
    EXPECT_FALSE(evaluate(pop, builtin_scheme(khas_household)).deprived(5, 0));
    EXPECT_FALSE(evaluate(pop, builtin_scheme(khas_individual)).deprived(10, 0));

    persons = replaced(mini_fixture().persons_csv, "P14,H6,male,70,widowed,0,", "P14,H6,male,70,widowed,4,");
    const auto pop4 = ingest(mini_fixture().households_csv, persons, MissingDataPolicy::standard());
    EXPECT_TRUE(evaluate(pop4, builtin_scheme(khas_household)).deprived(5, 0));
}

TEST(Rules, DurablesAndFourWheeler) {
    const auto only_cycle =
        replaced(mini_fixture().households_csv, "H6,male,1,finished,private,closed_well,electricity,0,0,1,0,0,0,1",
                 "H6,male,1,finished,private,closed_well,electricity,0,0,0,1,0,0,0");
    auto m = household_matrix_for(only_cycle);
    EXPECT_TRUE(m.deprived(5, m.indicator_index("durables")));

    const auto car_only =
        replaced(mini_fixture().households_csv, "H6,male,1,finished,private,closed_well,electricity,0,0,1,0,0,0,1",
                 "H6,male,1,finished,private,closed_well,electricity,0,0,0,0,0,0,1");
    m = household_matrix_for(car_only);
    EXPECT_FALSE(m.deprived(5, m.indicator_index("durables")));
}

TEST(Rules, ProductiveAssetsNeedBothMissing) {
    const auto none = replaced(mini_fixture().households_csv, "H4,male,0,earth_mud,none,open_well,wood,0,0,0,0,0,0,0,1,0",
                               "H4,male,0,earth_mud,none,open_well,wood,0,0,0,0,0,0,0,0,0");
    const auto m = household_matrix_for(none);
    EXPECT_TRUE(m.deprived(3, m.indicator_index("productive_assets")));
}

TEST(Rules, WaterAndCookingSets) {
    const auto m = evaluate(testkit::fixture_population(), builtin_scheme(khas_household));
    const auto water = m.indicator_index("water");
    const auto fuel = m.indicator_index("cooking_fuel");
    EXPECT_FALSE(m.deprived(3, water)); // open_well is improved
    EXPECT_TRUE(m.deprived(2, water));  // tanker
    EXPECT_FALSE(m.deprived(5, fuel));  // electricity
    EXPECT_FALSE(m.deprived(4, fuel));  // lpg
}

TEST(Rules, FemalesTakeRespondentValues) {
    // Add a second adult woman to H2; she inherits P05's empowerment row.
    const auto persons = mini_fixture().persons_csv + "P15,H2,female,19,never_married,9,0,0,,0,0,,,,,\n";
    const auto pop = ingest(mini_fixture().households_csv, persons, MissingDataPolicy::standard());
    const auto m = evaluate(pop, builtin_scheme(khas_individual));
    const auto p05 = std::ranges::find(m.unit_ids, "P05") - m.unit_ids.begin();
    const auto p15 = std::ranges::find(m.unit_ids, "P15") - m.unit_ids.begin();
    for (std::size_t j = m.indicator_index("travel_market"); j < m.indicators(); ++j) {
        EXPECT_EQ(m.deprived(p05, j), m.deprived(p15, j)) << m.indicator_ids[j];
    }
    EXPECT_FALSE(m.deprived(p15, m.indicator_index("education")));
}

TEST(Rules, UnitMismatchIsSchemeMismatch) {
    const auto pop = testkit::fixture_population();
    try {
        (void)evaluate_household(pop, builtin_scheme(khas_individual));
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::SchemeMismatch);
    }
}

TEST(Rates, ShareOfUnitsDeprived) {
    const auto m = evaluate(testkit::fixture_population(), builtin_scheme(khas_household));
    const auto all = deprivation_rates(m, [](std::size_t) { return true; });
    ASSERT_TRUE(all.has_value());
    EXPECT_EQ(all->units, 6u);
    EXPECT_EQ(all->rows[m.indicator_index("cooking_fuel")].deprived, 4u);
    EXPECT_EQ(all->rows[m.indicator_index("cooking_fuel")].rate, Rational(2, 3));
    EXPECT_FALSE(deprivation_rates(m, [](std::size_t) { return false; }).has_value());
}

TEST(MatrixCsv, RoundTrip) {
    const auto m = evaluate(testkit::fixture_population(), builtin_scheme(khas_individual));
    const auto text = write_matrix_csv(m);
    auto expected = m;
    expected.warnings = {}; // evaluation warnings are not part of the matrix file
    EXPECT_EQ(read_matrix_csv(text, Unit::individual, m.scheme_id), expected);
    auto broken = text;
    broken.replace(broken.find(",0,0,0,0,0,0,0,0,0\n"), 2, ",7");
    EXPECT_THROW(read_matrix_csv(broken, Unit::individual, m.scheme_id), Error);
}
