#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace afmpi {

/// std::mt19937_64 (a published algorithm with reference outputs) plus
/// conversions defined here bit for bit, so the same seed gives the same
/// data on every platform. std::uniform_*_distribution are avoided because
/// their algorithms are implementation-defined.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_{seed} {}

    std::uint64_t next() { return engine_(); }
    /// [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    bool bernoulli(double p) { return uniform() < p; }
    /// Uniform integer in [lo, hi].
    int range(int lo, int hi) {
        const int r = lo + static_cast<int>(uniform() * static_cast<double>(hi - lo + 1));
        return r > hi ? hi : r;
    }
    /// Index drawn with probability proportional to weights[i].
    std::size_t categorical(std::span<const double> weights);

  private:
    std::mt19937_64 engine_;
};

/// Deprivation probabilities. Household entries are drawn once per
/// household; education, individual_assets and child_enrollment per person;
/// health_decision per female respondent.
struct BaseRates {
    double electricity = 0.1;
    double floor = 0.2;
    double sanitation = 0.6;
    double water = 0.1;
    double cooking_fuel = 0.75;
    double durables = 0.3;
    double household_assets = 0.15;
    double child_enrollment = 0.02;
    /// Men's rate; women add gender_gaps.education_gap.
    double education = 0.25;
    /// Men's rate among members of households that own some asset; women
    /// add gender_gaps.individual_asset_gap.
    double individual_assets = 0.5;
    double health_decision = 0.02;
};

struct GenderGaps {
    double education_gap = 0.0;
    double individual_asset_gap = 0.0;
    /// Probability that the female respondent may not travel alone, per
    /// travel question.
    double mobility_restriction_rate = 0.0;
};

struct GeneratorConfig {
    std::uint64_t seed = 1;
    std::size_t n_households = 1000;
    /// Weights over household sizes 1..10 (normalized).
    std::array<double, 10> household_size_distribution{0.05, 0.10, 0.15, 0.20, 0.20,
                                                       0.12, 0.08, 0.05, 0.03, 0.02};
    double female_head_share = 0.2;
    BaseRates base_rates;
    GenderGaps gender_gaps;
    /// Probability that a household has one blank cell.
    double missingness_rate = 0.0;
    /// When set, exactly this many households get a blank cell instead.
    std::optional<std::size_t> incomplete_households;
    /// Probability that a draw reuses the household's latent uniform
    /// instead of a fresh one; 0 = independent, 1 = fully shared.
    double intra_household_correlation = 0.0;

    /// Throws ConfigError on malformed documents or unknown keys.
    static GeneratorConfig from_json(std::string_view document);
    static GeneratorConfig from_file(const std::filesystem::path &path);
    std::string to_json() const;
};

/// Throws ConfigError for infeasible settings; returns a warning for each
/// derived probability that had to be clipped into [0, 1].
std::vector<std::string> validate(const GeneratorConfig &cfg);

struct GeneratedData {
    std::string households_csv;
    std::string persons_csv;
    std::vector<std::string> warnings;
};

/// Byte-identical output for identical configs.
GeneratedData generate(const GeneratorConfig &cfg);

/// The 6-household, 14-person hand-audited fixture.
GeneratedData mini_fixture();

} // namespace afmpi
