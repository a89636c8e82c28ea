#pragma once

// Brute-force reference path. It re-derives every deprivation, score and
// aggregate straight from the raw records with plain rational sums and
// shares no evaluation code with the main pipeline; only the result type
// is common so the two can be compared field by field.

#include "afmpi/engine.hpp"
#include "afmpi/microdata.hpp"
#include "afmpi/rational.hpp"
#include "afmpi/scheme.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace afmpi {

inline constexpr std::size_t oracle_unit_cap = 10'000;

struct OracleUnit {
    std::string unit_id;
    std::string hh_id;
    Sex head_sex{Sex::male};
    std::optional<Sex> sex;
    std::optional<MaritalStatus> marital_status;
    /// One entry per scheme indicator, scheme order.
    std::vector<std::uint8_t> deprived;
};

struct OracleDecomposition {
    std::string label;
    std::size_t n = 0;
    std::size_t q = 0;
    Rational M0;
    /// Per indicator, scheme order.
    std::vector<Rational> censored_headcount;
    std::vector<Rational> contribution;
    /// Per dimension, scheme order.
    std::vector<Rational> dimension_contribution;
};

struct OracleReport {
    std::vector<OracleUnit> units;
    PovertyResult result;
};

/// Throws TooLarge above oracle_unit_cap units.
OracleReport oracle_report(const Population &pop, const MeasurementScheme &scheme,
                           std::optional<Rational> k = std::nullopt);

PovertyResult oracle_measure(const Population &pop, const MeasurementScheme &scheme,
                             std::optional<Rational> k = std::nullopt);

/// Censored headcounts and shares over the units selected by `keep`.
/// nullopt when the selection is empty or holds no poor unit.
std::optional<OracleDecomposition> oracle_decompose(const OracleReport &report,
                                                    const MeasurementScheme &scheme,
                                                    const std::function<bool(const OracleUnit &)> &keep,
                                                    std::string label);

} // namespace afmpi
