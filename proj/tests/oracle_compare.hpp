#pragma once
// Field-by-field comparison of the main pipeline against the oracle. Shared
// by the oracle test and the acceptance binary.

#include "afmpi/engine.hpp"
#include "afmpi/error.hpp"
#include "afmpi/oracle.hpp"

#include <string>
#include <vector>

namespace afmpi::testkit {

inline std::vector<std::string> oracle_mismatches(const Population &pop, const MeasurementScheme &scheme) {
    std::vector<std::string> out;
    const auto mat = evaluate(pop, scheme);
    const auto result = measure(mat, scheme);
    const auto rep = oracle_report(pop, scheme);
    const auto &o = rep.result;

    if (result.unit_ids != o.unit_ids) {
        out.push_back(scheme.id + ": unit ids");
        return out;
    }
    for (std::size_t i = 0; i < result.n; ++i) {
        if (result.scores[i] != o.scores[i]) {
            out.push_back(scheme.id + ": score of " + result.unit_ids[i]);
        }
        if (result.poor_flags[i] != o.poor_flags[i]) {
            out.push_back(scheme.id + ": poor flag of " + result.unit_ids[i]);
        }
        if (result.censored_scores[i] != o.censored_scores[i]) {
            out.push_back(scheme.id + ": censored score of " + result.unit_ids[i]);
        }
    }
    if (result.q != o.q || result.H != o.H || result.A != o.A || result.M0 != o.M0 || result.k != o.k) {
        out.push_back(scheme.id + ": aggregates");
    }
    if (!(result == o)) {
        out.push_back(scheme.id + ": result differs");
    }

    // decompositions: everyone, then each sex (or head sex for households)
    struct Slice {
        std::string label;
        std::function<bool(const OracleUnit &)> keep;
    };
    std::vector<Slice> slices{{"all", [](const OracleUnit &) { return true; }}};
    if (scheme.unit == Unit::individual) {
        slices.push_back({"male", [](const OracleUnit &u) { return u.sex == Sex::male; }});
        slices.push_back({"female", [](const OracleUnit &u) { return u.sex == Sex::female; }});
    } else {
        slices.push_back({"male_head", [](const OracleUnit &u) { return u.head_sex == Sex::male; }});
        slices.push_back({"female_head", [](const OracleUnit &u) { return u.head_sex == Sex::female; }});
    }
    for (const auto &slice : slices) {
        const auto od = oracle_decompose(rep, scheme, slice.keep, slice.label);
        std::optional<DecompositionTable> md;
        try {
            md = decompose_indicators(
                result, mat, scheme, [&](std::size_t i) { return slice.keep(rep.units[i]); }, slice.label);
        } catch (const Error &e) {
            if (e.code() != ErrorCode::EmptyPoorSet) {
                throw;
            }
        }
        if (od.has_value() != md.has_value()) {
            out.push_back(scheme.id + ": decomposition presence for " + slice.label);
            continue;
        }
        if (!od) {
            continue;
        }
        if (od->n != md->n || od->q != md->q || od->M0 != md->M0) {
            out.push_back(scheme.id + ": decomposition totals for " + slice.label);
        }
        for (std::size_t j = 0; j < md->indicators.size(); ++j) {
            if (md->indicators[j].censored_headcount != od->censored_headcount[j] ||
                md->indicators[j].contribution != od->contribution[j]) {
                out.push_back(scheme.id + ": indicator " + md->indicators[j].indicator_id + " for " + slice.label);
            }
        }
        for (std::size_t k = 0; k < md->dimensions.size(); ++k) {
            if (md->dimensions[k].contribution != od->dimension_contribution[k]) {
                out.push_back(scheme.id + ": dimension " + md->dimensions[k].dimension_id + " for " + slice.label);
            }
        }
    }
    return out;
}

} // namespace afmpi::testkit
