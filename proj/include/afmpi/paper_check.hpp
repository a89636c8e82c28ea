#pragma once

#include "afmpi/rational.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace afmpi {

/// A published (H, A, M0) triple, all as shares.
struct PublishedTriple {
    std::string label;
    Rational H;
    Rational A;
    Rational M0;
};

/// Published subgroup sizes and M0 values with the printed overall M0.
struct PublishedPartition {
    std::string label;
    std::int64_t n_women = 0;
    Rational M0_women;
    std::int64_t n_men = 0;
    Rational M0_men;
    Rational M0_total;
};

inline const Rational product_tolerance{5, 1000};
inline const Rational partition_tolerance{1, 1000};

/// KHAS household and individual results as printed.
std::vector<PublishedTriple> published_triples();
std::vector<PublishedPartition> published_partitions();

struct ConsistencyCheck {
    std::string label;
    /// "H*A = M0" or "partition".
    std::string kind;
    Rational computed;
    Rational printed;
    Rational difference;
    Rational tolerance;
    bool pass = false;
};

/// |H*A - M0| <= 0.005 per triple, then |sum(n_g*M0_g)/n - M0| <= 0.001 per
/// partition. Exact rational comparisons throughout.
std::vector<ConsistencyCheck> paper_consistency_checks();

/// Women's population-share contribution to the published individual M0
/// (printed elsewhere as 91%).
Rational women_contribution_share();

} // namespace afmpi
