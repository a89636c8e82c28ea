#include "afmpi/paper_check.hpp"

namespace afmpi {

namespace {

Rational abs(const Rational &r) { return r < Rational{0} ? -r : r; }

Rational thousandths(std::int64_t v) { return {v, 1000}; }

} // namespace

std::vector<PublishedTriple> published_triples() {
    // Percentages printed with one decimal become thousandths; M0 as printed.
    return {
        {"household: all", thousandths(249), thousandths(402), Rational{10, 100}},
        {"household: female-headed", thousandths(230), thousandths(410), Rational{9, 100}},
        {"household: male-headed", thousandths(254), thousandths(400), Rational{10, 100}},
        {"individual: total", thousandths(494), thousandths(477), thousandths(232)},
        {"individual: women", thousandths(683), thousandths(500), thousandths(335)},
        {"individual: men", thousandths(295), thousandths(419), thousandths(123)},
        {"individual without empowerment: total", thousandths(562), thousandths(526), thousandths(298)},
        {"individual without empowerment: women", thousandths(648), thousandths(548), thousandths(359)},
        {"individual without empowerment: men", thousandths(468), thousandths(483), thousandths(233)},
    };
}

std::vector<PublishedPartition> published_partitions() {
    return {
        {"individual: women + men", 5691, thousandths(335), 5401, thousandths(123), thousandths(232)},
        {"individual without empowerment: women + men", 5691, thousandths(359), 5401, thousandths(233),
         thousandths(298)},
    };
}

std::vector<ConsistencyCheck> paper_consistency_checks() {
    std::vector<ConsistencyCheck> out;
    for (const auto &t : published_triples()) {
        ConsistencyCheck c;
        c.label = t.label;
        c.kind = "H*A = M0";
        c.computed = t.H * t.A;
        c.printed = t.M0;
        c.difference = abs(c.computed - c.printed);
        c.tolerance = product_tolerance;
        c.pass = c.difference <= c.tolerance;
        out.push_back(std::move(c));
    }
    for (const auto &p : published_partitions()) {
        ConsistencyCheck c;
        c.label = p.label;
        c.kind = "partition";
        c.computed = (Rational{p.n_women} * p.M0_women + Rational{p.n_men} * p.M0_men) /
                     Rational{p.n_women + p.n_men};
        c.printed = p.M0_total;
        c.difference = abs(c.computed - c.printed);
        c.tolerance = partition_tolerance;
        c.pass = c.difference <= c.tolerance;
        out.push_back(std::move(c));
    }
    return out;
}

Rational women_contribution_share() {
    const auto p = published_partitions().front();
    const Rational women = Rational{p.n_women} * p.M0_women;
    const Rational total = Rational{p.n_women + p.n_men} * p.M0_total;
    return women / total;
}

} // namespace afmpi
