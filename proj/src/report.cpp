#include "afmpi/report.hpp"
#include "afmpi/csv.hpp"
#include "afmpi/digest.hpp"
#include "afmpi/error.hpp"

#include <json.hpp>

#include <chrono>
#include <ctime>
#include <fstream>

namespace afmpi::report {

using json = nlohmann::ordered_json;

std::string decimal(const Rational &r) { return to_decimal(r, decimal_digits); }

std::string percent(const Rational &share) { return to_decimal(share * Rational{100}, percent_digits); }

namespace {

template <class... Ts> struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

std::string to_csv(const Table &table, std::string_view run_id) {
    std::vector<std::string> header{"run_id"};
    for (const auto &col : table.columns) {
        header.push_back(col.name);
        if (col.rational) {
            header.push_back(col.name + "_num");
            header.push_back(col.name + "_den");
        }
    }
    std::string out;
    csv::append_row(out, header);
    std::vector<std::string> cells;
    for (const auto &row : table.rows) {
        cells.assign(1, std::string{run_id});
        for (std::size_t c = 0; c < row.size(); ++c) {
            std::visit(overloaded{
                           [&](std::monostate) {
                               cells.emplace_back();
                               if (table.columns[c].rational) {
                                   cells.emplace_back();
                                   cells.emplace_back();
                               }
                           },
                           [&](const std::string &s) { cells.push_back(s); },
                           [&](std::int64_t v) { cells.push_back(std::to_string(v)); },
                           [&](const Rational &r) {
                               cells.push_back(decimal(r));
                               cells.push_back(std::to_string(r.num()));
                               cells.push_back(std::to_string(r.den()));
                           },
                           [&](const Percent &p) { cells.push_back(percent(p.value)); },
                       },
                       row[c]);
        }
        csv::append_row(out, cells);
    }
    return out;
}

std::string to_json(std::span<const Table> tables, std::string_view run_id, std::span<const std::string> notes) {
    json doc;
    doc["run_id"] = run_id;
    doc["manifest"] = "manifest.json";
    json &out = doc["tables"] = json::object();
    for (const auto &table : tables) {
        json rows = json::array();
        for (const auto &row : table.rows) {
            json obj = json::object();
            for (std::size_t c = 0; c < row.size(); ++c) {
                obj[table.columns[c].name] = std::visit(
                    overloaded{
                        [](std::monostate) { return json(nullptr); },
                        [](const std::string &s) { return json(s); },
                        [](std::int64_t v) { return json(v); },
                        [](const Rational &r) {
                            return json{{"decimal", decimal(r)}, {"num", r.num()}, {"den", r.den()}};
                        },
                        [](const Percent &p) { return json(percent(p.value)); },
                    },
                    row[c]);
            }
            rows.push_back(std::move(obj));
        }
        out[table.name] = std::move(rows);
    }
    doc["notes"] = json::array();
    for (const auto &n : notes) {
        doc["notes"].push_back(n);
    }
    return doc.dump(2) + "\n";
}

Format parse_format(std::string_view token) {
    if (token == "csv") {
        return Format::csv;
    }
    if (token == "json") {
        return Format::json;
    }
    if (token == "both") {
        return Format::both;
    }
    throw Error{ErrorCode::Usage, "unknown format '" + std::string{token} + "' (csv, json, both)",
                {"format"}};
}

void write_text(const std::filesystem::path &file, std::string_view text) {
    std::ofstream out{file, std::ios::binary | std::ios::trunc};
    if (!out) {
        throw Error{ErrorCode::Io, "cannot write '" + file.string() + "'", {"write"},
                    {{"path", file.string()}}};
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw Error{ErrorCode::Io, "write failed for '" + file.string() + "'", {"write"},
                    {{"path", file.string()}}};
    }
}

std::vector<std::string> write_tables(const std::filesystem::path &dir, std::string_view stem,
                                      std::span<const Table> tables, Format format,
                                      std::string_view run_id, std::span<const std::string> notes) {
    std::vector<std::string> written;
    if (format != Format::json) {
        for (const auto &t : tables) {
            auto name = std::string{stem};
            if (tables.size() > 1) {
                name += "_" + t.name;
            }
            name += ".csv";
            write_text(dir / name, to_csv(t, run_id));
            written.push_back(std::move(name));
        }
    }
    if (format != Format::csv) {
        auto name = std::string{stem} + ".json";
        write_text(dir / name, to_json(tables, run_id, notes));
        written.push_back(std::move(name));
    }
    return written;
}

// --- builders ------------------------------------------------------------------

Cell optional_cell(const std::optional<Rational> &r) {
    if (r) {
        return *r;
    }
    return std::monostate{};
}

namespace {

Cell optional_percent(const std::optional<Rational> &r) {
    if (r) {
        return Percent{*r};
    }
    return std::monostate{};
}

Cell count(std::size_t n) { return static_cast<std::int64_t>(n); }

} // namespace

Table summary_table(const PovertyResult &result, std::span<const GroupMeasure> groups) {
    Table t{"summary",
            {"scheme_id", "level", exact("k"), "group", "n", "q", exact("H"), "H_pct", exact("A"), "A_pct",
             exact("M0")},
            {}};
    for (const auto &g : groups) {
        t.add({result.scheme_id, std::string{to_string(result.unit_level)}, result.k, g.label, count(g.n),
               count(g.q), g.H, Percent{g.H}, optional_cell(g.A), optional_percent(g.A), g.M0});
    }
    return t;
}

Table units_table(const PovertyResult &result, const DeprivationMatrix &mat) {
    Table t{"units", {"unit_id", "hh_id", exact("score"), "poor", exact("censored_score")}, {}};
    for (std::size_t i = 0; i < result.n; ++i) {
        t.add({result.unit_ids[i], mat.attributes[i].hh_id, result.scores[i],
               static_cast<std::int64_t>(result.poor(i) ? 1 : 0), result.censored_scores[i]});
    }
    return t;
}

std::vector<Table> decomposition_tables(std::span<const DecompositionGroup> groups) {
    Table summary{"groups", {"group", "n", "q", exact("M0"), "status"}, {}};
    Table shares{"shares",
                 {"group", "level", "id", "dimension", exact("weight"), "censored_count",
                  exact("censored_headcount"), exact("contribution"), "contribution_pct"},
                 {}};
    for (const auto &g : groups) {
        summary.add({g.label, count(g.n), count(g.q), g.M0, std::string{g.table ? "ok" : "EmptyPoorSet"}});
        if (!g.table) {
            continue;
        }
        for (const auto &d : g.table->dimensions) {
            shares.add({g.label, std::string{"dimension"}, d.dimension_id, d.dimension_id, d.weight,
                        std::monostate{}, std::monostate{}, d.contribution, Percent{d.contribution}});
        }
        for (const auto &s : g.table->indicators) {
            shares.add({g.label, std::string{"indicator"}, s.indicator_id, s.dimension_id, s.weight,
                        count(s.censored_count), s.censored_headcount, s.contribution,
                        Percent{s.contribution}});
        }
    }
    return {std::move(summary), std::move(shares)};
}

Table subgroup_table(const SubgroupDecomposition &d) {
    Table t{"subgroups",
            {"group", "n", exact("population_share"), "q", exact("H"), exact("A"), exact("M0"),
             exact("weighted_M0"), exact("contribution"), "contribution_pct"},
            {}};
    for (const auto &r : d.rows) {
        t.add({r.label, count(r.n), r.population_share, count(r.q), r.H, optional_cell(r.A), r.M0,
               r.weighted_M0, optional_cell(r.contribution), optional_percent(r.contribution)});
    }
    t.add({std::string{"total"}, count(d.n), Rational{1}, std::monostate{}, std::monostate{},
           std::monostate{}, d.M0, d.reconstructed_M0, std::monostate{}, std::monostate{}});
    return t;
}

Table crosstab_table(const CrossTab &ct) {
    Table t{"crosstab", {"household", "individual", "count", "column_total", exact("share"), "share_pct"}, {}};
    for (std::size_t r = 0; r < ct.row_labels.size(); ++r) {
        for (std::size_t c = 0; c < ct.column_labels.size(); ++c) {
            t.add({ct.row_labels[r], ct.column_labels[c], count(ct.count(r, c)), count(ct.column_totals[c]),
                   optional_cell(ct.share(r, c)), optional_percent(ct.share(r, c))});
        }
    }
    return t;
}

Table sweep_table(const SweepCurve &curve) {
    Table t{"sweep", {exact("k"), "group", "n", "q", exact("H"), "H_pct", exact("A"), exact("M0")}, {}};
    for (const auto &p : curve.points) {
        const auto &m = p.measure;
        t.add({p.k, m.label, count(m.n), count(m.q), m.H, Percent{m.H}, optional_cell(m.A), m.M0});
    }
    return t;
}

Table rates_table(std::span<const std::pair<std::string, std::optional<RateTable>>> groups) {
    Table t{"rates", {"group", "indicator", "units", "deprived", exact("rate"), "rate_pct"}, {}};
    for (const auto &[label, table] : groups) {
        if (!table) {
            t.add({label, std::monostate{}, count(0), std::monostate{}, std::monostate{}, std::monostate{}});
            continue;
        }
        for (const auto &row : table->rows) {
            t.add({label, row.indicator_id, count(table->units), count(row.deprived), row.rate,
                   Percent{row.rate}});
        }
    }
    return t;
}

// --- manifest ------------------------------------------------------------------

std::string RunManifest::run_id() const {
    std::string key = "command=" + command + "\nscheme=" + scheme_hash + "\n";
    for (const auto &in : inputs) {
        key += "input:" + in.role + "=" + in.hash + "\n";
    }
    for (const auto &[name, value] : flags) {
        key += "flag:" + name + "=" + value + "\n";
    }
    key += "k=" + (k ? k->str() : std::string{}) + "\nversion=" + tool_version + "\n";
    return to_hex(fnv1a64(key));
}

std::string RunManifest::to_json() const {
    json doc;
    doc["run_id"] = run_id();
    doc["command"] = command;
    doc["tool_version"] = tool_version;
    doc["timestamp"] = timestamp;
    doc["scheme"] = {{"id", scheme_id}, {"hash", scheme_hash}};
    if (!scheme_json.empty()) {
        doc["scheme"]["definition"] = json::parse(scheme_json);
    }
    doc["k"] = k ? json{{"decimal", decimal(*k)}, {"num", k->num()}, {"den", k->den()}} : json(nullptr);
    doc["inputs"] = json::array();
    for (const auto &in : inputs) {
        doc["inputs"].push_back({{"role", in.role}, {"path", in.path}, {"hash", in.hash}});
    }
    doc["flags"] = json::object();
    for (const auto &[name, value] : flags) {
        doc["flags"][name] = value;
    }
    doc["outputs"] = outputs;
    return doc.dump(2) + "\n";
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace afmpi::report
