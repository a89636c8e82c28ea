#pragma once

#include "afmpi/deprivation.hpp"
#include "afmpi/engine.hpp"
#include "afmpi/rational.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace afmpi::report {

inline constexpr int decimal_digits = 6;
inline constexpr int percent_digits = 1;

/// A share rendered as a percentage with one decimal.
struct Percent {
    Rational value;
    friend bool operator==(const Percent &, const Percent &) = default;
};

using Cell = std::variant<std::monostate, std::string, std::int64_t, Rational, Percent>;

struct Column {
    std::string name;
    /// Holds Rational cells; in CSV `x` expands to `x,x_num,x_den`.
    bool rational = false;

    Column(const char *n) : name{n} {} // NOLINT(implicit)
    Column(std::string n, bool r) : name{std::move(n)}, rational{r} {}
};

inline Column exact(const char *name) { return {name, true}; }

/// Tabular output shared by the CSV and JSON writers so both formats carry
/// the same values.
struct Table {
    std::string name;
    std::vector<Column> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

std::string decimal(const Rational &r);
std::string percent(const Rational &share);

/// run_id is prepended as the first column of every row.
std::string to_csv(const Table &table, std::string_view run_id);

/// {"run_id", "manifest", "tables": {name: [row objects]}, "notes"}.
std::string to_json(std::span<const Table> tables, std::string_view run_id,
                    std::span<const std::string> notes = {});

enum class Format { csv, json, both };
Format parse_format(std::string_view token);

/// Writes `<stem>.json` with every table and/or one `<stem>[_<table>].csv`
/// per table (no suffix when there is a single table). Returns file names.
std::vector<std::string> write_tables(const std::filesystem::path &dir, std::string_view stem,
                                      std::span<const Table> tables, Format format,
                                      std::string_view run_id, std::span<const std::string> notes = {});

void write_text(const std::filesystem::path &file, std::string_view text);

// --- table builders ----------------------------------------------------------

Cell optional_cell(const std::optional<Rational> &r);

/// One row per group: "all" first, then e.g. female/male.
Table summary_table(const PovertyResult &result, std::span<const GroupMeasure> groups);
Table units_table(const PovertyResult &result, const DeprivationMatrix &mat);

struct DecompositionGroup {
    std::string label;
    std::size_t n = 0;
    std::size_t q = 0;
    Rational M0;
    /// Empty when the group had no poor (status EmptyPoorSet).
    std::optional<DecompositionTable> table;
};

/// "groups": label, n, q, M0, status; "shares": long format over
/// dimensions then indicators for each decomposable group.
std::vector<Table> decomposition_tables(std::span<const DecompositionGroup> groups);
Table subgroup_table(const SubgroupDecomposition &d);
Table crosstab_table(const CrossTab &t);
Table sweep_table(const SweepCurve &curve);
Table rates_table(std::span<const std::pair<std::string, std::optional<RateTable>>> groups);

// --- manifest ------------------------------------------------------------------

struct InputFile {
    std::string role;
    std::string path;
    std::string hash;
};

struct RunManifest {
    std::string command;
    std::string scheme_id;
    std::string scheme_hash;
    std::vector<InputFile> inputs;
    std::map<std::string, std::string> flags;
    std::optional<Rational> k;
    std::string timestamp;
    std::string tool_version;
    std::vector<std::string> outputs;
    /// Resolved scheme, embedded so weights after exclusions are on record.
    std::string scheme_json;

    /// FNV-1a over command, scheme hash, input hashes, flags, k and tool
    /// version; the timestamp and paths are excluded so identical runs share
    /// an id.
    std::string run_id() const;
    std::string to_json() const;
};

/// Current UTC time as 2024-01-31T12:00:00Z.
std::string utc_timestamp();

} // namespace afmpi::report
