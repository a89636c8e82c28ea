#include "afmpi/csv.hpp"
#include "afmpi/error.hpp"

#include <algorithm>

namespace afmpi::csv {

std::size_t Table::column(std::string_view name) const noexcept {
    const auto it = std::ranges::find(header, name);
    return it == header.end() ? std::string_view::npos
                              : static_cast<std::size_t>(it - header.begin());
}

Table parse(std::string_view text, std::string_view source) {
    Table table;
    std::vector<std::string> row;
    std::string cell;
    std::size_t line = 1;
    std::size_t row_line = 1;
    bool in_quotes = false;
    bool row_has_content = false;

    if (text.starts_with("\xEF\xBB\xBF")) {
        text.remove_prefix(3);
    }

    const auto finish_row = [&] {
        row.push_back(std::move(cell));
        cell.clear();
        if (table.header.empty()) {
            table.header = std::move(row);
        } else {
            if (row.size() != table.header.size()) {
                throw Error{ErrorCode::IngestError,
                            std::string{source} + ":" + std::to_string(row_line) + ": expected " +
                                std::to_string(table.header.size()) + " cells, found " +
                                std::to_string(row.size()),
                            {"cell_count"},
                            {{"source", std::string{source}}, {"row", std::to_string(row_line)}}};
            }
            table.rows.push_back(std::move(row));
            table.lines.push_back(row_line);
        }
        row = {};
        row_has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                cell += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            in_quotes = true;
            row_has_content = true;
            break;
        case ',':
            row.push_back(std::move(cell));
            cell.clear();
            row_has_content = true;
            break;
        case '\r':
            break;
        case '\n':
            if (row_has_content || !cell.empty() || !row.empty()) {
                finish_row();
            }
            ++line;
            row_line = line;
            break;
        default:
            cell += c;
            row_has_content = true;
            break;
        }
    }
    if (in_quotes) {
        throw Error{ErrorCode::IngestError,
                    std::string{source} + ":" + std::to_string(row_line) + ": unterminated quote",
                    {"quote"},
                    {{"source", std::string{source}}, {"row", std::to_string(row_line)}}};
    }
    if (row_has_content || !cell.empty() || !row.empty()) {
        finish_row();
    }
    if (table.header.empty()) {
        throw Error{ErrorCode::IngestError, std::string{source} + ": missing header row",
                    {"header"}, {{"source", std::string{source}}}};
    }
    return table;
}

std::string escape(std::string_view cell) {
    if (cell.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string{cell};
    }
    std::string out{"\""};
    for (const char c : cell) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

void append_row(std::string &out, const std::vector<std::string> &cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += escape(cells[i]);
    }
    out += '\n';
}

} // namespace afmpi::csv
