#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace afmpi::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    /// 1-based physical line of each row (the header is line 1).
    std::vector<std::size_t> lines;

    /// Index of `column` in the header, or npos.
    std::size_t column(std::string_view name) const noexcept;
};

/// Comma-separated, double-quote escaping, LF or CRLF line ends, header row
/// mandatory. A row whose cell count differs from the header throws
/// IngestError carrying the line number.
Table parse(std::string_view text, std::string_view source = "<memory>");

/// Quotes a cell only when it contains a comma, quote or line break.
std::string escape(std::string_view cell);

/// Appends one line (cells escaped, comma-joined, LF-terminated).
void append_row(std::string &out, const std::vector<std::string> &cells);

} // namespace afmpi::csv
