#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace dcornet::csv {

struct Row {
    std::size_t line = 0;  // 1-based physical line where the record starts
    std::vector<std::string> fields;
};

struct Table {
    std::vector<std::string> header;
    std::vector<Row> rows;

    // Column index by name; throws InputError naming `source` when absent.
    std::size_t column(std::string_view name, std::string_view source) const;
};

// RFC 4180-style reader: comma separator, double-quote quoting with "" escapes,
// CRLF tolerated. Lines starting with '#' before or between records are skipped.
// Blank lines are skipped. Throws InputError("<source>:<line>: ...") on
// unterminated quotes or rows whose width differs from the header.
Table read(std::istream& in, std::string_view source);
Table read_file(const std::string& path);

std::string escape(std::string_view field);

}  // namespace dcornet::csv
