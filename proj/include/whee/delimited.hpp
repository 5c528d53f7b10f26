#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace whee {

class FormatError : public std::runtime_error {
public:
    FormatError(std::size_t line_number, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_number) + ": " + what),
          line_number_(line_number) {}
    std::size_t line_number() const noexcept { return line_number_; }

private:
    std::size_t line_number_;
};

struct DelimitedRow {
    std::size_t line_number = 0;  ///< 1-based physical line where the row starts
    std::vector<std::string> fields;
};

/// RFC 4180 style parsing: double-quoted fields may contain the delimiter,
/// newlines and doubled quotes. Blank lines are skipped. A UTF-8 BOM is dropped.
/// Throws FormatError on an unterminated quoted field.
std::vector<DelimitedRow> parse_delimited(std::string_view content, char delimiter);

/// Quotes a field when it contains the delimiter, a quote or a line break.
std::string quote_field(std::string_view field, char delimiter);

} // namespace whee
