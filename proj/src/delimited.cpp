#include "whee/delimited.hpp"

namespace whee {

std::vector<DelimitedRow> parse_delimited(std::string_view content, char delimiter) {
    if (content.substr(0, 3) == "\xEF\xBB\xBF") content.remove_prefix(3);

    std::vector<DelimitedRow> rows;
    DelimitedRow row;
    std::string field;
    std::size_t line = 1;
    bool in_quotes = false;
    bool field_was_quoted = false;
    bool row_has_content = false;
    std::size_t quote_start_line = 0;

    auto end_field = [&] {
        row.fields.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
    };
    auto end_row = [&] {
        if (row_has_content) {
            end_field();
            rows.push_back(std::move(row));
        }
        row = DelimitedRow{};
        field.clear();
        field_was_quoted = false;
        row_has_content = false;
    };

    for (std::size_t i = 0; i < content.size(); ++i) {
        const char c = content[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        if (!row_has_content && c != '\n' && c != '\r') {
            row_has_content = true;
            row.line_number = line;
        }
        if (c == '"' && field.empty() && !field_was_quoted) {
            in_quotes = true;
            field_was_quoted = true;
            quote_start_line = line;
        } else if (c == delimiter) {
            end_field();
        } else if (c == '\r') {
            // tolerated only as part of CRLF
            if (!(i + 1 < content.size() && content[i + 1] == '\n')) field.push_back(c);
        } else if (c == '\n') {
            end_row();
            ++line;
        } else {
            field.push_back(c);
        }
    }
    if (in_quotes) throw FormatError(quote_start_line, "unterminated quoted field");
    end_row();
    return rows;
}

std::string quote_field(std::string_view field, char delimiter) {
    if (field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace whee
