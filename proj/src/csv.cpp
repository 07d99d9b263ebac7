#include "newsframe/csv.hpp"

#include "newsframe/errors.hpp"

namespace newsframe::csv {

std::optional<Row> Reader::next() {
    int c = in_.get();
    if (c == std::char_traits<char>::eof()) return std::nullopt;

    record_line_ = line_;
    Row row;
    std::string field;
    bool quoted = false;
    bool after_quote = false;

    for (;; c = in_.get()) {
        if (c == std::char_traits<char>::eof()) {
            if (quoted) {
                throw DataError("unterminated quoted field starting on line " +
                                std::to_string(record_line_));
            }
            row.push_back(std::move(field));
            return row;
        }
        const char ch = static_cast<char>(c);
        if (quoted) {
            if (ch == '"') {
                if (in_.peek() == '"') {
                    in_.get();
                    field.push_back('"');
                } else {
                    quoted = false;
                    after_quote = true;
                }
            } else {
                if (ch == '\n') ++line_;
                field.push_back(ch);
            }
            continue;
        }
        if (ch == ',') {
            row.push_back(std::move(field));
            field.clear();
            after_quote = false;
        } else if (ch == '\n' || ch == '\r') {
            if (ch == '\r' && in_.peek() == '\n') in_.get();
            ++line_;
            row.push_back(std::move(field));
            return row;
        } else if (ch == '"' && field.empty() && !after_quote) {
            quoted = true;
        } else {
            field.push_back(ch);
        }
    }
}

std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char ch : field) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, const Row& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        out << escape(row[i]);
    }
    out << '\n';
}

}  // namespace newsframe::csv
