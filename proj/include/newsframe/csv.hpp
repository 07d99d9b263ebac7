#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace newsframe::csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
/// line breaks. Accepts LF or CRLF record terminators.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Next record, or nullopt at end of input. Throws DataError on an
    /// unterminated quoted field.
    std::optional<Row> next();

    /// 1-based physical line on which the most recently returned record began.
    std::size_t line() const { return record_line_; }

private:
    std::istream& in_;
    std::size_t line_ = 1;
    std::size_t record_line_ = 0;
};

/// Quotes a field only when it contains a delimiter, quote or line break.
std::string escape(const std::string& field);
void write_row(std::ostream& out, const Row& row);

}  // namespace newsframe::csv
