#pragma once

// Minimal RFC-4180 writer: comma separated, CRLF line ends, fields quoted
// when they contain a comma, quote, CR or LF.

#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace sfem::csv {

std::string escape(std::string_view field);

/// Fixed 10 significant digits, so traces are byte-stable.
std::string number(double value);

class Writer {
public:
    Writer(std::ostream& out, std::vector<std::string> header);

    /// Throws std::invalid_argument when the field count differs from the
    /// header.
    void row(const std::vector<std::string>& fields);

    std::size_t rows_written() const { return rows_; }

private:
    void write(const std::vector<std::string>& fields);

    std::ostream& out_;
    std::size_t columns_;
    std::size_t rows_ = 0;
};

} // namespace sfem::csv
