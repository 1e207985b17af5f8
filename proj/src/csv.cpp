#include "sfem/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace sfem::csv {

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string number(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    return buf;
}

Writer::Writer(std::ostream& out, std::vector<std::string> header) : out_(out), columns_(header.size()) {
    if (header.empty()) throw std::invalid_argument("csv header must not be empty");
    write(header);
}

void Writer::row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) {
        throw std::invalid_argument("csv row has " + std::to_string(fields.size()) + " fields, expected " +
                                    std::to_string(columns_));
    }
    write(fields);
    ++rows_;
}

void Writer::write(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << escape(fields[i]);
    }
    out_ << "\r\n";
}

} // namespace sfem::csv
