#include "sparselr/csv.hpp"

#include <cmath>
#include <cstdio>

#include "sparselr/error.hpp"

namespace sparselr::csv {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_optional(const std::optional<double>& x) {
    return x ? format_double(*x) : std::string();
}

Writer::Writer(std::ostream& out, std::vector<std::string> header) : out_(out), columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

Writer& Writer::operator<<(const std::string& field) {
    if (fields_ == columns_) throw Error("csv: too many fields in row");
    out_ << (fields_++ ? "," : "") << field;
    return *this;
}

void Writer::end_row() {
    if (fields_ != columns_) {
        throw Error("csv: row has " + std::to_string(fields_) + " fields, header has " + std::to_string(columns_));
    }
    out_ << '\n';
    fields_ = 0;
}

}  // namespace sparselr::csv
