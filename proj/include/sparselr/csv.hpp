#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sparselr::csv {

/// %.17g; non-finite values as nan / inf / -inf.
std::string format_double(double x);
std::string format_optional(const std::optional<double>& x);
inline std::string format_bool(bool b) { return b ? "1" : "0"; }

class Writer {
public:
    Writer(std::ostream& out, std::vector<std::string> header);

    Writer& operator<<(const std::string& field);
    Writer& operator<<(const char* field) { return *this << std::string(field); }
    Writer& operator<<(double x) { return *this << format_double(x); }
    Writer& operator<<(int x) { return *this << std::to_string(x); }
    Writer& operator<<(std::uint64_t x) { return *this << std::to_string(x); }
    Writer& operator<<(bool b) { return *this << format_bool(b); }
    Writer& operator<<(const std::optional<double>& x) { return *this << format_optional(x); }

    /// Terminates the row; throws if the field count does not match the header.
    void end_row();

private:
    std::ostream& out_;
    std::size_t columns_;
    std::size_t fields_ = 0;
};

}  // namespace sparselr::csv
