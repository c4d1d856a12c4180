#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>

namespace sparselr {

/// Line numbers for every value in a JSON document, keyed by JSON pointer
/// ("" is the root, "/impurities/0/site" a nested value). Lets semantic
/// validation report the line of the offending value.
class JsonLineIndex {
public:
    JsonLineIndex() = default;
    explicit JsonLineIndex(std::string_view text);

    /// Line of `pointer`, or of its nearest indexed ancestor; 0 if unknown.
    int line_of(const std::string& pointer) const;

    static int line_at_offset(std::string_view text, std::size_t offset);

private:
    std::map<std::string, int> lines_;
};

}  // namespace sparselr
