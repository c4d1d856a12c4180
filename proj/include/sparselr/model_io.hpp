#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "sparselr/json_lines.hpp"
#include "sparselr/model.hpp"

namespace sparselr {

/// A parsed JSON document plus the line index used in error messages.
class ConfigDocument {
public:
    /// Throws ParseError (with line) on malformed JSON.
    static ConfigDocument parse(const std::string& text, std::string origin = "<config>");
    static ConfigDocument load(const std::string& path);

    const nlohmann::json& json() const noexcept { return *json_; }
    const JsonLineIndex& lines() const noexcept { return *lines_; }
    const std::string& origin() const noexcept { return origin_; }

private:
    std::shared_ptr<nlohmann::json> json_;
    std::shared_ptr<JsonLineIndex> lines_;
    std::string origin_;
};

/// Typed view on one value of a ConfigDocument; every failure is a
/// ParseError naming the origin, the JSON pointer and the source line.
class ConfigNode {
public:
    explicit ConfigNode(const ConfigDocument& doc);
    ConfigNode(const ConfigDocument& doc, const nlohmann::json& value, std::string pointer);

    bool has(const std::string& key) const;
    ConfigNode at(const std::string& key) const;
    ConfigNode at(std::size_t index) const;
    std::size_t size() const;
    bool is_array() const { return value_->is_array(); }
    bool is_object() const { return value_->is_object(); }
    bool is_string() const { return value_->is_string(); }
    bool is_number() const { return value_->is_number(); }

    int as_int() const;
    double as_double() const;
    std::uint64_t as_u64() const;
    bool as_bool() const;
    std::string as_string() const;
    std::vector<double> as_doubles() const;
    std::vector<std::string> as_strings() const;
    cplx as_complex() const;

    /// n x n complex matrix; either n*n row-major entries or n rows of n
    /// entries, each entry a number or a [re, im] pair.
    Matrix as_matrix(Index n) const;

    const nlohmann::json& raw() const noexcept { return *value_; }
    const std::string& pointer() const noexcept { return pointer_; }
    int line() const;

    [[noreturn]] void fail(const std::string& message) const;

private:
    const ConfigDocument* doc_;
    const nlohmann::json* value_;
    std::string pointer_;
};

struct ModelDescription {
    ChainGeometry geom;
    NNInteraction phi;
    ImpuritySpec imp;
};

/// Model keys: `L`, `D`, one of `bond_matrix` (translation-invariant D^2 x D^2
/// term) or `heisenberg_J` (spin-1/2 only), optional `bonds` ({"x": matrix}
/// per-bond overrides, or the whole interaction when no uniform term is
/// given), optional `impurities` ([{site, coupling, eigenvalues +
/// projectors | hermitian}]).
ModelDescription model_from_config(const ConfigNode& node);
ModelDescription parse_model(const std::string& text, std::string origin = "<model>");
ModelDescription load_model(const std::string& path);

}  // namespace sparselr
