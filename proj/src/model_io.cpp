#include "sparselr/model_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "sparselr/error.hpp"
#include "sparselr/pauli.hpp"

namespace sparselr {

// --- ConfigDocument ------------------------------------------------------

ConfigDocument ConfigDocument::parse(const std::string& text, std::string origin) {
    ConfigDocument doc;
    doc.origin_ = std::move(origin);
    try {
        doc.json_ = std::make_shared<nlohmann::json>(nlohmann::json::parse(text));
    } catch (const nlohmann::json::parse_error& e) {
        const int line = JsonLineIndex::line_at_offset(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ParseError(doc.origin_ + ": malformed JSON (" + std::string(e.what()) + ")", line);
    }
    doc.lines_ = std::make_shared<JsonLineIndex>(text);
    return doc;
}

ConfigDocument ConfigDocument::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path, 0);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

// --- ConfigNode ------------------------------------------------------------

ConfigNode::ConfigNode(const ConfigDocument& doc) : ConfigNode(doc, doc.json(), "") {}

ConfigNode::ConfigNode(const ConfigDocument& doc, const nlohmann::json& value, std::string pointer)
    : doc_(&doc), value_(&value), pointer_(std::move(pointer)) {}

int ConfigNode::line() const {
    return doc_->lines().line_of(pointer_);
}

void ConfigNode::fail(const std::string& message) const {
    const std::string where = pointer_.empty() ? "(root)" : pointer_;
    throw ParseError(doc_->origin() + ": " + where + ": " + message, line());
}

bool ConfigNode::has(const std::string& key) const {
    return value_->is_object() && value_->contains(key);
}

ConfigNode ConfigNode::at(const std::string& key) const {
    if (!value_->is_object()) fail("expected an object");
    auto it = value_->find(key);
    if (it == value_->end()) fail("missing required key '" + key + "'");
    return {*doc_, *it, pointer_ + "/" + key};
}

ConfigNode ConfigNode::at(std::size_t index) const {
    if (!value_->is_array()) fail("expected an array");
    if (index >= value_->size()) fail("index " + std::to_string(index) + " out of range");
    return {*doc_, (*value_)[index], pointer_ + "/" + std::to_string(index)};
}

std::size_t ConfigNode::size() const {
    if (!value_->is_array() && !value_->is_object()) fail("expected an array or object");
    return value_->size();
}

int ConfigNode::as_int() const {
    if (!value_->is_number_integer()) fail("expected an integer");
    const auto v = value_->get<std::int64_t>();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) fail("integer out of range");
    return static_cast<int>(v);
}

double ConfigNode::as_double() const {
    if (!value_->is_number()) fail("expected a number");
    const double v = value_->get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
}

std::uint64_t ConfigNode::as_u64() const {
    if (value_->is_number_unsigned()) return value_->get<std::uint64_t>();
    if (value_->is_number_integer() && value_->get<std::int64_t>() >= 0) return value_->get<std::uint64_t>();
    fail("expected a non-negative integer");
}

bool ConfigNode::as_bool() const {
    if (!value_->is_boolean()) fail("expected true or false");
    return value_->get<bool>();
}

std::string ConfigNode::as_string() const {
    if (!value_->is_string()) fail("expected a string");
    return value_->get<std::string>();
}

std::vector<double> ConfigNode::as_doubles() const {
    if (!value_->is_array()) fail("expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < value_->size(); ++i) out.push_back(at(i).as_double());
    return out;
}

std::vector<std::string> ConfigNode::as_strings() const {
    if (!value_->is_array()) fail("expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < value_->size(); ++i) out.push_back(at(i).as_string());
    return out;
}

cplx ConfigNode::as_complex() const {
    if (value_->is_number()) return {as_double(), 0.0};
    if (value_->is_array() && value_->size() == 2) return {at(0).as_double(), at(1).as_double()};
    fail("expected a complex number (number or [re, im])");
}

Matrix ConfigNode::as_matrix(Index n) const {
    if (!value_->is_array()) fail("expected a matrix");
    Matrix m(n, n);
    const auto len = static_cast<Index>(value_->size());
    if (len == n * n) {
        for (Index k = 0; k < n * n; ++k) m(k / n, k % n) = at(k).as_complex();
        return m;
    }
    if (len == n) {
        for (Index r = 0; r < n; ++r) {
            const ConfigNode row = at(r);
            if (!row.is_array() || static_cast<Index>(row.size()) != n) {
                row.fail("expected a row of " + std::to_string(n) + " entries");
            }
            for (Index c = 0; c < n; ++c) m(r, c) = row.at(c).as_complex();
        }
        return m;
    }
    fail("expected " + std::to_string(n * n) + " row-major entries or " + std::to_string(n) + " rows for a " +
         std::to_string(n) + "x" + std::to_string(n) + " matrix");
}

// --- model -----------------------------------------------------------------

namespace {

ImpuritySite impurity_from_config(const ConfigNode& node, int D) {
    const int site = node.at("site").as_int();
    const double coupling = node.at("coupling").as_double();
    try {
        if (node.has("hermitian")) {
            return impurity_from_hermitian(site, node.at("hermitian").as_matrix(D), coupling);
        }
        const ConfigNode eig = node.at("eigenvalues");
        const ConfigNode proj = node.at("projectors");
        if (eig.size() != static_cast<std::size_t>(D)) eig.fail("expected " + std::to_string(D) + " eigenvalues");
        if (!proj.is_array() || proj.size() != static_cast<std::size_t>(D)) {
            proj.fail("expected " + std::to_string(D) + " projectors");
        }
        std::vector<Matrix> projectors;
        for (int j = 0; j < D; ++j) projectors.push_back(proj.at(j).as_matrix(D));
        return make_impurity(site, eig.as_doubles(), std::move(projectors), coupling);
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        node.fail(e.what());
    }
}

}  // namespace

ModelDescription model_from_config(const ConfigNode& node) {
    const int L = node.at("L").as_int();
    const int D = node.at("D").as_int();
    if (L < 0) node.at("L").fail("L must be >= 0");
    if (D < 2) node.at("D").fail("D must be >= 2");
    ChainGeometry geom(L, D);
    const Index d2 = static_cast<Index>(D) * D;

    std::map<int, Matrix> overrides;
    if (node.has("bonds")) {
        const ConfigNode bonds = node.at("bonds");
        if (!bonds.is_object()) bonds.fail("expected an object mapping bond site to matrix");
        for (const auto& item : bonds.raw().items()) {
            const std::string key = item.key();
            const ConfigNode b = bonds.at(key);
            int x = 0;
            try {
                std::size_t used = 0;
                x = std::stoi(key, &used);
                if (used != key.size()) throw std::invalid_argument(key);
            } catch (const std::exception&) {
                b.fail("bond key '" + key + "' is not an integer site");
            }
            if (x < -L || x > L - 1) b.fail("bond (" + key + "," + std::to_string(x + 1) + ") outside the chain");
            overrides[x] = b.as_matrix(d2);
        }
    }

    NNInteraction phi(D);
    try {
        if (node.has("bond_matrix") && node.has("heisenberg_J")) {
            node.fail("give either 'bond_matrix' or 'heisenberg_J', not both");
        }
        if (node.has("bond_matrix")) {
            phi = NNInteraction::translation_invariant(node.at("bond_matrix").as_matrix(d2), geom, overrides);
        } else if (node.has("heisenberg_J")) {
            if (D != 2) node.at("heisenberg_J").fail("the Heisenberg preset needs D = 2");
            phi = NNInteraction::translation_invariant(pauli::heisenberg_bond(node.at("heisenberg_J").as_double()),
                                                       geom, overrides);
        } else {
            for (const auto& [x, term] : overrides) phi.set_bond(x, term);
        }
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        node.fail(e.what());
    }

    std::vector<ImpuritySite> sites;
    if (node.has("impurities")) {
        const ConfigNode list = node.at("impurities");
        if (!list.is_array()) list.fail("expected an array of impurities");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const ConfigNode item = list.at(i);
            ImpuritySite s = impurity_from_config(item, D);
            if (!geom.contains(s.site)) item.at("site").fail("impurity site outside the chain");
            sites.push_back(std::move(s));
        }
    }
    try {
        return {geom, std::move(phi), ImpuritySpec(std::move(sites))};
    } catch (const Error& e) {
        node.fail(e.what());
    }
}

ModelDescription parse_model(const std::string& text, std::string origin) {
    const ConfigDocument doc = ConfigDocument::parse(text, std::move(origin));
    return model_from_config(ConfigNode(doc));
}

ModelDescription load_model(const std::string& path) {
    const ConfigDocument doc = ConfigDocument::load(path);
    return model_from_config(ConfigNode(doc));
}

}  // namespace sparselr
