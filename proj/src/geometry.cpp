#include "sparselr/geometry.hpp"

#include <algorithm>
#include <limits>

#include "sparselr/error.hpp"

namespace sparselr {

SiteSupport::SiteSupport(int lo_, int hi_) : lo(lo_), hi(hi_) {
    if (lo > hi) {
        throw SupportMismatch("empty support [" + std::to_string(lo) + "," + std::to_string(hi) + "]");
    }
}

std::string SiteSupport::str() const {
    return "[" + std::to_string(lo) + "," + std::to_string(hi) + "]";
}

int distance(const SiteSupport& a, const SiteSupport& b) noexcept {
    return std::max({0, b.lo - a.hi, a.lo - b.hi});
}

int distance(int x, const SiteSupport& s) noexcept {
    return distance(SiteSupport::site(x), s);
}

Index int_pow(Index base, int exp) {
    Index r = 1;
    for (int i = 0; i < exp; ++i) {
        if (r > std::numeric_limits<Index>::max() / base) {
            throw DimensionError("dimension overflow");
        }
        r *= base;
    }
    return r;
}

ChainGeometry::ChainGeometry(int L, int D) : L_(L), D_(D) {
    if (L < 0) {
        throw DomainError("chain half-length L must be >= 0");
    }
    if (D < 2) {
        throw DomainError("on-site dimension D must be >= 2");
    }
    total_dim_ = int_pow(D, num_sites());
}

Index ChainGeometry::dim_of(const SiteSupport& s) const {
    return int_pow(D_, s.size());
}

Index ChainGeometry::dim_of_sites(int n) const {
    return int_pow(D_, n);
}

void ChainGeometry::require_inside(const SiteSupport& s, const char* what) const {
    if (!contains(s)) {
        throw RangeError(std::string(what) + " support " + s.str() + " exceeds chain " + full().str());
    }
}

}  // namespace sparselr
