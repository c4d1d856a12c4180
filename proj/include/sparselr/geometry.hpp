#pragma once

#include <cstdint>
#include <string>

namespace sparselr {

using Index = std::ptrdiff_t;

/// Closed interval [lo, hi] of lattice sites.
struct SiteSupport {
    int lo = 0;
    int hi = 0;

    SiteSupport() = default;
    SiteSupport(int lo_, int hi_);
    static SiteSupport site(int x) { return {x, x}; }

    int size() const noexcept { return hi - lo + 1; }
    int diam() const noexcept { return hi - lo; }
    bool contains(int x) const noexcept { return lo <= x && x <= hi; }
    bool contains(const SiteSupport& other) const noexcept {
        return lo <= other.lo && other.hi <= hi;
    }
    bool operator==(const SiteSupport&) const = default;

    std::string str() const;
};

/// d([a,b],[c,e]) = max(0, c-b, a-e).
int distance(const SiteSupport& a, const SiteSupport& b) noexcept;
int distance(int x, const SiteSupport& s) noexcept;

/// Finite chain [-L, L] with on-site dimension D.
class ChainGeometry {
public:
    ChainGeometry(int L, int D);

    int L() const noexcept { return L_; }
    int D() const noexcept { return D_; }
    int num_sites() const noexcept { return 2 * L_ + 1; }
    Index total_dim() const noexcept { return total_dim_; }
    SiteSupport full() const noexcept { return {-L_, L_}; }
    bool contains(int x) const noexcept { return -L_ <= x && x <= L_; }
    bool contains(const SiteSupport& s) const noexcept { return full().contains(s); }

    /// D^(number of sites in s).
    Index dim_of(const SiteSupport& s) const;
    Index dim_of_sites(int n) const;

    void require_inside(const SiteSupport& s, const char* what) const;

private:
    int L_;
    int D_;
    Index total_dim_;
};

Index int_pow(Index base, int exp);

}  // namespace sparselr
