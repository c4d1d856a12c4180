#pragma once

#include <string_view>

#include "sparselr/types.hpp"

namespace sparselr::pauli {

Matrix identity();
Matrix sx();
Matrix sy();
Matrix sz();

/// Lookup for the named observables `sx`, `sy`, `sz` (and `id`).
Matrix named(std::string_view name);

/// -J sum_j sigma^j (x) sigma^j, the spin-1/2 Heisenberg bond.
Matrix heisenberg_bond(double J);

}  // namespace sparselr::pauli
