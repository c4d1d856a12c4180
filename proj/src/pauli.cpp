#include "sparselr/pauli.hpp"

#include <string>

#include "sparselr/error.hpp"
#include "sparselr/kernels.hpp"

namespace sparselr::pauli {

Matrix identity() {
    return Matrix::Identity(2, 2);
}

Matrix sx() {
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

Matrix sy() {
    Matrix m(2, 2);
    m << 0.0, -I, I, 0.0;
    return m;
}

Matrix sz() {
    Matrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

Matrix named(std::string_view name) {
    if (name == "sx") return sx();
    if (name == "sy") return sy();
    if (name == "sz") return sz();
    if (name == "id") return identity();
    throw PreconditionError("unknown named observable '" + std::string(name) + "'");
}

Matrix heisenberg_bond(double J) {
    using kernels::serial::kron;
    return -J * (kron(sx(), sx()) + kron(sy(), sy()) + kron(sz(), sz()));
}

}  // namespace sparselr::pauli
