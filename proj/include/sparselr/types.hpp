#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Core>

namespace sparselr {

using Index = std::ptrdiff_t;
using cplx = std::complex<double>;

/// Dense row-major complex matrix; the storage for every operator on the chain.
using Matrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RealVector = Eigen::VectorXd;

inline constexpr cplx I{0.0, 1.0};

/// Max-entry Hermiticity tolerance used for every "flagged Hermitian" check.
inline constexpr double kHermitianTol = 1e-12;

}  // namespace sparselr
