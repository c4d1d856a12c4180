#pragma once

// Dense kernels behind operator_core and dynamics. Each kernel exists twice:
// `serial` is the straightforward reference kept for testing and
// benchmarking, `parallel` is the OpenMP version used by the library.
// Both write every output entry from a fixed summation order, so the
// parallel kernels reproduce the serial ones bit for bit (multiply excepted,
// see below) and are independent of the thread count.

#include "sparselr/types.hpp"

namespace sparselr::kernels {

namespace serial {

/// a (x) b, left factor most significant.
Matrix kron(const Matrix& a, const Matrix& b);

/// 1_left (x) a (x) 1_right.
Matrix pad_identity(const Matrix& a, Index left, Index right);

/// Normalized partial trace of a (dimension left*mid*right) over the outer
/// factors: result_{m,m'} = sum_{l,r} a_{(l,m,r),(l,m',r)} / (left*right).
Matrix trace_outer(const Matrix& a, Index left, Index mid, Index right);

/// a_{mn} <- exp(i t (e_m - e_n)) a_{mn}.
void apply_phases(Matrix& a, const RealVector& eigenvalues, double t);

Matrix multiply(const Matrix& a, const Matrix& b);

}  // namespace serial

namespace parallel {

Matrix kron(const Matrix& a, const Matrix& b);
Matrix pad_identity(const Matrix& a, Index left, Index right);
Matrix trace_outer(const Matrix& a, Index left, Index mid, Index right);
void apply_phases(Matrix& a, const RealVector& eigenvalues, double t);

/// Row-panel GEMM with a fixed panel height. Results are identical for every
/// thread count; they agree with serial::multiply to rounding only, since the
/// panel split can change Eigen's internal blocking.
Matrix multiply(const Matrix& a, const Matrix& b);

inline constexpr Index kPanelRows = 64;

}  // namespace parallel

}  // namespace sparselr::kernels
