#pragma once

#include "sparselr/types.hpp"

namespace sparselr {

/// Largest singular value.
double spectral_norm(const Matrix& m);

double max_entry_norm(const Matrix& m);

/// ||m - m^dagger||_max <= tol.
bool is_hermitian(const Matrix& m, double tol = kHermitianTol);

struct SpectralDecomposition {
    RealVector eigenvalues;  // ascending
    Matrix eigenvectors;     // columns, unitary
};

/// Eigendecomposition of a Hermitian matrix. Inputs within tolerance are
/// symmetrized first; anything further from Hermitian throws.
SpectralDecomposition hermitian_eigensystem(const Matrix& h);

/// ||U diag(e) U^dagger - h||_F / ||h||_F (absolute when h = 0).
double reconstruction_residual(const SpectralDecomposition& s, const Matrix& h);

/// ab - ba.
Matrix commutator(const Matrix& a, const Matrix& b);

}  // namespace sparselr
