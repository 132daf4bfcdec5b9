// SPDX-License-Identifier: Apache-2.0

#ifndef FLMOR_MATRIX_LOG_HPP
#define FLMOR_MATRIX_LOG_HPP

#include "flmor/types.hpp"

namespace flmor {

// Principal matrix logarithm of a complex square matrix via complex Schur
// decomposition, inverse scaling (repeated triangular square roots), and a
// Gauss-Legendre Pade approximation of log(I + X). Throws BranchCutError
// when an eigenvalue lies on the closed negative real axis (including zero),
// where the principal branch is undefined.
MatXc matrix_log(const MatXc &m);

// Principal logarithm of an upper triangular matrix (Schur factor).
MatXc triangular_log(const MatXc &t);

// Upper triangular square root with eigenvalues in the right half plane,
// by the recurrence of Bjorck and Hammarling.
MatXc triangular_sqrt(const MatXc &t);

} // namespace flmor

#endif
