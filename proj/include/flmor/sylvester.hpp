// SPDX-License-Identifier: Apache-2.0

#ifndef FLMOR_SYLVESTER_HPP
#define FLMOR_SYLVESTER_HPP

#include "flmor/operators.hpp"
#include "flmor/system.hpp"
#include "flmor/types.hpp"

namespace flmor {

// Complex Schur decomposition m = u t u^H with t upper triangular.
struct SchurForm {
  MatXc t;
  MatXc u;
};

SchurForm schur_decompose(const MatX &m);

// Solves the semi-generalized Sylvester equation
//   A X + E X A_hat^T + F = 0
// for the tall n x r matrix X, where A and E act through op (sparse,
// index-1 augmented, or dense) and A_hat is small and dense. One complex
// Schur decomposition of A_hat^T reduces the problem to r shifted solves
// (A + s_j E) x_j = rhs_j; factors are reused across exactly repeated or
// exactly conjugated shifts.
MatX solve_semi_generalized(const SystemOperator &op, const MatX &a_hat,
                            const MatX &f);

// Convenience overloads building the operator in place.
MatX solve_semi_generalized(const SpMat &A, const SpMat &E, const MatX &a_hat,
                            const MatX &f);
// Index-1 variant: each shifted solve uses the sparse augmented form
// [[J1 + s E1, J2], [J3, J4]] so the Schur complement is never formed.
// F has height n1.
MatX solve_index1(const Index1System &sys, const MatX &a_hat, const MatX &f);

// Relative residual ||A X + E X A_hat^T + F|| / max(||F||, ||X||) in the
// Frobenius norm; used by verification and tests.
double sylvester_residual(const SystemOperator &op, const MatX &a_hat,
                          const MatX &f, const MatX &x);

// Dense Lyapunov equation A_hat Y + Y A_hat^T + C = 0 via one complex Schur
// decomposition and triangular column substitution. C need not be symmetric;
// for symmetric C the result is symmetrized.
MatX solve_dense_lyapunov(const MatX &a_hat, const MatX &c);

// Generalized Lyapunov equation A P E^T + E P A^T + R = 0, reduced to the
// semi-generalized solver with A_hat = E^-1 A (dense) and F = R E^-T.
// Intended for moderate n (the right-hand side is dense n x n).
MatX solve_generalized_lyapunov(const SystemOperator &op, const MatX &r);

// Reference solver by Kronecker vectorization:
//   (I_r (x) A + A_hat (x) E) vec(X) = -vec(F).
// Dense and O((n r)^3); guarded by a cap on n * r.
MatX kronecker_sylvester_oracle(const MatX &a, const MatX &e, const MatX &a_hat,
                                const MatX &f, Index cap = 10000);

} // namespace flmor

#endif
