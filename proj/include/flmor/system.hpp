// SPDX-License-Identifier: Apache-2.0

#ifndef FLMOR_SYSTEM_HPP
#define FLMOR_SYSTEM_HPP

#include <string>

#include "flmor/types.hpp"

namespace flmor {

// Sparse generalized LTI system  E x' = A x + B u,  y = C x + D u
// with nonsingular E and a stable pencil (A, E). Treated as immutable
// after construction; safe to share across concurrent readers.
struct GeneralizedSystem {
  SpMat E;
  SpMat A;
  MatX B;
  MatX C;
  MatX D;

  Index n() const { return A.rows(); }
  Index p() const { return B.cols(); }
  Index m() const { return C.rows(); }
};

// Index-1 descriptor system in block form:
//   E1 x' = J1 x + J2 z + B1 u
//      0 = J3 x + J4 z + B2 u
//      y = C1 x + C2 z + Da u
// with J4 nonsingular, so the algebraic variables z can be eliminated.
struct Index1System {
  SpMat E1;
  SpMat J1, J2, J3, J4;
  MatX B1, B2;
  MatX C1, C2;
  MatX Da;

  Index n1() const { return J1.rows(); }
  Index n2() const { return J4.rows(); }
  Index p() const { return B1.cols(); }
  Index m() const { return C1.rows(); }
};

// Dense reduced model x_hat' = A_hat x_hat + B_hat u, y = C_hat x_hat + D_hat u
// (identity descriptor).
struct ReducedModel {
  MatX a_hat;
  MatX b_hat;
  MatX c_hat;
  MatX d_hat;

  Index r() const { return a_hat.rows(); }
  Index p() const { return b_hat.cols(); }
  Index m() const { return c_hat.rows(); }
};

struct ValidationOptions {
  // Dense eigenvalue check of pencil stability is run only for n <= this cap.
  Index stability_cap = 500;
  bool check_stability = true;
};

// Throws StructureError / ValidationError when an invariant fails.
void validate(const GeneralizedSystem &sys, const ValidationOptions &opts = {});
void validate(const Index1System &sys, const ValidationOptions &opts = {});

// Largest real part of the generalized eigenvalues of (A, E), computed
// densely. Intended for n up to the verification cap.
double spectral_abscissa(const SpMat &A, const SpMat &E);
double spectral_abscissa(const MatX &a_hat);

bool is_stable(const ReducedModel &red);

// Eliminates the algebraic variables of an index-1 system:
//   E := E1, A := J1 - J2 J4^-1 J3, B := B1 - J2 J4^-1 B2,
//   C := C1 - C2 J4^-1 J3,          D := Da - C2 J4^-1 B2.
// The result is dense, so the call is gated behind a size cap on n1 + n2.
GeneralizedSystem eliminate_algebraic(const Index1System &sys,
                                      Index elimination_cap = 2000);

// Blockwise transpose: the index-1 realization of the transposed pencil.
Index1System transpose_blocks(const Index1System &sys);

// Transfer function G(s) = C (sE - A)^-1 B + D by dense solve (test scale).
MatXc transfer_function(const GeneralizedSystem &sys, Complex s);
MatXc transfer_function(const Index1System &sys, Complex s);
MatXc transfer_function(const ReducedModel &red, Complex s);

// Manifest-driven load/save. Roles for the generalized kind: E, A, B, C and
// optionally D; for index-1: E1, J1..J4, B1, B2, C1, C2 and optionally Da.
// A missing feedthrough defaults to zero. Loaded systems are validated.
GeneralizedSystem load_generalized(const std::string &manifest_path,
                                   const ValidationOptions &opts = {});
Index1System load_index1(const std::string &manifest_path,
                         const ValidationOptions &opts = {});
// Writes the blocks plus a "system.manifest" file into dir.
void save_generalized(const std::string &dir, const GeneralizedSystem &sys);
void save_reduced(const std::string &dir, const ReducedModel &red);
ReducedModel load_reduced(const std::string &manifest_path);

} // namespace flmor

#endif
