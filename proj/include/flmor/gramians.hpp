// SPDX-License-Identifier: Apache-2.0

#ifndef FLMOR_GRAMIANS_HPP
#define FLMOR_GRAMIANS_HPP

#include "flmor/band_weights.hpp"
#include "flmor/operators.hpp"
#include "flmor/quadrature.hpp"
#include "flmor/types.hpp"

namespace flmor {

// Unlimited controllability Gramian: A P E^T + E P A^T + b b^T = 0.
// The observability Gramian is the same equation on the transposed
// operator with b = C^T.
MatX lyapunov_gramian(const SystemOperator &op, const MatX &b);

// Band-limited Gramian A P E^T + E P A^T + W b b^T + b b^T W^T = 0, given
// the precomputed weight action gb = W b.
MatX fl_gramian(const SystemOperator &op, const MatX &gb, const MatX &b);

// Convenience routes on a sparse pencil, forming the weight by the dense
// matrix logarithm (capped). The observability variant works on the
// transposed pencil, so it returns Q with A^T Q E + E^T Q A + W_c^T C^T C
// + C^T C W_c = 0.
MatX fl_controllability_gramian(const SpMat &a, const SpMat &e, const MatX &b,
                                const FrequencyBand &band, Index dense_cap = 600);
MatX fl_observability_gramian(const SpMat &a, const SpMat &e, const MatX &c,
                              const FrequencyBand &band, Index dense_cap = 600);

// Band-limited Gramian of a reduced model (identity descriptor):
// A_hat P + P A_hat^T + W_hat b_hat b_hat^T + b_hat b_hat^T W_hat^T = 0.
// Handles the unbounded band (W_hat = I/2, i.e. the plain Gramian).
MatX fl_reduced_gramian(const MatX &a_hat, const MatX &b_hat,
                        const FrequencyBand &band);

// Independent oracle: P = (1/pi) int_w1^w2 Re(H(nu) H(nu)^H) d nu with
// H(nu) = (i nu E - A)^-1 b, by adaptive quadrature. Requires a bounded
// band and is guarded by a size cap.
MatX fl_gramian_quadrature(const SystemOperator &op, const FrequencyBand &band,
                           const MatX &b, const QuadratureOptions &opts = {},
                           Index cap = 200);

} // namespace flmor

#endif
