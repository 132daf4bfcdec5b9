// SPDX-License-Identifier: Apache-2.0

#ifndef FLMOR_BAND_WEIGHTS_HPP
#define FLMOR_BAND_WEIGHTS_HPP

#include "flmor/operators.hpp"
#include "flmor/quadrature.hpp"
#include "flmor/system.hpp"
#include "flmor/types.hpp"

namespace flmor {

// Frequency-band weight matrices built from the principal matrix logarithm:
//   b = (i / 2 pi) log((A + i w2 E)(A + i w1 E)^-1)   (function of A E^-1)
//   c = (i / 2 pi) log((A + i w1 E)^-1 (A + i w2 E))  (function of E^-1 A)
// For the symmetric band +/-[w1, w2] the effective real weights are
// 2 Re(b) and 2 Re(c). The unbounded band maps to b = c = I/4 so that the
// real weight becomes I/2 and the band-limited Gramian equations reduce to
// the standard Lyapunov equations; a degenerate band gives zero weights.
struct BandWeights {
  MatXc b;
  MatXc c;
};

// Dense core computation (one complex matrix logarithm of size n).
BandWeights band_weights(const MatX &a, const MatX &e, const FrequencyBand &band);

// Densifies the sparse pencil first; guarded by a size cap since the
// logarithm costs O(n^3) with dense storage.
BandWeights band_weights(const SpMat &a, const SpMat &e, const FrequencyBand &band,
                         Index dense_cap = 600);

// Weight of a reduced model (identity descriptor): b and c coincide.
MatXc reduced_band_weight(const MatX &a_hat, const FrequencyBand &band);

// Effective real weight of the symmetric band.
inline MatX real_weight(const MatXc &w) { return 2.0 * w.real(); }

// Action of the real controllability weight on a block of columns without
// forming the weight: 2 Re((1/2 pi) int_band E (i nu E - A)^-1 x d nu) by
// adaptive quadrature, one sparse factorization per node. The action of the
// transposed observability weight (e.g. W_c^T C^T) is obtained by passing
// the transposed operator.
MatX band_weight_action(const SystemOperator &op, const FrequencyBand &band,
                        const MatX &x, const QuadratureOptions &opts = {});

// Right-hand sides of the band-limited Gramian and cross-Gramian equations,
// assembled from the precomputed actions gb = W_b B and gc = W_c^T C^T and
// the reduced weight w_hat = 2 Re(reduced_band_weight(A_hat, band)).
//
// Full controllability Lyapunov: A P E^T + E P A^T + fl_rhs_full = 0.
MatX fl_rhs_full(const MatX &gb, const MatX &b);
// Reduced Lyapunov: A_hat P + P A_hat^T + fl_rhs_reduced = 0.
MatX fl_rhs_reduced(const MatX &w_hat, const MatX &b_hat);
// Cross controllability: A M + E M A_hat^T + fl_rhs_cross_controllability = 0.
MatX fl_rhs_cross_controllability(const MatX &gb, const MatX &b,
                                  const MatX &b_hat, const MatX &w_hat);
// Cross observability: A^T N + E^T N A_hat + fl_rhs_cross_observability = 0.
MatX fl_rhs_cross_observability(const MatX &gc, const MatX &c,
                                const MatX &c_hat, const MatX &w_hat);

} // namespace flmor

#endif
