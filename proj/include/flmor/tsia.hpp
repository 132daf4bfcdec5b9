// SPDX-License-Identifier: Apache-2.0

#ifndef FLMOR_TSIA_HPP
#define FLMOR_TSIA_HPP

#include <cstdint>
#include <vector>

#include "flmor/operators.hpp"
#include "flmor/quadrature.hpp"
#include "flmor/system.hpp"
#include "flmor/types.hpp"

namespace flmor {

// Pair of projection bases V, W (n x r). When biorthonormalized,
// W^T V = I_r. In the iteration V spans the controllability cross-Gramian
// and W the E^T-scaled observability cross-Gramian, so that the reduced
// matrices W^T E^-1 A V, W^T E^-1 B realize a Petrov-Galerkin projection
// consistent with the Wilson first-order conditions.
struct ProjectionPair {
  MatX v;
  MatX w;
  bool biorthonormalized = false;
};

enum class TsiaStatus { kConverged, kMaxIter, kStagnated };

enum class InitMode { kRandom, kEigenHeuristic };

// Normalized norms of the three Wilson first-order condition residuals:
//   res1 ~ Q_hat P_hat + N^T E M,  res2 ~ Q_hat B_hat + N^T B,
//   res3 ~ C_hat P_hat - C M,
// each divided by the magnitude of its constituent terms.
struct WilsonResiduals {
  double res1 = 0.0;
  double res2 = 0.0;
  double res3 = 0.0;
};

struct TsiaOptions {
  double tol = 1e-6;
  Index max_iter = 50;
  int restarts = 3;
  std::uint64_t seed = 7;
  InitMode init = InitMode::kEigenHeuristic;
  // Iterations without best-estimate improvement before declaring stagnation.
  Index stagnation_window = 15;
  // Band weights are formed by the dense matrix logarithm up to this size;
  // beyond it the quadrature weight action is used.
  Index dense_cap = 600;
  QuadratureOptions quad;
};

struct TsiaReport {
  Index iterations = 0;
  std::vector<double> convergence_history;
  WilsonResiduals wilson;
  TsiaStatus status = TsiaStatus::kMaxIter;
  Index best_iteration = 0;
  int restarts_used = 0;
};

struct TsiaResult {
  ReducedModel model;
  ProjectionPair pair;
  TsiaReport report;
};

// Random biorthonormal pair; deterministic in the seed. Reseeds internally
// up to five times on rank deficiency before failing.
ProjectionPair initialize_projection(Index n, Index r, std::uint64_t seed);

// Resolvent-sampling start: columns of (A - i nu E)^-1 B (and the dual
// side with C^T) at frequencies inside the band.
ProjectionPair initialize_projection_heuristic(const SystemOperator &op,
                                               const MatX &b, const MatX &c,
                                               Index r, const FrequencyBand &band,
                                               std::uint64_t seed);

// Orthonormalizes v and w (spans unchanged), then replaces w by
// w (v^T w)^-T so that w^T v = I. Throws BreakdownError (with a condition
// estimate) when either basis or v^T w is numerically rank deficient.
ProjectionPair biorthonormalize(ProjectionPair pair);

// Reduced matrices A_hat = W^T E^-1 A V, B_hat = W^T E^-1 B, C_hat = C V,
// D_hat = D, with E^-1 applied by sparse solves only.
ReducedModel build_reduced(const GeneralizedSystem &sys, const ProjectionPair &pair);
ReducedModel build_reduced_index1(const Index1System &sys, const ProjectionPair &pair);
ReducedModel build_reduced(const EffectiveSystem &eff, const ProjectionPair &pair);

// Two-sided iteration for (frequency-limited) H2 model reduction. The
// unbounded band reproduces the unlimited iteration exactly (the band
// weights degenerate to I/2 and the right-hand sides to B B_hat^T, C^T C_hat).
TsiaResult tsia(const GeneralizedSystem &sys, Index r, const TsiaOptions &opts = {});
TsiaResult tsia(const Index1System &sys, Index r, const TsiaOptions &opts = {});
TsiaResult tsia_frequency_limited(const GeneralizedSystem &sys, Index r,
                                  const FrequencyBand &band,
                                  const TsiaOptions &opts = {});
TsiaResult tsia_frequency_limited(const Index1System &sys, Index r,
                                  const FrequencyBand &band,
                                  const TsiaOptions &opts = {});
TsiaResult tsia_frequency_limited(const EffectiveSystem &eff, Index r,
                                  const FrequencyBand &band,
                                  const TsiaOptions &opts = {});

// Wilson-condition diagnostics for an arbitrary (stable) reduced model of a
// stable full model. The cross terms M, N are re-solved from their Sylvester
// equations so the residuals vanish exactly at a true fixed point.
WilsonResiduals wilson_residuals(const SystemOperator &op, const MatX &b,
                                 const MatX &c, const ReducedModel &red);
WilsonResiduals wilson_residuals(const GeneralizedSystem &sys,
                                 const ReducedModel &red);
WilsonResiduals wilson_residuals(const Index1System &sys, const ReducedModel &red);

} // namespace flmor

#endif
