// SPDX-License-Identifier: Apache-2.0

#include "flmor/tsia.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "flmor/band_weights.hpp"
#include "flmor/gramians.hpp"
#include "flmor/rng.hpp"
#include "flmor/sylvester.hpp"

namespace flmor {

namespace {

constexpr double kTiny = 1e-300;

VecXc eigenvalues_of(const MatX &m) {
  Eigen::EigenSolver<MatX> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw SolverError("eigenvalue computation failed");
  return es.eigenvalues();
}

// Maximum relative change between spectra with nearest-eigenvalue pairing.
double spectral_change(const VecXc &old_eigs, const VecXc &new_eigs) {
  double metric = 0.0;
  for (Index i = 0; i < new_eigs.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < old_eigs.size(); ++j) {
      const double rel = std::abs(new_eigs(i) - old_eigs(j)) /
                         std::max(std::abs(old_eigs(j)), 1e-12);
      best = std::min(best, rel);
    }
    metric = std::max(metric, best);
  }
  return metric;
}

MatX random_matrix(Index rows, Index cols, Rng &rng) {
  MatX m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

void perturb(MatX &m, double scale, Rng &rng) {
  const double eps = scale * std::max(m.norm(), 1.0) /
                     std::sqrt(static_cast<double>(m.size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) += eps * rng.normal();
}

// Precomputed weight actions, fixed across iterations and restarts.
struct WeightActions {
  MatX gb; // W_b B, n x p
  MatX gc; // W_c^T C^T, n x m
};

WeightActions precompute_weights(const EffectiveSystem &eff,
                                 const FrequencyBand &band,
                                 const TsiaOptions &opts) {
  const SystemOperator &op = *eff.op;
  const Index n = op.n();
  WeightActions wa;
  if (band.is_unbounded()) {
    wa.gb = 0.5 * eff.b;
    wa.gc = 0.5 * eff.c.transpose();
  } else if (n <= opts.dense_cap) {
    const MatX eye = MatX::Identity(n, n);
    const BandWeights w = band_weights(op.apply_A(eye), op.apply_E(eye), band);
    wa.gb = real_weight(w.b) * eff.b;
    wa.gc = real_weight(w.c).transpose() * eff.c.transpose();
  } else {
    wa.gb = band_weight_action(op, band, eff.b, opts.quad);
    const auto op_t = op.transposed();
    wa.gc = band_weight_action(*op_t, band, MatX(eff.c.transpose()), opts.quad);
  }
  return wa;
}

// Error-estimate objective of a reduced model, up to the constant full-model
// term: -2 Tr(C M C_hat^T) + Tr(C_hat P_hat C_hat^T). Monotone in the
// (band-limited) H2 error, so usable for best-iterate selection.
double estimate_objective(const EffectiveSystem &eff, const ReducedModel &red,
                          const MatX &m_cross, const FrequencyBand &band) {
  const MatX p_hat = fl_reduced_gramian(red.a_hat, red.b_hat, band);
  const double cross = (eff.c * m_cross * red.c_hat.transpose()).trace();
  const double tail = (red.c_hat * p_hat * red.c_hat.transpose()).trace();
  return -2.0 * cross + tail;
}

// Cross-Gramian pair of the current reduced model under the band weights.
struct CrossPair {
  MatX m; // A M + E M A_hat^T + rhs_b = 0
  MatX n; // A^T N + E^T N A_hat + rhs_c = 0
};

CrossPair solve_cross(const EffectiveSystem &eff, const SystemOperator &op_t,
                      const WeightActions &wa, const ReducedModel &red,
                      const MatX &w_hat) {
  CrossPair cp;
  const MatX fb = fl_rhs_cross_controllability(wa.gb, eff.b, red.b_hat, w_hat);
  cp.m = solve_semi_generalized(*eff.op, red.a_hat, fb);
  const MatX fc = fl_rhs_cross_observability(wa.gc, eff.c, red.c_hat, w_hat);
  cp.n = solve_semi_generalized(op_t, MatX(red.a_hat.transpose()), fc);
  return cp;
}

// Band weight of the current iterate; unstable iterates can put an
// eigenvalue pair on the logarithm branch cut, in which case the pair is
// nudged until the weight exists.
MatX iterate_weight(const EffectiveSystem &eff, ProjectionPair &pair,
                    ReducedModel &red, const FrequencyBand &band, Rng &rng) {
  for (int attempt = 0; attempt < 6; ++attempt) {
    try {
      return real_weight(reduced_band_weight(red.a_hat, band));
    } catch (const BranchCutError &) {
      perturb(pair.v, 1e-8 * (attempt + 1), rng);
      pair.biorthonormalized = false;
      pair = biorthonormalize(std::move(pair));
      red = build_reduced(eff, pair);
    }
  }
  throw SolverError("band weight of the reduced iterate kept hitting the "
                    "logarithm branch cut");
}

// Synthetic stable start: conjugate pole pairs log-spaced across the band
// with random input/output maps. TSIA only needs some stable reduced model
// to seed the cross-Gramian solves, not a projection of the full system, so
// this is the fallback when the projected initial model is unstable.
ReducedModel seed_model(const EffectiveSystem &eff, Index r,
                        const FrequencyBand &band, Rng &rng) {
  double lo, hi;
  if (band.is_unbounded()) {
    lo = 1e-1;
    hi = 1e2;
  } else {
    hi = std::max(band.omega2(), 1e-8);
    lo = std::max(band.omega1(), 1e-3 * hi);
  }
  ReducedModel red;
  red.a_hat = MatX::Zero(r, r);
  const Index pairs = r / 2;
  for (Index k = 0; k < pairs; ++k) {
    const double t =
        pairs == 1 ? 0.5 : static_cast<double>(k) / static_cast<double>(pairs - 1);
    const double nu = lo * std::pow(hi / lo, t);
    red.a_hat.block(2 * k, 2 * k, 2, 2) << -0.1 * nu, nu, -nu, -0.1 * nu;
  }
  if (r % 2) red.a_hat(r - 1, r - 1) = -std::sqrt(lo * hi);
  red.b_hat = random_matrix(r, eff.b.cols(), rng);
  red.c_hat = random_matrix(eff.c.rows(), r, rng);
  red.d_hat = eff.d;
  return red;
}

TsiaResult run_once(const EffectiveSystem &eff, Index r, const FrequencyBand &band,
                    const TsiaOptions &opts, const WeightActions &wa,
                    std::uint64_t seed, bool allow_heuristic) {
  const SystemOperator &op = *eff.op;
  const auto op_t = op.transposed();
  Rng rng(seed ^ 0x9e3779b97f4a7c15ull);

  ProjectionPair pair =
      (opts.init == InitMode::kEigenHeuristic && allow_heuristic)
          ? initialize_projection_heuristic(op, eff.b, eff.c, r, band, seed)
          : initialize_projection(op.n(), r, seed);
  ReducedModel red = build_reduced(eff, pair);
  if (opts.max_iter > 0 && spectral_abscissa(red.a_hat) >= 0.0)
    red = seed_model(eff, r, band, rng);

  TsiaResult best;
  best.model = red;
  best.pair = pair;
  bool has_best = spectral_abscissa(red.a_hat) < 0.0;
  double best_obj = std::numeric_limits<double>::infinity();
  Index no_improve = 0;

  TsiaReport report;
  if (opts.max_iter == 0) {
    // degenerate budget: hand back the initial projection's model as-is
    report.status = TsiaStatus::kMaxIter;
    if (has_best) report.wilson = wilson_residuals(op, eff.b, eff.c, best.model);
    best.report = std::move(report);
    return best;
  }
  VecXc prev_eigs = eigenvalues_of(red.a_hat);

  int unstable_converged = 0;
  for (Index it = 0; it < opts.max_iter; ++it) {
    const MatX w_hat = iterate_weight(eff, pair, red, band, rng);
    const CrossPair cp = solve_cross(eff, *op_t, wa, red, w_hat);

    // estimate of the current iterate (cp.m was solved against it); only
    // stable iterates are candidates for the returned model
    if (spectral_abscissa(red.a_hat) < 0.0) {
      const double obj = estimate_objective(eff, red, cp.m, band);
      if (obj < best_obj) {
        best_obj = obj;
        best.model = red;
        best.pair = pair;
        has_best = true;
        report.best_iteration = it;
        no_improve = 0;
      } else {
        ++no_improve;
      }
    } else {
      ++no_improve;
    }

    // next iterate: V = M, W = E^T N, biorthonormalized
    ProjectionPair next;
    next.v = cp.m;
    next.w = op_t->apply_E(cp.n);
    for (int attempt = 0;; ++attempt) {
      try {
        // copy in: a failed attempt must leave `next` intact for the retry
        next = biorthonormalize(next);
        break;
      } catch (const BreakdownError &) {
        if (attempt >= 4) throw;
        perturb(next.v, 1e-6 * (attempt + 1), rng);
        perturb(next.w, 1e-6 * (attempt + 1), rng);
      }
    }
    red = build_reduced(eff, next);
    pair = std::move(next);

    const VecXc eigs = eigenvalues_of(red.a_hat);
    const double metric = spectral_change(prev_eigs, eigs);
    report.convergence_history.push_back(metric);
    prev_eigs = eigs;

    if (metric < opts.tol) {
      if (spectral_abscissa(red.a_hat) < 0.0) {
        report.status = TsiaStatus::kConverged;
        break;
      }
      // settled at an unstable fixed point: nudge away and keep going
      if (++unstable_converged > 3)
        throw SolverError("TSIA converged to an unstable fixed point");
      perturb(pair.v, 1e-4 * unstable_converged, rng);
      pair.biorthonormalized = false;
      pair = biorthonormalize(std::move(pair));
      red = build_reduced(eff, pair);
      prev_eigs = eigenvalues_of(red.a_hat);
      continue;
    }
    if (no_improve >= opts.stagnation_window) {
      report.status = TsiaStatus::kStagnated;
      break;
    }
  }
  report.iterations = static_cast<Index>(report.convergence_history.size());

  // estimate the final iterate so best-selection covers it
  if (opts.max_iter > 0 && spectral_abscissa(red.a_hat) < 0.0) {
    const MatX w_hat = iterate_weight(eff, pair, red, band, rng);
    const CrossPair cp = solve_cross(eff, *op_t, wa, red, w_hat);
    const double obj = estimate_objective(eff, red, cp.m, band);
    if (obj < best_obj) {
      best_obj = obj;
      best.model = red;
      best.pair = pair;
      has_best = true;
      report.best_iteration = report.iterations;
    }
  }
  if (!has_best)
    throw SolverError("TSIA produced no stable iterate");

  report.wilson = wilson_residuals(op, eff.b, eff.c, best.model);
  best.report = std::move(report);
  return best;
}

} // namespace

ProjectionPair initialize_projection(Index n, Index r, std::uint64_t seed) {
  if (r < 1 || r >= n)
    throw ValidationError("initialize_projection requires 1 <= r < n");
  Rng rng(seed);
  for (int attempt = 0; attempt < 5; ++attempt) {
    ProjectionPair pair;
    pair.v = random_matrix(n, r, rng);
    pair.w = random_matrix(n, r, rng);
    try {
      return biorthonormalize(std::move(pair));
    } catch (const BreakdownError &) {
      continue;
    }
  }
  throw BreakdownError("random projection initialization kept producing "
                       "rank-deficient pairs",
                       std::numeric_limits<double>::infinity());
}

ProjectionPair initialize_projection_heuristic(const SystemOperator &op,
                                               const MatX &b, const MatX &c,
                                               Index r, const FrequencyBand &band,
                                               std::uint64_t seed) {
  const Index n = op.n();
  if (r < 1 || r >= n)
    throw ValidationError("initialize_projection requires 1 <= r < n");
  Rng rng(seed);

  double lo, hi;
  if (band.is_unbounded()) {
    lo = 1e-1;
    hi = 1e2;
  } else {
    hi = std::max(band.omega2(), 1e-8);
    lo = std::max(band.omega1(), 1e-3 * hi);
  }

  auto sample_side = [&](const SystemOperator &side_op, const MatX &rhs) {
    const Index p = rhs.cols();
    const Index k = (r + 2 * p - 1) / (2 * p); // frequencies needed
    MatX cols(n, 2 * p * k);
    for (Index i = 0; i < k; ++i) {
      const double t = k == 1 ? 0.5 : static_cast<double>(i) / (k - 1);
      const double nu = lo * std::pow(hi / lo, t);
      const auto factor = side_op.factor_shifted(Complex(0.0, -nu));
      const MatXc x = factor->solve(rhs.cast<Complex>());
      cols.middleCols(2 * p * i, p) = x.real();
      cols.middleCols(2 * p * i + p, p) = x.imag();
    }
    // guard against zero columns (nu = 0 gives a vanishing imaginary part)
    for (Index j = 0; j < cols.cols(); ++j)
      if (cols.col(j).norm() < 1e-14) cols.col(j) = random_matrix(n, 1, rng);
    const Eigen::HouseholderQR<MatX> qr(cols);
    const MatX q = qr.householderQ() * MatX::Identity(n, cols.cols());
    return MatX(q.leftCols(r));
  };

  ProjectionPair pair;
  pair.v = sample_side(op, b);
  const auto op_t = op.transposed();
  const MatX dual = sample_side(*op_t, MatX(c.transpose()));
  pair.w = op_t->apply_E(dual);
  for (int attempt = 0; attempt < 5; ++attempt) {
    try {
      return biorthonormalize(pair); // copy in: keep `pair` for the retry
    } catch (const BreakdownError &) {
      perturb(pair.v, 1e-6 * (attempt + 1), rng);
      perturb(pair.w, 1e-6 * (attempt + 1), rng);
    }
  }
  // fall back to a purely random pair
  return initialize_projection(n, r, seed + 1);
}

ProjectionPair biorthonormalize(ProjectionPair pair) {
  if (pair.v.rows() != pair.w.rows() || pair.v.cols() != pair.w.cols())
    throw ValidationError("projection pair shapes must match");
  if (pair.v.size() == 0)
    throw ValidationError("projection pair must be nonempty");
  const Index r = pair.v.cols();
  // Orthonormalize each basis first (spans unchanged): the conditioning of
  // W^T V then reflects the subspace angles instead of the incidental basis
  // scaling, which for near-rank-deficient iterates squares into the product.
  auto orthonormalize = [r](const MatX &m) {
    const Eigen::HouseholderQR<MatX> qr(m);
    MatX q = qr.householderQ() * MatX::Identity(m.rows(), r);
    double dmax = 0.0;
    for (Index j = 0; j < r; ++j)
      dmax = std::max(dmax, std::abs(qr.matrixQR()(j, j)));
    for (Index j = 0; j < r; ++j) {
      const double d = qr.matrixQR()(j, j);
      if (!(std::abs(d) > 1e-13 * std::max(dmax, kTiny)))
        throw BreakdownError("projection basis numerically rank deficient",
                             dmax / std::max(std::abs(d), kTiny));
      if (d < 0.0) q.col(j) = -q.col(j); // fix signs so the map is idempotent
    }
    return q;
  };
  pair.v = orthonormalize(pair.v);
  pair.w = orthonormalize(pair.w);
  {
    const MatX g = pair.v.transpose() * pair.w;
    const Eigen::JacobiSVD<MatX> svd(g);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (!(smin > 1e-13 * std::max(smax, kTiny)))
      throw BreakdownError("V^T W numerically singular in biorthonormalization",
                           smax / std::max(smin, kTiny));
  }
  // w <- w (v^T w)^-1 so that w^T v = I. When v^T w is ill conditioned a
  // single solve leaves an O(eps * cond) defect, so re-normalize against the
  // nearly-identity product until the invariant holds.
  for (int pass = 0; pass < 4; ++pass) {
    const MatX g = pair.v.transpose() * pair.w;
    if ((g - MatX::Identity(r, r)).norm() <= 1e-13 * std::sqrt(double(r))) break;
    pair.w = g.transpose().partialPivLu().solve(pair.w.transpose()).transpose();
  }
  pair.biorthonormalized = true;
  return pair;
}

ReducedModel build_reduced(const EffectiveSystem &eff, const ProjectionPair &pair) {
  if (!pair.biorthonormalized)
    throw ValidationError("build_reduced requires a biorthonormalized pair");
  const SystemOperator &op = *eff.op;
  if (pair.v.rows() != op.n())
    throw ValidationError("projection pair height must equal n");
  ReducedModel red;
  const MatX y = op.solve_E(op.apply_A(pair.v));
  red.a_hat = pair.w.transpose() * y;
  red.b_hat = pair.w.transpose() * op.solve_E(eff.b);
  red.c_hat = eff.c * pair.v;
  red.d_hat = eff.d;
  return red;
}

ReducedModel build_reduced(const GeneralizedSystem &sys, const ProjectionPair &pair) {
  return build_reduced(make_effective(sys), pair);
}

ReducedModel build_reduced_index1(const Index1System &sys,
                                  const ProjectionPair &pair) {
  return build_reduced(make_effective(sys), pair);
}

TsiaResult tsia_frequency_limited(const EffectiveSystem &eff, Index r,
                                  const FrequencyBand &band,
                                  const TsiaOptions &opts) {
  if (r < 1 || r >= eff.op->n())
    throw ValidationError("tsia requires 1 <= r < n");
  if (band.is_degenerate())
    throw ValidationError("tsia requires a band of positive measure");

  const WeightActions wa = precompute_weights(eff, band, opts);
  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt <= opts.restarts; ++attempt) {
    const std::uint64_t seed = opts.seed + 1000003ull * attempt;
    try {
      TsiaResult result =
          run_once(eff, r, band, opts, wa, seed, /*allow_heuristic=*/attempt == 0);
      result.report.restarts_used = attempt;
      return result;
    } catch (const BreakdownError &e) {
      last_error = e.what();
    } catch (const SolverError &e) {
      last_error = e.what();
    }
  }
  throw SolverError("TSIA failed after " + std::to_string(opts.restarts + 1) +
                    " attempts: " + last_error);
}

TsiaResult tsia_frequency_limited(const GeneralizedSystem &sys, Index r,
                                  const FrequencyBand &band,
                                  const TsiaOptions &opts) {
  return tsia_frequency_limited(make_effective(sys), r, band, opts);
}

TsiaResult tsia_frequency_limited(const Index1System &sys, Index r,
                                  const FrequencyBand &band,
                                  const TsiaOptions &opts) {
  return tsia_frequency_limited(make_effective(sys), r, band, opts);
}

TsiaResult tsia(const GeneralizedSystem &sys, Index r, const TsiaOptions &opts) {
  return tsia_frequency_limited(sys, r, FrequencyBand::unbounded(), opts);
}

TsiaResult tsia(const Index1System &sys, Index r, const TsiaOptions &opts) {
  return tsia_frequency_limited(sys, r, FrequencyBand::unbounded(), opts);
}

WilsonResiduals wilson_residuals(const SystemOperator &op, const MatX &b,
                                 const MatX &c, const ReducedModel &red) {
  if (spectral_abscissa(red.a_hat) >= 0.0)
    throw ValidationError("Wilson residuals require a stable reduced model");

  const MatX m = solve_semi_generalized(op, red.a_hat,
                                        MatX(b * red.b_hat.transpose()));
  const auto op_t = op.transposed();
  const MatX n_cross = solve_semi_generalized(
      *op_t, MatX(red.a_hat.transpose()),
      MatX(-c.transpose() * red.c_hat));
  const MatX p_hat =
      solve_dense_lyapunov(red.a_hat, MatX(red.b_hat * red.b_hat.transpose()));
  const MatX q_hat = solve_dense_lyapunov(
      MatX(red.a_hat.transpose()), MatX(red.c_hat.transpose() * red.c_hat));

  auto normalized = [](const MatX &x, const MatX &y) {
    return (x + y).norm() / std::max({x.norm(), y.norm(), kTiny});
  };
  WilsonResiduals res;
  res.res1 = normalized(q_hat * p_hat,
                        MatX(n_cross.transpose() * op.apply_E(m)));
  res.res2 = normalized(q_hat * red.b_hat, MatX(n_cross.transpose() * b));
  res.res3 = normalized(red.c_hat * p_hat, MatX(-c * m));
  return res;
}

WilsonResiduals wilson_residuals(const GeneralizedSystem &sys,
                                 const ReducedModel &red) {
  const EffectiveSystem eff = make_effective(sys);
  return wilson_residuals(*eff.op, eff.b, eff.c, red);
}

WilsonResiduals wilson_residuals(const Index1System &sys, const ReducedModel &red) {
  const EffectiveSystem eff = make_effective(sys);
  return wilson_residuals(*eff.op, eff.b, eff.c, red);
}

} // namespace flmor
