// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "flmor/evaluation.hpp"
#include "flmor/generators.hpp"
#include "flmor/rng.hpp"
#include "flmor/system.hpp"
#include "flmor/tsia.hpp"

using namespace flmor;

namespace {

MatX random_dense(Index rows, Index cols, Rng &rng) {
  MatX m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

double biorth_defect(const ProjectionPair &pair) {
  const Index r = pair.v.cols();
  const double scale = std::max(pair.v.norm() * pair.w.norm(), 1.0);
  return (pair.w.transpose() * pair.v - MatX::Identity(r, r)).norm() / scale;
}

} // namespace

TEST_CASE("initialize_projection rejects r >= n") {
  CHECK_THROWS_AS(initialize_projection(10, 10, 1), ValidationError);
  CHECK_THROWS_AS(initialize_projection(10, 0, 1), ValidationError);
}

TEST_CASE("initialize_projection is deterministic and biorthonormal") {
  const ProjectionPair a = initialize_projection(20, 4, 3);
  const ProjectionPair b = initialize_projection(20, 4, 3);
  CHECK((a.v - b.v).norm() == 0.0);
  CHECK((a.w - b.w).norm() == 0.0);
  CHECK(biorth_defect(a) <= 1e-12);
  CHECK(a.biorthonormalized);
}

TEST_CASE("biorthonormalize is idempotent") {
  ProjectionPair pair = initialize_projection(15, 3, 5);
  const MatX v0 = pair.v, w0 = pair.w;
  pair = biorthonormalize(std::move(pair));
  CHECK((pair.v - v0).norm() <= 1e-14 * v0.norm());
  CHECK((pair.w - w0).norm() <= 1e-13 * w0.norm());
}

TEST_CASE("biorthonormalize fixes a random full-rank pair") {
  Rng rng(44);
  ProjectionPair pair;
  pair.v = random_dense(15, 3, rng);
  pair.w = random_dense(15, 3, rng);
  pair = biorthonormalize(std::move(pair));
  CHECK(biorth_defect(pair) <= 1e-12);
}

TEST_CASE("duplicated columns break down") {
  Rng rng(45);
  ProjectionPair pair;
  pair.v = random_dense(12, 3, rng);
  pair.v.col(2) = pair.v.col(1); // rank-deficient V^T W
  pair.w = pair.v;
  CHECK_THROWS_AS(biorthonormalize(std::move(pair)), BreakdownError);
}

TEST_CASE("coordinate projection extracts the leading block") {
  const Index n = 8, r = 3;
  Rng rng(46);
  GeneralizedSystem sys;
  sys.A = random_dense(n, n, rng).sparseView();
  sys.E = SpMat(n, n);
  sys.E.setIdentity();
  sys.B = random_dense(n, 2, rng);
  sys.C = random_dense(2, n, rng);
  sys.D = MatX::Zero(2, 2);

  ProjectionPair pair;
  pair.v = MatX::Identity(n, n).leftCols(r);
  pair.w = pair.v;
  pair.biorthonormalized = true;
  const ReducedModel red = build_reduced(sys, pair);
  CHECK((red.a_hat - MatX(sys.A).topLeftCorner(r, r)).norm() <= 1e-14);
  CHECK((red.b_hat - sys.B.topRows(r)).norm() <= 1e-14);
  CHECK((red.c_hat - sys.C.leftCols(r)).norm() <= 1e-14);
  CHECK((red.d_hat - sys.D).norm() == 0.0);
}

TEST_CASE("identity projection reproduces the system") {
  const Index n = 6;
  Rng rng(47);
  GeneralizedSystem sys;
  sys.A = random_dense(n, n, rng).sparseView();
  sys.E = SpMat(n, n);
  sys.E.setIdentity();
  sys.B = random_dense(n, 1, rng);
  sys.C = random_dense(1, n, rng);
  sys.D = MatX::Zero(1, 1);

  ProjectionPair pair;
  pair.v = MatX::Identity(n, n);
  pair.w = pair.v;
  pair.biorthonormalized = true;
  const ReducedModel red = build_reduced(sys, pair);
  CHECK((red.a_hat - MatX(sys.A)).norm() <= 1e-13 * MatX(sys.A).norm());
  CHECK((red.b_hat - sys.B).norm() <= 1e-14);
  CHECK((red.c_hat - sys.C).norm() == 0.0);
}

TEST_CASE("build_reduced matches the dense inverse oracle") {
  const GeneralizedSystem sys = generate_random_stable(20, 2, 2, 0.25, 48);
  Rng rng(48);
  ProjectionPair pair;
  pair.v = random_dense(20, 4, rng);
  pair.w = random_dense(20, 4, rng);
  pair = biorthonormalize(std::move(pair));
  const ReducedModel red = build_reduced(sys, pair);
  const MatX einv_a = MatX(sys.E).partialPivLu().solve(MatX(sys.A));
  const MatX a_ref = pair.w.transpose() * einv_a * pair.v;
  CHECK((red.a_hat - a_ref).norm() <= 1e-11 * a_ref.norm());
  const MatX b_ref =
      pair.w.transpose() * MatX(sys.E).partialPivLu().solve(sys.B);
  CHECK((red.b_hat - b_ref).norm() <= 1e-11 * std::max(b_ref.norm(), 1.0));
}

TEST_CASE("build_reduced_index1 equals the eliminated construction") {
  Index1GeneratorParams prm;
  prm.seed = 49;
  prm.density = 0.3;
  const Index1System sys = generate_random_index1(6, 4, prm);
  const GeneralizedSystem elim = eliminate_algebraic(sys);
  Rng rng(50);
  ProjectionPair pair;
  pair.v = random_dense(6, 2, rng);
  pair.w = random_dense(6, 2, rng);
  pair = biorthonormalize(std::move(pair));
  const ReducedModel a = build_reduced_index1(sys, pair);
  const ReducedModel b = build_reduced(elim, pair);
  CHECK((a.a_hat - b.a_hat).norm() <= 1e-10 * b.a_hat.norm());
  CHECK((a.b_hat - b.b_hat).norm() <= 1e-10 * b.b_hat.norm());
  CHECK((a.c_hat - b.c_hat).norm() <= 1e-10 * b.c_hat.norm());
  CHECK((a.d_hat - b.d_hat).norm() <= 1e-10 * std::max(b.d_hat.norm(), 1.0));
}

TEST_CASE("scalar index-1 reduction with the identity projection") {
  Index1System sys;
  sys.E1 = SpMat(1, 1); sys.E1.insert(0, 0) = 1.0;
  sys.J1 = SpMat(1, 1); sys.J1.insert(0, 0) = -1.0;
  sys.J2 = SpMat(1, 1); sys.J2.insert(0, 0) = 1.0;
  sys.J3 = SpMat(1, 1); sys.J3.insert(0, 0) = 1.0;
  sys.J4 = SpMat(1, 1); sys.J4.insert(0, 0) = -2.0;
  sys.B1 = MatX::Ones(1, 1);
  sys.B2 = MatX::Zero(1, 1);
  sys.C1 = MatX::Ones(1, 1);
  sys.C2 = MatX::Zero(1, 1);
  sys.Da = MatX::Zero(1, 1);
  ProjectionPair pair;
  pair.v = MatX::Ones(1, 1);
  pair.w = MatX::Ones(1, 1);
  pair.biorthonormalized = true;
  const ReducedModel red = build_reduced_index1(sys, pair);
  CHECK(std::abs(red.a_hat(0, 0) + 0.5) <= 1e-14);
}

TEST_CASE("exactly reducible system is recovered to high accuracy") {
  // r-dimensional dynamics padded with unreachable stable states
  Rng rng(51);
  const Index r = 3, n = 14;
  MatX a1 = random_dense(r, r, rng);
  a1 -= (spectral_abscissa(a1) + 0.5) * MatX::Identity(r, r);
  MatX a2 = random_dense(n - r, n - r, rng);
  a2 -= (spectral_abscissa(a2) + 0.5) * MatX::Identity(n - r, n - r);
  MatX a = MatX::Zero(n, n);
  a.topLeftCorner(r, r) = a1;
  a.bottomRightCorner(n - r, n - r) = a2;
  GeneralizedSystem sys;
  sys.A = a.sparseView();
  sys.E = SpMat(n, n);
  sys.E.setIdentity();
  sys.B = MatX::Zero(n, 2);
  sys.B.topRows(r) = random_dense(r, 2, rng);
  sys.C = random_dense(2, n, rng);
  sys.D = MatX::Zero(2, 2);

  TsiaOptions opts;
  opts.tol = 1e-12;
  opts.max_iter = 100;
  opts.seed = 5;
  const TsiaResult res = tsia(sys, r, opts);
  const double xi = h2_error_norm(sys, res.model);
  // the vanishing error sits on the sqrt(eps) cancellation floor of the
  // trace formula, so compare against the system norm
  ReducedModel zero;
  zero.a_hat = MatX::Constant(1, 1, -1.0);
  zero.b_hat = MatX::Zero(1, 2);
  zero.c_hat = MatX::Zero(2, 1);
  zero.d_hat = MatX::Zero(2, 2);
  CHECK(xi <= 1e-7 * h2_error_norm(sys, zero));
  const WilsonResiduals wr = wilson_residuals(sys, res.model);
  CHECK(wr.res1 <= 1e-8);
  CHECK(wr.res2 <= 1e-8);
  CHECK(wr.res3 <= 1e-8);
}

TEST_CASE("max_iter = 0 returns the initial model with status max-iter") {
  const GeneralizedSystem sys = generate_random_stable(15, 1, 1, 0.3, 52);
  TsiaOptions opts;
  opts.max_iter = 0;
  opts.seed = 9;
  const TsiaResult res = tsia(sys, 3, opts);
  CHECK(res.report.status == TsiaStatus::kMaxIter);
  CHECK(res.report.iterations == 0);
  CHECK(res.model.r() == 3);
}

TEST_CASE("tsia runs are deterministic") {
  const GeneralizedSystem sys = generate_random_stable(18, 2, 2, 0.25, 53);
  TsiaOptions opts;
  opts.max_iter = 10;
  opts.seed = 4;
  const TsiaResult a = tsia(sys, 4, opts);
  const TsiaResult b = tsia(sys, 4, opts);
  CHECK((a.model.a_hat - b.model.a_hat).norm() == 0.0);
  CHECK(a.report.iterations == b.report.iterations);
}

TEST_CASE("unbounded sentinel band reproduces the unlimited iteration") {
  const GeneralizedSystem sys = generate_random_stable(20, 2, 2, 0.25, 54);
  TsiaOptions opts;
  opts.max_iter = 40;
  opts.seed = 11;
  const TsiaResult plain = tsia(sys, 4, opts);
  const TsiaResult sentinel =
      tsia_frequency_limited(sys, 4, FrequencyBand::unbounded(), opts);
  CHECK((plain.model.a_hat - sentinel.model.a_hat).norm() <=
        1e-8 * plain.model.a_hat.norm());
}

TEST_CASE("band-limited run reduces the band error on a modal system") {
  const GeneralizedSystem sys = generate_modal_structure(25, 2, 2, 6);
  const FrequencyBand band(0.5, 2.0);
  TsiaOptions opts;
  opts.max_iter = 40;
  opts.seed = 2;
  const TsiaResult fl = tsia_frequency_limited(sys, 14, band, opts);
  const double xi_fl = h2fl_error_norm(sys, fl.model, band);
  // reference scale: band norm of G itself (error against a null model)
  ReducedModel null_model;
  null_model.a_hat = MatX::Constant(1, 1, -1.0);
  null_model.b_hat = MatX::Zero(1, 2);
  null_model.c_hat = MatX::Zero(2, 1);
  null_model.d_hat = MatX::Zero(2, 2);
  const double scale = h2fl_error_norm(sys, null_model, band);
  CHECK(xi_fl <= 0.1 * scale);
}

TEST_CASE("degenerate band is rejected") {
  const GeneralizedSystem sys = generate_random_stable(10, 1, 1, 0.3, 55);
  CHECK_THROWS_AS(tsia_frequency_limited(sys, 2, FrequencyBand(1.0, 1.0), {}),
                  ValidationError);
}

TEST_CASE("wilson residuals vanish for an identity reduction") {
  GeneralizedSystem sys;
  sys.E = SpMat(1, 1); sys.E.insert(0, 0) = 1.0;
  sys.A = SpMat(1, 1); sys.A.insert(0, 0) = -1.0;
  sys.B = MatX::Ones(1, 1);
  sys.C = MatX::Ones(1, 1);
  sys.D = MatX::Zero(1, 1);
  ReducedModel red;
  red.a_hat = MatX::Constant(1, 1, -1.0);
  red.b_hat = MatX::Ones(1, 1);
  red.c_hat = MatX::Ones(1, 1);
  red.d_hat = MatX::Zero(1, 1);
  const WilsonResiduals wr = wilson_residuals(sys, red);
  CHECK(wr.res1 <= 1e-14);
  CHECK(wr.res2 <= 1e-14);
  CHECK(wr.res3 <= 1e-14);
}

TEST_CASE("wilson residuals of an arbitrary model are finite and positive") {
  const GeneralizedSystem sys = generate_random_stable(12, 2, 2, 0.3, 56);
  Rng rng(57);
  ReducedModel red;
  MatX a_hat = random_dense(3, 3, rng);
  a_hat -= (spectral_abscissa(a_hat) + 0.5) * MatX::Identity(3, 3);
  red.a_hat = a_hat;
  red.b_hat = random_dense(3, 2, rng);
  red.c_hat = random_dense(2, 3, rng);
  red.d_hat = MatX::Zero(2, 2);
  const WilsonResiduals wr = wilson_residuals(sys, red);
  CHECK(std::isfinite(wr.res1));
  CHECK(std::isfinite(wr.res2));
  CHECK(std::isfinite(wr.res3));
  CHECK(wr.res1 > 0.0);
}

TEST_CASE("unstable reduced model is rejected by wilson_residuals") {
  const GeneralizedSystem sys = generate_random_stable(10, 1, 1, 0.3, 58);
  ReducedModel red;
  red.a_hat = MatX::Constant(1, 1, 1.0);
  red.b_hat = MatX::Ones(1, 1);
  red.c_hat = MatX::Ones(1, 1);
  red.d_hat = MatX::Zero(1, 1);
  CHECK_THROWS_AS(wilson_residuals(sys, red), ValidationError);
}

TEST_CASE("structured and eliminated index-1 iterations coincide") {
  Index1GeneratorParams prm;
  prm.seed = 59;
  prm.density = 0.15;
  const Index1System sys = generate_random_index1(30, 20, prm);
  const GeneralizedSystem elim = eliminate_algebraic(sys);
  TsiaOptions opts;
  opts.max_iter = 25;
  opts.seed = 7;
  const TsiaResult structured = tsia(sys, 4, opts);
  const TsiaResult dense = tsia(elim, 4, opts);
  // the realizations are basis-dependent; compare poles and transfer samples
  Eigen::VectorXcd ev_s =
      Eigen::EigenSolver<MatX>(structured.model.a_hat).eigenvalues();
  Eigen::VectorXcd ev_d =
      Eigen::EigenSolver<MatX>(dense.model.a_hat).eigenvalues();
  auto by_parts = [](const Complex &x, const Complex &y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  };
  std::sort(ev_s.data(), ev_s.data() + ev_s.size(), by_parts);
  std::sort(ev_d.data(), ev_d.data() + ev_d.size(), by_parts);
  CHECK((ev_s - ev_d).norm() <= 1e-4 * ev_d.norm());
  for (double nu : {0.0, 0.5, 1.0, 3.0}) {
    const MatXc g_s = transfer_function(structured.model, Complex(0.0, nu));
    const MatXc g_d = transfer_function(dense.model, Complex(0.0, nu));
    CHECK((g_s - g_d).norm() <= 1e-6 * std::max(g_d.norm(), 1e-12));
  }
}
