// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "flmor/generators.hpp"
#include "flmor/gramians.hpp"
#include "flmor/sylvester.hpp"
#include "flmor/system.hpp"

using namespace flmor;

namespace {

GeneralizedSystem scalar_system() {
  GeneralizedSystem sys;
  sys.E = SpMat(1, 1); sys.E.insert(0, 0) = 1.0;
  sys.A = SpMat(1, 1); sys.A.insert(0, 0) = -1.0;
  sys.B = MatX::Ones(1, 1);
  sys.C = MatX::Ones(1, 1);
  sys.D = MatX::Zero(1, 1);
  return sys;
}

double min_eigenvalue(const MatX &m) {
  Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (m + m.transpose()));
  return es.eigenvalues().minCoeff();
}

} // namespace

TEST_CASE("scalar band Gramian is arctan(1)/pi = 1/4") {
  const GeneralizedSystem sys = scalar_system();
  const FrequencyBand band(0.0, 1.0);
  const MatX p = fl_controllability_gramian(sys.A, sys.E, sys.B, band);
  CHECK(std::abs(p(0, 0) - 0.25) <= 1e-10);
  GeneralizedOperator op(sys.A, sys.E);
  const MatX pq = fl_gramian_quadrature(op, band, sys.B);
  CHECK(std::abs(pq(0, 0) - 0.25) <= 1e-10);
}

TEST_CASE("zero input map gives the zero Gramian") {
  const GeneralizedSystem sys = generate_random_stable(10, 1, 1, 0.3, 3);
  GeneralizedOperator op(sys.A, sys.E);
  const MatX p =
      fl_gramian_quadrature(op, FrequencyBand(0.0, 2.0), MatX::Zero(10, 1));
  CHECK(p.norm() == 0.0);
}

TEST_CASE("scalar wide band approaches the unbounded Gramian 1/2") {
  const GeneralizedSystem sys = scalar_system();
  const MatX p =
      fl_controllability_gramian(sys.A, sys.E, sys.B, FrequencyBand(0.0, 1e6));
  CHECK(std::abs(p(0, 0) - 0.5) <= 1e-5);
}

TEST_CASE("logarithm route matches the quadrature oracle") {
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const GeneralizedSystem sys =
        generate_random_stable(10 + 8 * k, 2, 2, 0.2, 900 + k);
    const FrequencyBand band(0.2 + 0.1 * k, 2.0 + 0.3 * k);
    const MatX p_log = fl_controllability_gramian(sys.A, sys.E, sys.B, band);
    GeneralizedOperator op(sys.A, sys.E);
    const MatX p_quad = fl_gramian_quadrature(op, band, sys.B);
    worst = std::max(worst, (p_log - p_quad).norm() / p_quad.norm());
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("observability Gramian matches its quadrature oracle") {
  const GeneralizedSystem sys = generate_random_stable(14, 2, 2, 0.25, 911);
  const FrequencyBand band(0.5, 3.0);
  const MatX q_log = fl_observability_gramian(sys.A, sys.E, sys.C, band);
  GeneralizedOperator op(sys.A, sys.E);
  const auto op_t = op.transposed();
  const MatX q_quad =
      fl_gramian_quadrature(*op_t, band, MatX(sys.C.transpose()));
  CHECK((q_log - q_quad).norm() <= 1e-6 * q_quad.norm());
}

TEST_CASE("Gramians are symmetric positive semidefinite") {
  const GeneralizedSystem sys = generate_random_stable(16, 2, 2, 0.25, 12);
  const MatX p =
      fl_controllability_gramian(sys.A, sys.E, sys.B, FrequencyBand(0.1, 2.0));
  CHECK((p - p.transpose()).norm() <= 1e-12 * p.norm());
  CHECK(min_eigenvalue(p) >= -1e-10 * p.norm());
}

TEST_CASE("nested bands are PSD ordered") {
  const GeneralizedSystem sys = generate_random_stable(16, 2, 2, 0.25, 13);
  const MatX p_small =
      fl_controllability_gramian(sys.A, sys.E, sys.B, FrequencyBand(0.3, 1.5));
  const MatX p_big =
      fl_controllability_gramian(sys.A, sys.E, sys.B, FrequencyBand(0.3, 5.0));
  CHECK(min_eigenvalue(p_big - p_small) >= -1e-8 * p_big.norm());
}

TEST_CASE("band Gramian converges to the unbounded Gramian") {
  const GeneralizedSystem sys = generate_random_stable(12, 2, 1, 0.3, 14);
  GeneralizedOperator op(sys.A, sys.E);
  const MatX p_inf = lyapunov_gramian(op, sys.B);
  const double abscissa = std::abs(spectral_abscissa(sys.A, sys.E));
  const MatX p_band = fl_controllability_gramian(
      sys.A, sys.E, sys.B, FrequencyBand(0.0, 1e4 * abscissa));
  CHECK((p_band - p_inf).norm() <= 1e-3 * p_inf.norm());
}

TEST_CASE("reduced Gramian handles bounded and unbounded bands") {
  MatX a_hat(2, 2);
  a_hat << -1.0, 0.5, 0.0, -2.0;
  const MatX b_hat = MatX::Ones(2, 1);
  const MatX p_unb = fl_reduced_gramian(a_hat, b_hat, FrequencyBand::unbounded());
  const MatX residual = a_hat * p_unb + p_unb * a_hat.transpose() +
                        b_hat * b_hat.transpose();
  CHECK(residual.norm() <= 1e-12);
  const MatX p_wide = fl_reduced_gramian(a_hat, b_hat, FrequencyBand(0.0, 1e7));
  CHECK((p_wide - p_unb).norm() <= 1e-4 * p_unb.norm());
}

TEST_CASE("quadrature oracle enforces its caps") {
  const GeneralizedSystem sys = generate_random_stable(10, 1, 1, 0.3, 15);
  GeneralizedOperator op(sys.A, sys.E);
  CHECK_THROWS_AS(fl_gramian_quadrature(op, FrequencyBand::unbounded(), sys.B),
                  ValidationError);
  CHECK_THROWS_AS(
      fl_gramian_quadrature(op, FrequencyBand(0.0, 1.0), sys.B, {}, 5),
      CapExceededError);
}
