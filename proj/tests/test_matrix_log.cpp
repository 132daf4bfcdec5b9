// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "flmor/matrix_log.hpp"
#include "flmor/rng.hpp"

using namespace flmor;

namespace {

MatXc random_complex(Index n, std::uint64_t seed) {
  Rng rng(seed);
  MatXc m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = Complex(rng.normal(), rng.normal());
  return m;
}

} // namespace

TEST_CASE("log of the identity is zero") {
  const MatXc l = matrix_log(MatXc(MatXc::Identity(6, 6)));
  CHECK(l.norm() <= 1e-14);
}

TEST_CASE("diagonal case") {
  MatXc d = MatXc::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 0.5;
  const MatXc l = matrix_log(d);
  CHECK(std::abs(l(0, 0) - std::log(2.0)) <= 1e-14);
  CHECK(std::abs(l(1, 1) + std::log(2.0)) <= 1e-14);
  CHECK(std::abs(l(0, 1)) <= 1e-14);
}

TEST_CASE("exp round-trip on a matrix with right-half-plane spectrum") {
  // shift a random matrix so all eigenvalues have positive real part
  MatXc m = random_complex(8, 21);
  m += (m.norm() + 1.0) * MatXc::Identity(8, 8);
  const MatXc l = matrix_log(m);
  CHECK((l.exp() - m).norm() <= 1e-10 * m.norm());
}

TEST_CASE("principal branch: eigenvalue imaginary parts stay in (-pi, pi]") {
  const MatXc m = random_complex(10, 5) +
                  Complex(4.0, 0.0) * MatXc::Identity(10, 10);
  const MatXc l = matrix_log(m);
  const Eigen::ComplexEigenSolver<MatXc> es(l);
  for (Index i = 0; i < 10; ++i) {
    CHECK(es.eigenvalues()(i).imag() > -M_PI);
    CHECK(es.eigenvalues()(i).imag() <= M_PI);
  }
}

TEST_CASE("negative real eigenvalue hits the branch cut") {
  MatXc d = MatXc::Identity(3, 3);
  d(1, 1) = -2.0;
  CHECK_THROWS_AS(matrix_log(d), BranchCutError);
}

TEST_CASE("singular matrix hits the branch cut") {
  MatXc d = MatXc::Identity(3, 3);
  d(2, 2) = 0.0;
  CHECK_THROWS_AS(matrix_log(d), BranchCutError);
}

TEST_CASE("triangular square root squares back") {
  MatXc t = random_complex(7, 9).triangularView<Eigen::Upper>();
  t.diagonal().array() += Complex(3.0, 0.0);
  const MatXc r = triangular_sqrt(t);
  CHECK((r * r - t).norm() <= 1e-12 * t.norm());
  for (Index i = 0; i < 7; ++i) CHECK(r(i, i).real() > 0.0);
}
