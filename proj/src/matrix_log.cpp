// SPDX-License-Identifier: Apache-2.0

#include "flmor/matrix_log.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace flmor {

namespace {

// 8-point Gauss-Legendre nodes/weights on [0, 1]; exact enough for
// log(I + X) once ||X|| has been scaled below ~0.3.
constexpr int kPadeOrder = 8;
constexpr double kGlNodes[kPadeOrder] = {
    0.019855071751231884, 0.101666761293186630, 0.237233795041835507,
    0.408282678752175097, 0.591717321247824903, 0.762766204958164493,
    0.898333238706813370, 0.980144928248768116};
constexpr double kGlWeights[kPadeOrder] = {
    0.050614268145188130, 0.111190517226687235, 0.156853322938943644,
    0.181341891689180991, 0.181341891689180991, 0.156853322938943644,
    0.111190517226687235, 0.050614268145188130};

// log(I + X) = sum_i w_i X (I + x_i X)^-1, valid for ||X|| < 1.
MatXc log_pade(const MatXc &x) {
  const Index n = x.rows();
  MatXc acc = MatXc::Zero(n, n);
  for (int i = 0; i < kPadeOrder; ++i) {
    const MatXc denom = MatXc::Identity(n, n) + kGlNodes[i] * x;
    acc += kGlWeights[i] * denom.partialPivLu().solve(x).eval();
  }
  return acc;
}

void check_branch(const MatXc &t) {
  for (Index i = 0; i < t.rows(); ++i) {
    const Complex lam = t(i, i);
    if (lam.real() <= 0.0 && std::abs(lam.imag()) <=
                                 1e-14 * std::max(1.0, std::abs(lam.real()))) {
      throw BranchCutError(
          "matrix logarithm undefined: eigenvalue on the closed negative "
          "real axis (lambda = " +
          std::to_string(lam.real()) + ")");
    }
  }
}

} // namespace

MatXc triangular_sqrt(const MatXc &t) {
  const Index n = t.rows();
  MatXc r = MatXc::Zero(n, n);
  for (Index i = 0; i < n; ++i) r(i, i) = std::sqrt(t(i, i));
  for (Index d = 1; d < n; ++d) {
    for (Index i = 0; i + d < n; ++i) {
      const Index j = i + d;
      Complex s = t(i, j);
      for (Index k = i + 1; k < j; ++k) s -= r(i, k) * r(k, j);
      const Complex denom = r(i, i) + r(j, j);
      if (std::abs(denom) == 0.0)
        throw BranchCutError("triangular square root breakdown: "
                             "opposite square roots on the diagonal");
      r(i, j) = s / denom;
    }
  }
  return r;
}

MatXc triangular_log(const MatXc &t) {
  check_branch(t);
  const Index n = t.rows();
  MatXc r = t;

  // inverse scaling: take square roots until R is close to the identity
  int sqrt_count = 0;
  const int max_sqrts = 60;
  while ((r - MatXc::Identity(n, n)).norm() > 0.25 && sqrt_count < max_sqrts) {
    r = triangular_sqrt(r);
    ++sqrt_count;
  }
  if (sqrt_count == max_sqrts)
    throw SolverError("matrix logarithm: inverse scaling did not converge");

  MatXc l = log_pade(MatXc(r - MatXc::Identity(n, n)));
  return std::ldexp(1.0, sqrt_count) * l;
}

MatXc matrix_log(const MatXc &m) {
  if (m.rows() != m.cols()) throw ValidationError("matrix_log: matrix not square");
  if (m.rows() == 0) return m;
  Eigen::ComplexSchur<MatXc> schur(m);
  if (schur.info() != Eigen::Success)
    throw SolverError("matrix_log: complex Schur decomposition failed");
  const MatXc l = triangular_log(schur.matrixT());
  return schur.matrixU() * l * schur.matrixU().adjoint();
}

} // namespace flmor
