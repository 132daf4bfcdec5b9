// SPDX-License-Identifier: Apache-2.0

#include "flmor/sylvester.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace flmor {

namespace {

MatXc apply_E_complex(const SystemOperator &op, const MatXc &x) {
  return op.apply_E(x.real()) + Complex(0.0, 1.0) * op.apply_E(x.imag());
}

MatXc apply_A_complex(const SystemOperator &op, const MatXc &x) {
  return op.apply_A(x.real()) + Complex(0.0, 1.0) * op.apply_A(x.imag());
}

// Factor cache reusing exactly repeated shifts and exact conjugates
// (for real A, E: (A + conj(s) E)^-1 b = conj((A + s E)^-1 conj(b))).
class ShiftCache {
public:
  explicit ShiftCache(const SystemOperator &op) : op_(op) {}

  VecXc solve(Complex s, const VecXc &rhs) {
    for (const auto &[shift, factor] : factors_) {
      if (shift == s) return factor->solve(rhs);
      if (std::conj(shift) == s) return factor->solve(rhs.conjugate()).conjugate();
    }
    factors_.emplace_back(s, op_.factor_shifted(s));
    return factors_.back().second->solve(rhs);
  }

private:
  const SystemOperator &op_;
  std::vector<std::pair<Complex, std::unique_ptr<ShiftedFactor>>> factors_;
};

void check_square(const MatX &m, const char *name) {
  if (m.rows() != m.cols())
    throw ValidationError(std::string(name) + " must be square");
}

} // namespace

SchurForm schur_decompose(const MatX &m) {
  check_square(m, "Schur input");
  Eigen::ComplexSchur<MatXc> schur(m.cast<Complex>());
  if (schur.info() != Eigen::Success)
    throw SolverError("complex Schur decomposition failed to converge");
  return {schur.matrixT(), schur.matrixU()};
}

MatX solve_semi_generalized(const SystemOperator &op, const MatX &a_hat,
                            const MatX &f) {
  check_square(a_hat, "A_hat");
  const Index n = op.n();
  const Index r = a_hat.rows();
  if (f.rows() != n || f.cols() != r)
    throw ValidationError("right-hand side must be n x r");
  if (r == 0) return MatX(n, 0);

  // A X + E X A_hat^T = -F with A_hat^T = U S U^H becomes, for X~ = X U and
  // F~ = F U, the triangular recurrence (A + S_jj E) x~_j = -f~_j - E sum.
  const SchurForm schur = schur_decompose(a_hat.transpose());
  const MatXc ft = f.cast<Complex>() * schur.u;
  MatXc x = MatXc::Zero(n, r);
  ShiftCache cache(op);
  for (Index j = 0; j < r; ++j) {
    VecXc rhs = -ft.col(j);
    if (j > 0) {
      VecXc acc = VecXc::Zero(n);
      for (Index k = 0; k < j; ++k) acc += schur.t(k, j) * x.col(k);
      rhs -= apply_E_complex(op, acc);
    }
    x.col(j) = cache.solve(schur.t(j, j), rhs);
  }
  return (x * schur.u.adjoint()).real();
}

MatX solve_semi_generalized(const SpMat &A, const SpMat &E, const MatX &a_hat,
                            const MatX &f) {
  GeneralizedOperator op(A, E);
  return solve_semi_generalized(op, a_hat, f);
}

MatX solve_index1(const Index1System &sys, const MatX &a_hat, const MatX &f) {
  Index1Operator op(sys);
  return solve_semi_generalized(op, a_hat, f);
}

double sylvester_residual(const SystemOperator &op, const MatX &a_hat,
                          const MatX &f, const MatX &x) {
  const MatX res = op.apply_A(x) + op.apply_E(x) * a_hat.transpose() + f;
  const double scale = std::max({f.norm(), x.norm(), 1e-300});
  return res.norm() / scale;
}

MatX solve_dense_lyapunov(const MatX &a_hat, const MatX &c) {
  check_square(a_hat, "A_hat");
  if (c.rows() != a_hat.rows() || c.cols() != a_hat.rows())
    throw ValidationError("Lyapunov right-hand side must be r x r");
  const Index r = a_hat.rows();
  if (r == 0) return c;

  // A_hat = U S U^H; with Y = U Y~ U^H the equation becomes
  // S Y~ + Y~ S^H + U^H C U = 0. S^H is lower triangular, so the columns
  // decouple when solved in descending order.
  const SchurForm schur = schur_decompose(a_hat);
  const MatXc ct = schur.u.adjoint() * c.cast<Complex>() * schur.u;
  MatXc y = MatXc::Zero(r, r);
  for (Index j = r - 1; j >= 0; --j) {
    VecXc rhs = -ct.col(j);
    for (Index k = j + 1; k < r; ++k) rhs -= std::conj(schur.t(j, k)) * y.col(k);
    MatXc shifted = schur.t;
    shifted.diagonal().array() += std::conj(schur.t(j, j));
    y.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  MatX result = (schur.u * y * schur.u.adjoint()).real();
  if (c.isApprox(c.transpose(), 1e-12))
    result = 0.5 * (result + result.transpose()).eval();
  return result;
}

MatX solve_generalized_lyapunov(const SystemOperator &op, const MatX &r) {
  const Index n = op.n();
  if (r.rows() != n || r.cols() != n)
    throw ValidationError("Lyapunov right-hand side must be n x n");
  // A P E^T + E P A^T + R = 0 is the semi-generalized equation with
  // coefficient E^-1 A and right-hand side R E^-T.
  const MatX a_dense = op.apply_A(MatX::Identity(n, n));
  const MatX einv_a = op.solve_E(a_dense);
  // F = R E^-T: solve E^T F^T = R^T through the transposed operator
  const MatX f = op.transposed()->solve_E(r.transpose()).transpose();
  MatX p = solve_semi_generalized(op, einv_a, f);
  if (r.isApprox(r.transpose(), 1e-12)) p = 0.5 * (p + p.transpose()).eval();
  return p;
}

MatX kronecker_sylvester_oracle(const MatX &a, const MatX &e, const MatX &a_hat,
                                const MatX &f, Index cap) {
  check_square(a, "A");
  check_square(e, "E");
  check_square(a_hat, "A_hat");
  const Index n = a.rows();
  const Index r = a_hat.rows();
  if (f.rows() != n || f.cols() != r)
    throw ValidationError("right-hand side must be n x r");
  if (n * r > cap)
    throw CapExceededError("Kronecker oracle requires n * r <= " +
                           std::to_string(cap));
  MatX big = MatX::Zero(n * r, n * r);
  for (Index j = 0; j < r; ++j) {
    big.block(j * n, j * n, n, n) += a;
    for (Index k = 0; k < r; ++k) big.block(j * n, k * n, n, n) += a_hat(j, k) * e;
  }
  VecX rhs(n * r);
  for (Index j = 0; j < r; ++j) rhs.segment(j * n, n) = -f.col(j);
  const VecX sol = big.partialPivLu().solve(rhs);
  MatX x(n, r);
  for (Index j = 0; j < r; ++j) x.col(j) = sol.segment(j * n, n);
  return x;
}

} // namespace flmor
