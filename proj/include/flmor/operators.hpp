// SPDX-License-Identifier: Apache-2.0

#ifndef FLMOR_OPERATORS_HPP
#define FLMOR_OPERATORS_HPP

#include <memory>

#include <Eigen/SparseLU>

#include "flmor/system.hpp"
#include "flmor/types.hpp"

namespace flmor {

// Factorization of a shifted pencil (A + s E), solving against complex
// right-hand sides. Implementations keep the sparse structure of the
// underlying problem (augmented solves for the index-1 form).
class ShiftedFactor {
public:
  virtual ~ShiftedFactor() = default;
  virtual MatXc solve(const MatXc &rhs) const = 0;
};

// Abstract view of the state-space operators of a system: matrix-vector
// products with A and E, solves with E and with shifted pencils (A + s E).
// All shapes refer to the dynamic (differential) dimension n; for the
// index-1 form the algebraic variables stay internal to the solves.
class SystemOperator {
public:
  virtual ~SystemOperator() = default;

  virtual Index n() const = 0;
  virtual MatX apply_A(const MatX &x) const = 0;
  virtual MatX apply_E(const MatX &x) const = 0;
  virtual MatX solve_E(const MatX &rhs) const = 0;
  // Factorization of (A + s E); the caller caches factors across columns.
  virtual std::unique_ptr<ShiftedFactor> factor_shifted(Complex s) const = 0;
  // Operator of the dual (transposed) system.
  virtual std::unique_ptr<SystemOperator> transposed() const = 0;
};

class GeneralizedOperator final : public SystemOperator {
public:
  // The referenced matrices must outlive the operator.
  GeneralizedOperator(const SpMat &A, const SpMat &E);

  Index n() const override { return a_.rows(); }
  MatX apply_A(const MatX &x) const override { return a_ * x; }
  MatX apply_E(const MatX &x) const override { return e_ * x; }
  MatX solve_E(const MatX &rhs) const override;
  std::unique_ptr<ShiftedFactor> factor_shifted(Complex s) const override;
  std::unique_ptr<SystemOperator> transposed() const override;

private:
  SpMat a_, e_;
  mutable std::unique_ptr<Eigen::SparseLU<SpMat>> e_lu_;
};

// Index-1 descriptor operator acting on the differential variables only.
// apply_A realizes x -> (J1 - J2 J4^-1 J3) x without forming the dense
// Schur complement; shifted solves use the sparse augmented form
//   [J1 + s E1, J2; J3, J4].
class Index1Operator final : public SystemOperator {
public:
  explicit Index1Operator(const Index1System &sys);

  Index n() const override { return sys_->n1(); }
  MatX apply_A(const MatX &x) const override;
  MatX apply_E(const MatX &x) const override { return sys_->E1 * x; }
  MatX solve_E(const MatX &rhs) const override;
  std::unique_ptr<ShiftedFactor> factor_shifted(Complex s) const override;
  std::unique_ptr<SystemOperator> transposed() const override;

  // Solves the full augmented system for [x; z] against stacked right-hand
  // sides of height n1 + n2 at shift s (used for transfer functions).
  MatXc solve_augmented(Complex s, const MatXc &rhs) const;

private:
  Index1Operator(std::shared_ptr<const Index1System> sys);

  std::shared_ptr<const Index1System> sys_;
  mutable std::unique_ptr<Eigen::SparseLU<SpMat>> e1_lu_;
  mutable std::unique_ptr<Eigen::SparseLU<SpMat>> j4_lu_;
};

// Dense operator over an explicit (A, E) pair; reference path for tests and
// for the dense branch of benchmarks.
class DenseOperator final : public SystemOperator {
public:
  DenseOperator(MatX A, MatX E);

  Index n() const override { return a_.rows(); }
  MatX apply_A(const MatX &x) const override { return a_ * x; }
  MatX apply_E(const MatX &x) const override { return e_ * x; }
  MatX solve_E(const MatX &rhs) const override;
  std::unique_ptr<ShiftedFactor> factor_shifted(Complex s) const override;
  std::unique_ptr<SystemOperator> transposed() const override;

private:
  MatX a_, e_;
  mutable std::unique_ptr<Eigen::PartialPivLU<MatX>> e_lu_;
};

// A system seen through its operator together with dense input/output/
// feedthrough data. For index-1 systems b, c, d are the eliminated
// B1 - J2 J4^-1 B2, C1 - C2 J4^-1 J3, Da - C2 J4^-1 B2 (dense but thin),
// while the operator keeps all A-products and solves sparse.
struct EffectiveSystem {
  std::shared_ptr<SystemOperator> op;
  MatX b;
  MatX c;
  MatX d;
};

EffectiveSystem make_effective(const GeneralizedSystem &sys);
EffectiveSystem make_effective(const Index1System &sys);
EffectiveSystem make_effective(const ReducedModel &red);

} // namespace flmor

#endif
