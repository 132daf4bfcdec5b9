// SPDX-License-Identifier: Apache-2.0

#include "flmor/operators.hpp"

#include <string>
#include <utility>
#include <vector>

#include <Eigen/LU>

namespace flmor {

namespace {

SpMatC to_complex(const SpMat &m) { return m.cast<Complex>(); }

void check_factorization(Eigen::ComputationInfo info, const char *what) {
  if (info != Eigen::Success)
    throw SolverError(std::string(what) + ": factorization failed (singular "
                                          "or structurally deficient matrix)");
}

// Sparse complex LU factor of (A + s E) for the generalized form.
class SparseShiftedFactor final : public ShiftedFactor {
public:
  SparseShiftedFactor(const SpMat &a, const SpMat &e, Complex s) {
    SpMatC shifted = to_complex(a) + s * to_complex(e);
    shifted.makeCompressed();
    lu_.compute(shifted);
    check_factorization(lu_.info(), "shifted pencil solve");
  }
  MatXc solve(const MatXc &rhs) const override { return lu_.solve(rhs); }

private:
  Eigen::SparseLU<SpMatC> lu_;
};

// Augmented sparse factor [[J1 + s E1, J2], [J3, J4]] for the index-1 form;
// solve() takes right-hand sides of height n1 and returns the differential
// part of the augmented solution with a zero algebraic right-hand side.
class AugmentedShiftedFactor final : public ShiftedFactor {
public:
  AugmentedShiftedFactor(const Index1System &sys, Complex s)
      : n1_(sys.n1()), n2_(sys.n2()) {
    const Index n = n1_ + n2_;
    std::vector<Eigen::Triplet<Complex>> trips;
    trips.reserve(static_cast<std::size_t>(
        sys.J1.nonZeros() + sys.E1.nonZeros() + sys.J2.nonZeros() +
        sys.J3.nonZeros() + sys.J4.nonZeros()));
    auto add_block = [&](const SpMat &m, Index ro, Index co, Complex scale) {
      for (int k = 0; k < m.outerSize(); ++k)
        for (SpMat::InnerIterator it(m, k); it; ++it)
          trips.emplace_back(static_cast<int>(ro + it.row()),
                             static_cast<int>(co + it.col()),
                             scale * it.value());
    };
    add_block(sys.J1, 0, 0, 1.0);
    add_block(sys.E1, 0, 0, s);
    add_block(sys.J2, 0, n1_, 1.0);
    add_block(sys.J3, n1_, 0, 1.0);
    add_block(sys.J4, n1_, n1_, 1.0);
    SpMatC aug(n, n);
    aug.setFromTriplets(trips.begin(), trips.end());
    aug.makeCompressed();
    lu_.compute(aug);
    check_factorization(lu_.info(), "augmented index-1 solve");
  }

  MatXc solve(const MatXc &rhs) const override {
    MatXc full = MatXc::Zero(n1_ + n2_, rhs.cols());
    full.topRows(n1_) = rhs;
    const MatXc sol = lu_.solve(full);
    return sol.topRows(n1_);
  }

  MatXc solve_full(const MatXc &rhs) const { return lu_.solve(rhs); }

private:
  Index n1_, n2_;
  Eigen::SparseLU<SpMatC> lu_;
};

class DenseShiftedFactor final : public ShiftedFactor {
public:
  DenseShiftedFactor(const MatX &a, const MatX &e, Complex s)
      : lu_(MatXc(a.cast<Complex>() + s * e.cast<Complex>())) {}
  MatXc solve(const MatXc &rhs) const override { return lu_.solve(rhs); }

private:
  Eigen::PartialPivLU<MatXc> lu_;
};

} // namespace

// ---- GeneralizedOperator ----

GeneralizedOperator::GeneralizedOperator(const SpMat &A, const SpMat &E)
    : a_(A), e_(E) {
  if (a_.rows() != a_.cols() || e_.rows() != e_.cols() || a_.rows() != e_.rows())
    throw ValidationError("operator requires square A, E of equal size");
}

MatX GeneralizedOperator::solve_E(const MatX &rhs) const {
  if (!e_lu_) {
    e_lu_ = std::make_unique<Eigen::SparseLU<SpMat>>();
    e_lu_->compute(e_);
    check_factorization(e_lu_->info(), "solve with E");
  }
  return e_lu_->solve(rhs);
}

std::unique_ptr<ShiftedFactor> GeneralizedOperator::factor_shifted(Complex s) const {
  return std::make_unique<SparseShiftedFactor>(a_, e_, s);
}

std::unique_ptr<SystemOperator> GeneralizedOperator::transposed() const {
  auto op = std::make_unique<GeneralizedOperator>(SpMat(a_.transpose()),
                                                  SpMat(e_.transpose()));
  return op;
}

// ---- Index1Operator ----

Index1Operator::Index1Operator(const Index1System &sys)
    : sys_(std::make_shared<const Index1System>(sys)) {}

Index1Operator::Index1Operator(std::shared_ptr<const Index1System> sys)
    : sys_(std::move(sys)) {}

MatX Index1Operator::apply_A(const MatX &x) const {
  if (!j4_lu_) {
    j4_lu_ = std::make_unique<Eigen::SparseLU<SpMat>>();
    j4_lu_->compute(sys_->J4);
    check_factorization(j4_lu_->info(), "solve with J4");
  }
  const MatX z = j4_lu_->solve(MatX(sys_->J3 * x));
  return sys_->J1 * x - sys_->J2 * z;
}

MatX Index1Operator::solve_E(const MatX &rhs) const {
  if (!e1_lu_) {
    e1_lu_ = std::make_unique<Eigen::SparseLU<SpMat>>();
    e1_lu_->compute(sys_->E1);
    check_factorization(e1_lu_->info(), "solve with E1");
  }
  return e1_lu_->solve(rhs);
}

std::unique_ptr<ShiftedFactor> Index1Operator::factor_shifted(Complex s) const {
  return std::make_unique<AugmentedShiftedFactor>(*sys_, s);
}

std::unique_ptr<SystemOperator> Index1Operator::transposed() const {
  auto t = std::make_shared<const Index1System>(transpose_blocks(*sys_));
  return std::unique_ptr<SystemOperator>(new Index1Operator(t));
}

MatXc Index1Operator::solve_augmented(Complex s, const MatXc &rhs) const {
  AugmentedShiftedFactor factor(*sys_, s);
  return factor.solve_full(rhs);
}

// ---- DenseOperator ----

DenseOperator::DenseOperator(MatX A, MatX E) : a_(std::move(A)), e_(std::move(E)) {
  if (a_.rows() != a_.cols() || e_.rows() != e_.cols() || a_.rows() != e_.rows())
    throw ValidationError("operator requires square A, E of equal size");
}

MatX DenseOperator::solve_E(const MatX &rhs) const {
  if (!e_lu_) e_lu_ = std::make_unique<Eigen::PartialPivLU<MatX>>(e_);
  return e_lu_->solve(rhs);
}

std::unique_ptr<ShiftedFactor> DenseOperator::factor_shifted(Complex s) const {
  return std::make_unique<DenseShiftedFactor>(a_, e_, s);
}

std::unique_ptr<SystemOperator> DenseOperator::transposed() const {
  return std::make_unique<DenseOperator>(a_.transpose(), e_.transpose());
}

// ---- EffectiveSystem ----

EffectiveSystem make_effective(const GeneralizedSystem &sys) {
  EffectiveSystem eff;
  eff.op = std::make_shared<GeneralizedOperator>(sys.A, sys.E);
  eff.b = sys.B;
  eff.c = sys.C;
  eff.d = sys.D;
  return eff;
}

EffectiveSystem make_effective(const Index1System &sys) {
  Eigen::SparseLU<SpMat> j4_lu;
  j4_lu.compute(sys.J4);
  check_factorization(j4_lu.info(), "solve with J4");
  const MatX j4inv_b2 = j4_lu.solve(sys.B2);
  // C2 J4^-1 through the transposed factorization
  Eigen::SparseLU<SpMat> j4t_lu;
  j4t_lu.compute(SpMat(sys.J4.transpose()));
  check_factorization(j4t_lu.info(), "solve with J4^T");
  const MatX c2_j4inv = j4t_lu.solve(MatX(sys.C2.transpose())).transpose();

  EffectiveSystem eff;
  eff.op = std::make_shared<Index1Operator>(sys);
  eff.b = sys.B1 - sys.J2 * j4inv_b2;
  eff.c = sys.C1 - c2_j4inv * sys.J3;
  eff.d = sys.Da - sys.C2 * j4inv_b2;
  return eff;
}

EffectiveSystem make_effective(const ReducedModel &red) {
  EffectiveSystem eff;
  eff.op = std::make_shared<DenseOperator>(red.a_hat,
                                           MatX(MatX::Identity(red.r(), red.r())));
  eff.b = red.b_hat;
  eff.c = red.c_hat;
  eff.d = red.d_hat;
  return eff;
}

} // namespace flmor
