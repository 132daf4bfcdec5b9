// SPDX-License-Identifier: Apache-2.0

#include "flmor/gramians.hpp"

#include <string>

#include "flmor/sylvester.hpp"

namespace flmor {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

} // namespace

MatX lyapunov_gramian(const SystemOperator &op, const MatX &b) {
  if (b.rows() != op.n())
    throw ValidationError("lyapunov_gramian: factor height must equal n");
  return solve_generalized_lyapunov(op, MatX(b * b.transpose()));
}

MatX fl_gramian(const SystemOperator &op, const MatX &gb, const MatX &b) {
  if (gb.rows() != op.n() || gb.cols() != b.cols() || b.rows() != op.n())
    throw ValidationError("fl_gramian: gb and b must be n x p");
  return solve_generalized_lyapunov(op, fl_rhs_full(gb, b));
}

MatX fl_controllability_gramian(const SpMat &a, const SpMat &e, const MatX &b,
                                const FrequencyBand &band, Index dense_cap) {
  const BandWeights w = band_weights(a, e, band, dense_cap);
  GeneralizedOperator op(a, e);
  return fl_gramian(op, MatX(real_weight(w.b) * b), b);
}

MatX fl_observability_gramian(const SpMat &a, const SpMat &e, const MatX &c,
                              const FrequencyBand &band, Index dense_cap) {
  const SpMat at = a.transpose();
  const SpMat et = e.transpose();
  return fl_controllability_gramian(at, et, c.transpose(), band, dense_cap);
}

MatX fl_reduced_gramian(const MatX &a_hat, const MatX &b_hat,
                        const FrequencyBand &band) {
  const MatX w_hat = real_weight(reduced_band_weight(a_hat, band));
  return solve_dense_lyapunov(a_hat, fl_rhs_reduced(w_hat, b_hat));
}

MatX fl_gramian_quadrature(const SystemOperator &op, const FrequencyBand &band,
                           const MatX &b, const QuadratureOptions &opts,
                           Index cap) {
  if (band.is_unbounded())
    throw ValidationError("quadrature Gramian oracle requires a bounded band");
  if (op.n() > cap)
    throw CapExceededError("quadrature Gramian oracle capped at n <= " +
                           std::to_string(cap));
  if (b.rows() != op.n())
    throw ValidationError("fl_gramian_quadrature: factor height must equal n");
  const Index n = op.n();
  if (band.is_degenerate()) return MatX::Zero(n, n);

  const MatXc bc = b.cast<Complex>();
  auto integrand = [&](double nu) -> MatX {
    const auto factor = op.factor_shifted(Complex(0.0, -nu));
    const MatXc h = factor->solve(bc); // -(i nu E - A)^-1 b; sign cancels
    return (h * h.adjoint()).real();
  };
  const MatX integral = integrate_gauss_kronrod<MatX>(
      integrand, band.omega1(), band.omega2(), opts);
  return (1.0 / kPi) * integral;
}

} // namespace flmor
