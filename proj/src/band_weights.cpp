// SPDX-License-Identifier: Apache-2.0

#include "flmor/band_weights.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>

#include "flmor/matrix_log.hpp"

namespace flmor {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

MatXc apply_E_complex(const SystemOperator &op, const MatXc &x) {
  return op.apply_E(x.real()) + Complex(0.0, 1.0) * op.apply_E(x.imag());
}

} // namespace

BandWeights band_weights(const MatX &a, const MatX &e, const FrequencyBand &band) {
  if (a.rows() != a.cols() || e.rows() != e.cols() || a.rows() != e.rows())
    throw ValidationError("band_weights requires square A, E of equal size");
  const Index n = a.rows();
  if (band.is_unbounded()) {
    const MatXc quarter = 0.25 * MatXc::Identity(n, n);
    return {quarter, quarter};
  }
  if (band.is_degenerate())
    return {MatXc::Zero(n, n), MatXc::Zero(n, n)};

  const Complex i1(0.0, band.omega1());
  const Complex i2(0.0, band.omega2());
  const MatXc m1 = a.cast<Complex>() + i1 * e.cast<Complex>();
  const MatXc m2 = a.cast<Complex>() + i2 * e.cast<Complex>();
  Eigen::PartialPivLU<MatXc> lu1(m1);
  // m2 m1^-1 computed through the transposed solve
  const MatXc prod_b = m1.transpose()
                           .partialPivLu()
                           .solve(MatXc(m2.transpose()))
                           .transpose();
  const MatXc prod_c = lu1.solve(m2);
  const Complex scale(0.0, 1.0 / kTwoPi);
  return {scale * matrix_log(prod_b), scale * matrix_log(prod_c)};
}

BandWeights band_weights(const SpMat &a, const SpMat &e, const FrequencyBand &band,
                         Index dense_cap) {
  if (a.rows() > dense_cap)
    throw CapExceededError(
        "band_weights densifies the pencil; n = " + std::to_string(a.rows()) +
        " exceeds the cap " + std::to_string(dense_cap) +
        "; use band_weight_action for the large-scale path");
  return band_weights(MatX(a), MatX(e), band);
}

MatXc reduced_band_weight(const MatX &a_hat, const FrequencyBand &band) {
  const MatX eye = MatX::Identity(a_hat.rows(), a_hat.rows());
  return band_weights(a_hat, eye, band).b;
}

MatX band_weight_action(const SystemOperator &op, const FrequencyBand &band,
                        const MatX &x, const QuadratureOptions &opts) {
  if (x.rows() != op.n())
    throw ValidationError("band_weight_action: column height must equal n");
  if (band.is_unbounded()) return 0.5 * x;
  if (band.is_degenerate()) return MatX::Zero(x.rows(), x.cols());

  const MatXc xc = x.cast<Complex>();
  auto integrand = [&](double nu) -> MatXc {
    // E (i nu E - A)^-1 x = -E (A - i nu E)^-1 x
    const auto factor = op.factor_shifted(Complex(0.0, -nu));
    return -apply_E_complex(op, factor->solve(xc));
  };
  const MatXc integral = integrate_gauss_kronrod<MatXc>(
      integrand, band.omega1(), band.omega2(), opts);
  return (2.0 / kTwoPi) * integral.real();
}

MatX fl_rhs_full(const MatX &gb, const MatX &b) {
  return gb * b.transpose() + b * gb.transpose();
}

MatX fl_rhs_reduced(const MatX &w_hat, const MatX &b_hat) {
  const MatX wb = w_hat * b_hat;
  return wb * b_hat.transpose() + b_hat * wb.transpose();
}

MatX fl_rhs_cross_controllability(const MatX &gb, const MatX &b,
                                  const MatX &b_hat, const MatX &w_hat) {
  return gb * b_hat.transpose() + b * (w_hat * b_hat).transpose();
}

MatX fl_rhs_cross_observability(const MatX &gc, const MatX &c,
                                const MatX &c_hat, const MatX &w_hat) {
  return -(gc * c_hat + c.transpose() * (c_hat * w_hat));
}

} // namespace flmor
