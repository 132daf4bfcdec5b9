// SPDX-License-Identifier: Apache-2.0

#ifndef FLMOR_TYPES_HPP
#define FLMOR_TYPES_HPP

#include <complex>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "flmor/errors.hpp"

namespace flmor {

using Complex = std::complex<double>;
using MatX = Eigen::MatrixXd;
using MatXc = Eigen::MatrixXcd;
using VecX = Eigen::VectorXd;
using VecXc = Eigen::VectorXcd;
using SpMat = Eigen::SparseMatrix<double>;
using SpMatC = Eigen::SparseMatrix<Complex>;
using Index = Eigen::Index;

// A frequency interval [omega1, omega2] in rad/s, always interpreted as the
// symmetric set +/-[omega1, omega2] of the imaginary axis. The unbounded
// sentinel stands for the whole axis. A degenerate band (omega1 == omega2)
// is allowed and has zero measure.
class FrequencyBand {
public:
  FrequencyBand(double omega1, double omega2)
      : omega1_(omega1), omega2_(omega2), unbounded_(false) {
    if (!(omega1 >= 0.0) || !(omega2 >= omega1)) {
      throw ValidationError("frequency band requires 0 <= omega1 <= omega2");
    }
  }

  static FrequencyBand unbounded() { return FrequencyBand(); }

  double omega1() const { return omega1_; }
  double omega2() const { return omega2_; }
  bool is_unbounded() const { return unbounded_; }
  bool is_degenerate() const { return !unbounded_ && omega1_ == omega2_; }

  // Bands compare equal iff both endpoints match exactly.
  friend bool operator==(const FrequencyBand &a, const FrequencyBand &b) {
    if (a.unbounded_ || b.unbounded_) return a.unbounded_ == b.unbounded_;
    return a.omega1_ == b.omega1_ && a.omega2_ == b.omega2_;
  }
  friend bool operator!=(const FrequencyBand &a, const FrequencyBand &b) {
    return !(a == b);
  }

private:
  FrequencyBand()
      : omega1_(0.0), omega2_(std::numeric_limits<double>::infinity()),
        unbounded_(true) {}

  double omega1_;
  double omega2_;
  bool unbounded_;
};

} // namespace flmor

#endif
