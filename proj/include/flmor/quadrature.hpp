// SPDX-License-Identifier: Apache-2.0

#ifndef FLMOR_QUADRATURE_HPP
#define FLMOR_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "flmor/errors.hpp"

namespace flmor {

// Adaptive Gauss-Kronrod 7-15 quadrature for matrix/vector valued
// integrands. Intervals are processed in a deterministic worst-first order
// and the final sum is accumulated in interval order, so results are
// bit-reproducible for a given integrand.
//
// Value must support: Value::Zero-like construction via f(a) * 0.0 is not
// assumed; instead the caller's Value must support operator+, operator-,
// scalar multiplication by double, and a .norm() member (Eigen types do).

namespace gk {

// Kronrod 15 nodes (nonnegative half; symmetric) and weights, plus the
// embedded Gauss 7 weights on the same node subset.
constexpr double kNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
constexpr double kWeightsK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWeightsG[4] = {  // at kNodes[1], kNodes[3], kNodes[5], kNodes[7]
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

} // namespace gk

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  std::size_t max_intervals = 2000;
};

struct QuadratureStats {
  std::size_t evaluations = 0;
  std::size_t intervals = 0;
  double error_estimate = 0.0;
};

template <typename Value, typename F>
Value integrate_gauss_kronrod(const F &f, double a, double b,
                              const QuadratureOptions &opts = {},
                              QuadratureStats *stats = nullptr) {
  struct Segment {
    double a, b;
    Value integral;
    double error;
  };

  auto eval_segment = [&](double sa, double sb) -> Segment {
    const double h = 0.5 * (sb - sa);
    const double c = 0.5 * (sa + sb);
    Value fk = f(c) * gk::kWeightsK[7];
    Value fg = f(c) * gk::kWeightsG[3];
    for (int i = 0; i < 7; ++i) {
      const Value lo = f(c - h * gk::kNodes[i]);
      const Value hi = f(c + h * gk::kNodes[i]);
      fk += (lo + hi) * gk::kWeightsK[i];
      if (i % 2 == 1) fg += (lo + hi) * gk::kWeightsG[i / 2];
    }
    if (stats) stats->evaluations += 15;
    Segment s{sa, sb, fk * h, 0.0};
    s.error = (Value((fk - fg) * h)).norm();
    return s;
  };

  std::vector<Segment> segs;
  segs.push_back(eval_segment(a, b));

  auto total_error = [&]() {
    double e = 0.0;
    for (const auto &s : segs) e += s.error;
    return e;
  };
  auto total_norm = [&]() {
    double v = 0.0;
    for (const auto &s : segs) v += s.integral.norm();
    return v;
  };

  while (total_error() > std::max(opts.abs_tol, opts.rel_tol * total_norm())) {
    if (segs.size() >= opts.max_intervals)
      throw AccuracyError("adaptive quadrature did not reach the requested "
                          "tolerance within the interval budget",
                          total_error());
    // split the worst interval (first among ties for determinism)
    std::size_t worst = 0;
    for (std::size_t i = 1; i < segs.size(); ++i)
      if (segs[i].error > segs[worst].error) worst = i;
    const Segment old = segs[worst];
    const double mid = 0.5 * (old.a + old.b);
    segs[worst] = eval_segment(old.a, mid);
    segs.push_back(eval_segment(mid, old.b));
  }

  // deterministic accumulation in left-to-right interval order
  std::vector<std::size_t> order(segs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return segs[x].a < segs[y].a;
  });
  Value acc = segs[order[0]].integral;
  for (std::size_t i = 1; i < order.size(); ++i) acc += segs[order[i]].integral;
  if (stats) {
    stats->intervals = segs.size();
    stats->error_estimate = total_error();
  }
  return acc;
}

} // namespace flmor

#endif
