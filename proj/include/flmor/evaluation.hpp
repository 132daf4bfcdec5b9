// SPDX-License-Identifier: Apache-2.0

#ifndef FLMOR_EVALUATION_HPP
#define FLMOR_EVALUATION_HPP

#include <map>
#include <string>
#include <vector>

#include "flmor/operators.hpp"
#include "flmor/quadrature.hpp"
#include "flmor/system.hpp"
#include "flmor/types.hpp"

namespace flmor {

struct ErrorNormOptions {
  // Trace-formula Gramians are computed densely up to this n; beyond it the
  // norms fall back to adaptive frequency quadrature of the error response.
  Index dense_cap = 2000;
  // Band weights are formed by the dense matrix logarithm up to this n.
  Index weight_cap = 600;
  QuadratureOptions quad{1e-9, 1e-14, 4000};
};

// H2 norm of the error system G - G_hat via the split trace formula
//   Xi^2 = Tr(C P C^T) - 2 Tr(C M C_hat^T) + Tr(C_hat P_hat C_hat^T).
// Requires matching feedthrough (otherwise the norm is unbounded -> error)
// and stability of both systems.
double h2_error_norm(const EffectiveSystem &eff, const ReducedModel &red,
                     const ErrorNormOptions &opts = {});
double h2_error_norm(const GeneralizedSystem &sys, const ReducedModel &red,
                     const ErrorNormOptions &opts = {});

// Band-limited H2 norm over the symmetric band, same trace structure with
// band-limited Gramians. The unbounded band reduces to h2_error_norm; a
// degenerate band gives zero.
double h2fl_error_norm(const EffectiveSystem &eff, const ReducedModel &red,
                       const FrequencyBand &band, const ErrorNormOptions &opts = {});
double h2fl_error_norm(const GeneralizedSystem &sys, const ReducedModel &red,
                       const FrequencyBand &band, const ErrorNormOptions &opts = {});

// Independent oracle: sqrt((1/pi) int_band ||G(i nu) - G_hat(i nu)||_F^2 d nu)
// by adaptive quadrature; the unbounded band integrates over [0, inf) via a
// tangent substitution.
double h2fl_error_quadrature(const EffectiveSystem &eff, const ReducedModel &red,
                             const FrequencyBand &band,
                             const QuadratureOptions &opts = {1e-10, 1e-14, 4000});

// Frequency response sample: largest singular value plus the full m x p
// matrix. A singular shifted solve is reported per point, not thrown.
struct SigmaPoint {
  double frequency = 0.0;
  double sigma = 0.0;
  MatXc response;
  bool ok = true;
  std::string message;
};

std::vector<SigmaPoint> sigma_response(const EffectiveSystem &eff,
                                       const std::vector<double> &frequencies);
std::vector<SigmaPoint> sigma_response(const GeneralizedSystem &sys,
                                       const std::vector<double> &frequencies);
std::vector<SigmaPoint> sigma_response(const Index1System &sys,
                                       const std::vector<double> &frequencies);
std::vector<SigmaPoint> sigma_response(const ReducedModel &red,
                                       const std::vector<double> &frequencies);

// Log-spaced grid resolving the band with `inside` interior points plus
// `outside` points beyond (and, when omega1 > 0, below) the band.
std::vector<double> frequency_grid(const FrequencyBand &band, Index inside = 200,
                                   Index outside = 200);

// Machine-readable record of a reduction run's error figures. xi is the
// unlimited H2 error of the model, xi_omega the band-limited error of the
// same model; for band-limited runs both interpretations of "error" are
// therefore present and labeled.
struct ErrorReport {
  std::string model_id;
  Index r = 0;
  FrequencyBand band = FrequencyBand::unbounded();
  double xi = 0.0;
  double xi_omega = 0.0;
  std::map<std::string, double> timings;
};

ErrorReport error_report(const EffectiveSystem &eff, const ReducedModel &red,
                         const FrequencyBand &band, const std::string &model_id,
                         const std::map<std::string, double> &timings = {},
                         const ErrorNormOptions &opts = {});

void write_error_report(const std::string &path, const ErrorReport &report);
ErrorReport read_error_report(const std::string &path);

// CSV columns: frequency, sigma_full, sigma_reduced, abs_error, rel_error.
// abs_error is the spectral norm of the pointwise response difference.
void write_sigma_csv(const std::string &path, const EffectiveSystem &eff,
                     const ReducedModel &red, const std::vector<double> &freqs);

} // namespace flmor

#endif
