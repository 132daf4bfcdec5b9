// SPDX-License-Identifier: Apache-2.0

#include "flmor/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/SVD>

#include "flmor/band_weights.hpp"
#include "flmor/gramians.hpp"
#include "flmor/sylvester.hpp"

namespace flmor {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

void check_compatible(const EffectiveSystem &eff, const ReducedModel &red) {
  if (red.p() != eff.b.cols() || red.m() != eff.c.rows())
    throw ValidationError("full and reduced models have mismatched input/"
                          "output dimensions");
  if (!(eff.d - red.d_hat).isZero(1e-14 * std::max(1.0, eff.d.norm())))
    throw ValidationError("feedthrough mismatch (D != D_hat) makes the H2 "
                          "error norm unbounded");
  if (spectral_abscissa(red.a_hat) >= 0.0)
    throw ValidationError("reduced model must be stable");
}

MatXc response_at(const EffectiveSystem &eff, double nu) {
  // G(i nu) = C (i nu E - A)^-1 B + D = -C (A - i nu E)^-1 B + D
  const auto factor = eff.op->factor_shifted(Complex(0.0, -nu));
  const MatXc x = factor->solve(eff.b.cast<Complex>());
  return -eff.c.cast<Complex>() * x + eff.d.cast<Complex>();
}

double error_energy_at(const EffectiveSystem &eff, const EffectiveSystem &red,
                       double nu) {
  return (response_at(eff, nu) - response_at(red, nu)).squaredNorm();
}

// Trace-formula norm with band-limited Gramians; band may be unbounded.
double trace_norm(const EffectiveSystem &eff, const ReducedModel &red,
                  const FrequencyBand &band, const ErrorNormOptions &opts) {
  const SystemOperator &op = *eff.op;
  const Index n = op.n();

  MatX gb;
  if (band.is_unbounded()) {
    gb = 0.5 * eff.b;
  } else if (n <= opts.weight_cap) {
    const MatX eye = MatX::Identity(n, n);
    const BandWeights w = band_weights(op.apply_A(eye), op.apply_E(eye), band);
    gb = real_weight(w.b) * eff.b;
  } else {
    gb = band_weight_action(op, band, eff.b, opts.quad);
  }

  const MatX p = fl_gramian(op, gb, eff.b);
  const MatX w_hat = real_weight(reduced_band_weight(red.a_hat, band));
  const MatX f_cross =
      fl_rhs_cross_controllability(gb, eff.b, red.b_hat, w_hat);
  const MatX m = solve_semi_generalized(op, red.a_hat, f_cross);
  const MatX p_hat = fl_reduced_gramian(red.a_hat, red.b_hat, band);

  const double full = (eff.c * p * eff.c.transpose()).trace();
  const double cross = (eff.c * m * red.c_hat.transpose()).trace();
  const double tail = (red.c_hat * p_hat * red.c_hat.transpose()).trace();
  return std::sqrt(std::max(0.0, full - 2.0 * cross + tail));
}

// Quadrature fallback above the dense cap, including the unbounded band via
// nu = tan(theta).
double quadrature_norm(const EffectiveSystem &eff, const ReducedModel &red,
                       const FrequencyBand &band, const QuadratureOptions &opts) {
  const EffectiveSystem red_eff = make_effective(red);
  using Scalar = Eigen::Matrix<double, 1, 1>;
  double value;
  if (band.is_unbounded()) {
    auto f = [&](double theta) -> Scalar {
      const double nu = std::tan(theta);
      const double jac = 1.0 + nu * nu; // d nu = sec^2 theta d theta
      Scalar s;
      s(0, 0) = error_energy_at(eff, red_eff, nu) * jac;
      return s;
    };
    // stay epsilon short of pi/2; the integrand decays like 1/nu^2 there
    value = integrate_gauss_kronrod<Scalar>(f, 0.0, 0.5 * kPi - 1e-9, opts)(0, 0);
  } else {
    auto f = [&](double nu) -> Scalar {
      Scalar s;
      s(0, 0) = error_energy_at(eff, red_eff, nu);
      return s;
    };
    value =
        integrate_gauss_kronrod<Scalar>(f, band.omega1(), band.omega2(), opts)(0, 0);
  }
  return std::sqrt(std::max(0.0, value / kPi));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

} // namespace

double h2_error_norm(const EffectiveSystem &eff, const ReducedModel &red,
                     const ErrorNormOptions &opts) {
  return h2fl_error_norm(eff, red, FrequencyBand::unbounded(), opts);
}

double h2_error_norm(const GeneralizedSystem &sys, const ReducedModel &red,
                     const ErrorNormOptions &opts) {
  return h2_error_norm(make_effective(sys), red, opts);
}

double h2fl_error_norm(const EffectiveSystem &eff, const ReducedModel &red,
                       const FrequencyBand &band, const ErrorNormOptions &opts) {
  check_compatible(eff, red);
  if (band.is_degenerate()) return 0.0;
  if (eff.op->n() > opts.dense_cap)
    return quadrature_norm(eff, red, band, opts.quad);
  return trace_norm(eff, red, band, opts);
}

double h2fl_error_norm(const GeneralizedSystem &sys, const ReducedModel &red,
                       const FrequencyBand &band, const ErrorNormOptions &opts) {
  return h2fl_error_norm(make_effective(sys), red, band, opts);
}

double h2fl_error_quadrature(const EffectiveSystem &eff, const ReducedModel &red,
                             const FrequencyBand &band,
                             const QuadratureOptions &opts) {
  check_compatible(eff, red);
  if (band.is_degenerate()) return 0.0;
  return quadrature_norm(eff, red, band, opts);
}

std::vector<SigmaPoint> sigma_response(const EffectiveSystem &eff,
                                       const std::vector<double> &frequencies) {
  std::vector<SigmaPoint> points;
  points.reserve(frequencies.size());
  for (double nu : frequencies) {
    SigmaPoint pt;
    pt.frequency = nu;
    if (!(nu >= 0.0) || !std::isfinite(nu)) {
      pt.ok = false;
      pt.message = "frequency must be finite and non-negative";
      points.push_back(std::move(pt));
      continue;
    }
    try {
      pt.response = response_at(eff, nu);
      pt.sigma = pt.response.jacobiSvd().singularValues()(0);
    } catch (const Error &e) {
      pt.ok = false;
      pt.message = e.what();
    }
    points.push_back(std::move(pt));
  }
  return points;
}

std::vector<SigmaPoint> sigma_response(const GeneralizedSystem &sys,
                                       const std::vector<double> &frequencies) {
  return sigma_response(make_effective(sys), frequencies);
}

std::vector<SigmaPoint> sigma_response(const Index1System &sys,
                                       const std::vector<double> &frequencies) {
  return sigma_response(make_effective(sys), frequencies);
}

std::vector<SigmaPoint> sigma_response(const ReducedModel &red,
                                       const std::vector<double> &frequencies) {
  return sigma_response(make_effective(red), frequencies);
}

std::vector<double> frequency_grid(const FrequencyBand &band, Index inside,
                                   Index outside) {
  std::vector<double> grid;
  auto log_points = [&](double lo, double hi, Index count) {
    for (Index i = 0; i < count; ++i) {
      const double t =
          count == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(count - 1);
      grid.push_back(lo * std::pow(hi / lo, t));
    }
  };
  if (band.is_unbounded()) {
    log_points(1e-3, 1e3, inside + outside);
  } else {
    const double hi = std::max(band.omega2(), 1e-8);
    const double lo = std::max(band.omega1(), 1e-4 * hi);
    log_points(lo, hi, inside);
    const Index below = band.omega1() > 0.0 ? outside / 2 : 0;
    if (below > 0) log_points(std::max(1e-4 * band.omega1(), 1e-12),
                              band.omega1(), below);
    log_points(hi, 1e2 * hi, outside - below);
  }
  std::sort(grid.begin(), grid.end());
  // the outside segments start at the band endpoints; drop the duplicates
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

ErrorReport error_report(const EffectiveSystem &eff, const ReducedModel &red,
                         const FrequencyBand &band, const std::string &model_id,
                         const std::map<std::string, double> &timings,
                         const ErrorNormOptions &opts) {
  ErrorReport rep;
  rep.model_id = model_id;
  rep.r = red.r();
  rep.band = band;
  rep.xi = h2_error_norm(eff, red, opts);
  rep.xi_omega = band.is_unbounded() ? rep.xi : h2fl_error_norm(eff, red, band, opts);
  rep.timings = timings;
  return rep;
}

void write_error_report(const std::string &path, const ErrorReport &report) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "model = " << report.model_id << "\n";
  out << "r = " << report.r << "\n";
  if (report.band.is_unbounded()) {
    out << "band = unbounded\n";
  } else {
    out << "band_omega1 = " << format_double(report.band.omega1()) << "\n";
    out << "band_omega2 = " << format_double(report.band.omega2()) << "\n";
  }
  out << "xi = " << format_double(report.xi) << "\n";
  out << "xi_omega = " << format_double(report.xi_omega) << "\n";
  for (const auto &[stage, seconds] : report.timings)
    out << "timing_" << stage << " = " << format_double(seconds) << "\n";
}

ErrorReport read_error_report(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open report");
  ErrorReport rep;
  double omega1 = -1.0, omega2 = -1.0;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    key = trim(key);
    value = trim(value);
    if (key == "model") rep.model_id = value;
    else if (key == "r") rep.r = std::stoll(value);
    else if (key == "band_omega1") omega1 = std::stod(value);
    else if (key == "band_omega2") omega2 = std::stod(value);
    else if (key == "xi") rep.xi = std::stod(value);
    else if (key == "xi_omega") rep.xi_omega = std::stod(value);
    else if (key.rfind("timing_", 0) == 0)
      rep.timings[key.substr(7)] = std::stod(value);
  }
  if (omega1 >= 0.0 && omega2 >= omega1) rep.band = FrequencyBand(omega1, omega2);
  return rep;
}

void write_sigma_csv(const std::string &path, const EffectiveSystem &eff,
                     const ReducedModel &red, const std::vector<double> &freqs) {
  const auto full = sigma_response(eff, freqs);
  const auto reduced = sigma_response(red, freqs);
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "frequency,sigma_full,sigma_reduced,abs_error,rel_error\n";
  for (std::size_t i = 0; i < full.size(); ++i) {
    if (!full[i].ok || !reduced[i].ok) {
      out << format_double(freqs[i]) << ",nan,nan,nan,nan\n";
      continue;
    }
    const double abs_err =
        (full[i].response - reduced[i].response).jacobiSvd().singularValues()(0);
    const double rel_err = abs_err / std::max(full[i].sigma, 1e-300);
    out << format_double(full[i].frequency) << "," << format_double(full[i].sigma)
        << "," << format_double(reduced[i].sigma) << "," << format_double(abs_err)
        << "," << format_double(rel_err) << "\n";
  }
}

} // namespace flmor
