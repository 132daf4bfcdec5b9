// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flmor/config.hpp"
#include "flmor/evaluation.hpp"
#include "flmor/generators.hpp"
#include "flmor/matrix_market.hpp"
#include "flmor/operators.hpp"
#include "flmor/rng.hpp"
#include "flmor/sylvester.hpp"
#include "flmor/system.hpp"
#include "flmor/tsia.hpp"
#include "flmor/verify.hpp"

namespace {

using namespace flmor;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

double seconds_since(const std::chrono::steady_clock::time_point &t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> parts;
  std::string token;
  std::istringstream ss(s);
  while (std::getline(ss, token, sep)) parts.push_back(token);
  return parts;
}

struct LoadedModel {
  EffectiveSystem eff;
  std::string id;
};

LoadedModel load_model(const RunConfig &config) {
  int sources = 0;
  sources += config.system_manifest.empty() ? 0 : 1;
  sources += config.index1_manifest.empty() ? 0 : 1;
  sources += config.generator.empty() ? 0 : 1;
  if (sources != 1)
    throw ParseError("exactly one of system_manifest, index1_manifest, "
                     "generator must be set");

  LoadedModel model;
  if (!config.system_manifest.empty()) {
    model.eff = make_effective(load_generalized(config.system_manifest));
    model.id = std::filesystem::path(config.system_manifest)
                   .parent_path()
                   .filename()
                   .string();
    if (model.id.empty()) model.id = "system";
    return model;
  }
  if (!config.index1_manifest.empty()) {
    model.eff = make_effective(load_index1(config.index1_manifest));
    model.id = std::filesystem::path(config.index1_manifest)
                   .parent_path()
                   .filename()
                   .string();
    if (model.id.empty()) model.id = "index1";
    return model;
  }

  const auto colon = config.generator.find(':');
  if (colon == std::string::npos)
    throw ParseError("generator spec must look like kind:args");
  const std::string kind = config.generator.substr(0, colon);
  const auto args = split(config.generator.substr(colon + 1), ',');
  auto arg_int = [&](std::size_t i) {
    if (i >= args.size())
      throw ParseError("generator '" + config.generator + "': missing argument");
    return static_cast<Index>(std::stoll(args[i]));
  };
  if (kind == "triple_chain") {
    model.eff = make_effective(generate_triple_chain(arg_int(0)));
  } else if (kind == "random") {
    const double density = args.size() > 3 ? std::stod(args[3]) : 0.05;
    model.eff = make_effective(generate_random_stable(
        arg_int(0), arg_int(1), arg_int(2), density, config.seed));
  } else if (kind == "index1") {
    Index1GeneratorParams prm;
    prm.seed = config.seed;
    model.eff = make_effective(generate_random_index1(arg_int(0), arg_int(1), prm));
  } else if (kind == "modal") {
    model.eff = make_effective(
        generate_modal_structure(arg_int(0), arg_int(1), arg_int(2), config.seed));
  } else {
    throw ParseError("unknown generator kind '" + kind + "'");
  }
  std::string id = config.generator;
  for (char &ch : id)
    if (ch == ':' || ch == ',') ch = '_';
  model.id = id;
  return model;
}

TsiaOptions tsia_options(const RunConfig &config) {
  TsiaOptions opts;
  opts.tol = config.tol;
  opts.max_iter = config.max_iter;
  opts.restarts = config.restarts;
  opts.seed = config.seed;
  opts.init =
      config.init == "random" ? InitMode::kRandom : InitMode::kEigenHeuristic;
  opts.dense_cap = config.weight_cap;
  return opts;
}

const char *status_name(TsiaStatus status) {
  switch (status) {
  case TsiaStatus::kConverged: return "converged";
  case TsiaStatus::kMaxIter: return "max-iter";
  case TsiaStatus::kStagnated: return "stagnated";
  }
  return "unknown";
}

void write_tsia_report(const std::string &path, const TsiaReport &report) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "iterations = " << report.iterations << "\n";
  out << "status = " << status_name(report.status) << "\n";
  out << "best_iteration = " << report.best_iteration << "\n";
  out << "restarts_used = " << report.restarts_used << "\n";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", report.wilson.res1);
  out << "wilson_res1 = " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", report.wilson.res2);
  out << "wilson_res2 = " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", report.wilson.res3);
  out << "wilson_res3 = " << buf << "\n";
  out << "convergence_history = ";
  for (std::size_t i = 0; i < report.convergence_history.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", report.convergence_history[i]);
    out << (i ? "," : "") << buf;
  }
  out << "\n";
}

int cmd_reduce(const RunConfig &config) {
  const auto t0 = std::chrono::steady_clock::now();
  const LoadedModel model = load_model(config);
  std::map<std::string, double> timings;
  timings["load"] = seconds_since(t0);

  const FrequencyBand band = config.band();
  const auto t1 = std::chrono::steady_clock::now();
  const TsiaResult result =
      tsia_frequency_limited(model.eff, config.r, band, tsia_options(config));
  timings["reduce"] = seconds_since(t1);

  std::filesystem::create_directories(config.output_dir);
  save_reduced(config.output_dir, result.model);
  write_market(config.output_dir + "/V.mtx", result.pair.v);
  write_market(config.output_dir + "/W.mtx", result.pair.w);
  write_tsia_report(config.output_dir + "/tsia_report.txt", result.report);

  const auto t2 = std::chrono::steady_clock::now();
  ErrorNormOptions norm_opts;
  norm_opts.dense_cap = config.dense_cap;
  norm_opts.weight_cap = config.weight_cap;
  const ErrorReport report = error_report(model.eff, result.model, band,
                                          model.id, {}, norm_opts);
  timings["evaluate"] = seconds_since(t2);
  ErrorReport timed = report;
  timed.timings = timings;
  write_error_report(config.output_dir + "/error_report.txt", timed);
  write_sigma_csv(config.output_dir + "/sigma.csv", model.eff, result.model,
                  frequency_grid(band));

  std::cout << "status: " << status_name(result.report.status)
            << "  iterations: " << result.report.iterations
            << "  xi: " << timed.xi << "  xi_omega: " << timed.xi_omega << "\n";

  if (config.compare_unlimited && config.band_limited) {
    const TsiaResult unlimited = tsia_frequency_limited(
        model.eff, config.r, FrequencyBand::unbounded(), tsia_options(config));
    const ErrorReport rep_unl = error_report(
        model.eff, unlimited.model, band, model.id + "_unlimited", {}, norm_opts);
    write_error_report(config.output_dir + "/error_report_unlimited.txt", rep_unl);
    std::cout << "unlimited model on the same band: xi_omega: " << rep_unl.xi_omega
              << "\n";
  }
  return kExitOk;
}

int cmd_evaluate(const RunConfig &config) {
  if (config.reduced_manifest.empty())
    throw ParseError("evaluate requires reduced_manifest");
  const LoadedModel model = load_model(config);
  const ReducedModel red = load_reduced(config.reduced_manifest);
  const FrequencyBand band = config.band();

  ErrorNormOptions norm_opts;
  norm_opts.dense_cap = config.dense_cap;
  norm_opts.weight_cap = config.weight_cap;
  const ErrorReport report =
      error_report(model.eff, red, band, model.id, {}, norm_opts);
  std::filesystem::create_directories(config.output_dir);
  write_error_report(config.output_dir + "/error_report.txt", report);
  write_sigma_csv(config.output_dir + "/sigma.csv", model.eff, red,
                  frequency_grid(band));
  std::cout << "xi: " << report.xi << "  xi_omega: " << report.xi_omega << "\n";
  return kExitOk;
}

int cmd_verify(const std::string &level, bool flip_cross_sign) {
  const VerifyLevel lvl =
      level == "full" ? VerifyLevel::kFull : VerifyLevel::kQuick;
  const auto results = run_verification(lvl, flip_cross_sign);
  for (const auto &res : results) {
    std::cout << (res.passed ? "PASS" : "FAIL") << "  " << res.name;
    if (!res.detail.empty()) std::cout << "  " << res.detail;
    std::cout << "\n";
  }
  return all_passed(results) ? kExitOk : kExitVerifyFail;
}

int cmd_benchmark(const RunConfig &config) {
  std::filesystem::create_directories(config.output_dir);
  const std::string csv_path = config.output_dir + "/benchmark.csv";
  std::ofstream out(csv_path);
  if (!out) throw Error("cannot write " + csv_path);
  out << "n1,n2,t_dense_path,t_sparse_path\n";

  const Index r = 10;
  Rng rng(config.seed);
  MatX a_hat(r, r);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j) a_hat(i, j) = rng.normal();
  a_hat -= (spectral_abscissa(a_hat) + 0.5) * MatX::Identity(r, r);

  for (Index n1 : config.benchmark_sizes) {
    const Index n2 = static_cast<Index>(config.benchmark_n2_ratio * n1);
    Index1GeneratorParams prm;
    prm.seed = config.seed + static_cast<std::uint64_t>(n1);
    const Index1System sys = generate_random_index1(n1, n2, prm);
    MatX f(n1, r);
    for (Index i = 0; i < n1; ++i)
      for (Index j = 0; j < r; ++j) f(i, j) = rng.normal();

    const auto ts = std::chrono::steady_clock::now();
    const MatX x_sparse = solve_index1(sys, a_hat, f);
    const double t_sparse = seconds_since(ts);

    const auto td = std::chrono::steady_clock::now();
    const GeneralizedSystem elim =
        eliminate_algebraic(sys, n1 + n2 + 1); // no cap for the benchmark
    DenseOperator op(MatX(elim.A), MatX(elim.E));
    const MatX x_dense = solve_semi_generalized(op, a_hat, f);
    const double t_dense = seconds_since(td);

    const double agreement =
        (x_sparse - x_dense).norm() / std::max(x_dense.norm(), 1e-300);
    out << n1 << "," << n2 << "," << t_dense << "," << t_sparse << "\n";
    std::cout << "n1=" << n1 << " n2=" << n2 << "  dense " << t_dense
              << " s  sparse " << t_sparse << " s  (agreement " << agreement
              << ")\n";
  }
  std::cout << "wrote " << csv_path << "\n";
  return kExitOk;
}

RunConfig assemble_config(const std::string &config_path,
                          const std::vector<std::string> &overrides) {
  RunConfig config;
  if (!config_path.empty()) config = load_config(config_path);
  for (const auto &assignment : overrides) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
      throw ParseError("override must look like key=value: " + assignment);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    apply_config_entry(config, trim(assignment.substr(0, eq)),
                       trim(assignment.substr(eq + 1)));
  }
  return config;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Frequency-limited H2 model order reduction (TSIA)"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string verify_level = "quick";
  bool flip_cross_sign = false;

  auto add_config_opts = [&](CLI::App *cmd) {
    cmd->add_option("--config", config_path, "config file (key = value lines)");
    cmd->add_option("--set", overrides,
                    "config override key=value (repeatable)");
  };

  CLI::App *reduce = app.add_subcommand("reduce", "run the TSIA reduction");
  add_config_opts(reduce);
  CLI::App *evaluate =
      app.add_subcommand("evaluate", "evaluate an existing reduced model");
  add_config_opts(evaluate);
  CLI::App *verify = app.add_subcommand("verify", "run the oracle suites");
  verify->add_option("--level", verify_level, "quick|full")
      ->check(CLI::IsMember({"quick", "full"}));
  verify->add_flag("--flip-cross-sign", flip_cross_sign,
                   "debug: mis-sign the trace formula cross term (must fail)");
  CLI::App *benchmark =
      app.add_subcommand("benchmark", "time sparse vs eliminated Sylvester solves");
  add_config_opts(benchmark);

  CLI11_PARSE(app, argc, argv);

  try {
    if (reduce->parsed()) return cmd_reduce(assemble_config(config_path, overrides));
    if (evaluate->parsed())
      return cmd_evaluate(assemble_config(config_path, overrides));
    if (verify->parsed()) return cmd_verify(verify_level, flip_cross_sign);
    if (benchmark->parsed())
      return cmd_benchmark(assemble_config(config_path, overrides));
  } catch (const ParseError &e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const StructureError &e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ValidationError &e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const CapExceededError &e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Error &e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitInput;
}
