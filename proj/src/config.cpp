// SPDX-License-Identifier: Apache-2.0

#include "flmor/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace flmor {

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

long long parse_int(const std::string &key, const std::string &value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception &) {
    throw ParseError("config key '" + key + "': expected integer, got '" +
                     value + "'");
  }
}

double parse_real(const std::string &key, const std::string &value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception &) {
    throw ParseError("config key '" + key + "': expected number, got '" +
                     value + "'");
  }
}

bool parse_bool(const std::string &key, const std::string &value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ParseError("config key '" + key + "': expected boolean, got '" + value +
                   "'");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

} // namespace

void apply_config_entry(RunConfig &c, const std::string &key,
                        const std::string &value) {
  if (key == "system_manifest") c.system_manifest = value;
  else if (key == "index1_manifest") c.index1_manifest = value;
  else if (key == "generator") c.generator = value;
  else if (key == "reduced_manifest") c.reduced_manifest = value;
  else if (key == "r") c.r = parse_int(key, value);
  else if (key == "band_limited") c.band_limited = parse_bool(key, value);
  else if (key == "omega1") c.omega1 = parse_real(key, value);
  else if (key == "omega2") c.omega2 = parse_real(key, value);
  else if (key == "tol") c.tol = parse_real(key, value);
  else if (key == "max_iter") c.max_iter = parse_int(key, value);
  else if (key == "restarts") c.restarts = static_cast<int>(parse_int(key, value));
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "init") {
    if (value != "heuristic" && value != "random")
      throw ParseError("config key 'init': expected heuristic|random");
    c.init = value;
  } else if (key == "output_dir") c.output_dir = value;
  else if (key == "dense_cap") c.dense_cap = parse_int(key, value);
  else if (key == "weight_cap") c.weight_cap = parse_int(key, value);
  else if (key == "elimination_cap") c.elimination_cap = parse_int(key, value);
  else if (key == "compare_unlimited") c.compare_unlimited = parse_bool(key, value);
  else if (key == "benchmark_n2_ratio") c.benchmark_n2_ratio = parse_real(key, value);
  else if (key == "benchmark_sizes") {
    c.benchmark_sizes.clear();
    std::istringstream ss(value);
    std::string token;
    while (std::getline(ss, token, ',')) {
      token = trim(token);
      if (!token.empty()) c.benchmark_sizes.push_back(parse_int(key, token));
    }
    if (c.benchmark_sizes.empty())
      throw ParseError("config key 'benchmark_sizes': expected a size list");
  } else {
    throw ParseError("unknown config key '" + key + "'");
  }
}

RunConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open config");
  RunConfig config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected 'key = value'");
    try {
      apply_config_entry(config, trim(line.substr(0, eq)),
                         trim(line.substr(eq + 1)));
    } catch (const ParseError &e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return config;
}

void write_config(const std::string &path, const RunConfig &c) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  if (!c.system_manifest.empty()) out << "system_manifest = " << c.system_manifest << "\n";
  if (!c.index1_manifest.empty()) out << "index1_manifest = " << c.index1_manifest << "\n";
  if (!c.generator.empty()) out << "generator = " << c.generator << "\n";
  if (!c.reduced_manifest.empty()) out << "reduced_manifest = " << c.reduced_manifest << "\n";
  out << "r = " << c.r << "\n";
  out << "band_limited = " << (c.band_limited ? "true" : "false") << "\n";
  out << "omega1 = " << format_double(c.omega1) << "\n";
  out << "omega2 = " << format_double(c.omega2) << "\n";
  out << "tol = " << format_double(c.tol) << "\n";
  out << "max_iter = " << c.max_iter << "\n";
  out << "restarts = " << c.restarts << "\n";
  out << "seed = " << c.seed << "\n";
  out << "init = " << c.init << "\n";
  out << "output_dir = " << c.output_dir << "\n";
  out << "dense_cap = " << c.dense_cap << "\n";
  out << "weight_cap = " << c.weight_cap << "\n";
  out << "elimination_cap = " << c.elimination_cap << "\n";
  out << "compare_unlimited = " << (c.compare_unlimited ? "true" : "false") << "\n";
  out << "benchmark_sizes = ";
  for (std::size_t i = 0; i < c.benchmark_sizes.size(); ++i)
    out << (i ? "," : "") << c.benchmark_sizes[i];
  out << "\n";
  out << "benchmark_n2_ratio = " << format_double(c.benchmark_n2_ratio) << "\n";
}

} // namespace flmor
