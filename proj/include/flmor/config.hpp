// SPDX-License-Identifier: Apache-2.0

#ifndef FLMOR_CONFIG_HPP
#define FLMOR_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "flmor/types.hpp"

namespace flmor {

// Plain-text key = value run configuration. A run is reproducible from the
// config plus its input files; every field has a serializable textual form.
struct RunConfig {
  // Model source: exactly one of manifest paths or a generator spec.
  std::string system_manifest;  // generalized system manifest
  std::string index1_manifest;  // index-1 system manifest
  // generator = triple_chain:<masses> | random:<n>,<p>,<m>[,<density>]
  //           | index1:<n1>,<n2> | modal:<modes>,<p>,<m>
  std::string generator;
  std::string reduced_manifest; // for evaluate runs

  Index r = 10;
  bool band_limited = false;
  double omega1 = 0.0;
  double omega2 = 1.0;

  double tol = 1e-6;
  Index max_iter = 50;
  int restarts = 3;
  std::uint64_t seed = 7;
  std::string init = "heuristic"; // heuristic | random

  std::string output_dir = "out";

  Index dense_cap = 2000;
  Index weight_cap = 600;
  Index elimination_cap = 2000;

  bool compare_unlimited = false; // reduce: also run the unlimited iteration
  std::vector<Index> benchmark_sizes{200, 400, 800, 1600, 2000};
  double benchmark_n2_ratio = 2.0;

  FrequencyBand band() const {
    return band_limited ? FrequencyBand(omega1, omega2)
                        : FrequencyBand::unbounded();
  }
};

// Loads `key = value` lines ('#' comments); unknown keys are an error so
// typos do not silently change behavior.
RunConfig load_config(const std::string &path);

// Applies a single assignment; shared by the file parser and CLI overrides.
void apply_config_entry(RunConfig &config, const std::string &key,
                        const std::string &value);

void write_config(const std::string &path, const RunConfig &config);

} // namespace flmor

#endif
