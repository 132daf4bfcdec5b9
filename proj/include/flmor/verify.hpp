// SPDX-License-Identifier: Apache-2.0

#ifndef FLMOR_VERIFY_HPP
#define FLMOR_VERIFY_HPP

#include <string>
#include <vector>

namespace flmor {

enum class VerifyLevel { kQuick, kFull };

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Runs the oracle suites (closed-form scalars, Kronecker equivalence,
// quadrature-vs-logarithm Gramians, elimination equivalence, property
// checks). flip_cross_sign deliberately mis-signs the trace formula's cross
// term inside the trace-vs-quadrature check; it exists to demonstrate that
// the check is sensitive to that sign and must make the suite fail.
std::vector<CheckResult> run_verification(VerifyLevel level,
                                          bool flip_cross_sign = false);

bool all_passed(const std::vector<CheckResult> &results);

} // namespace flmor

#endif
