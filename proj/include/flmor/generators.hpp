// SPDX-License-Identifier: Apache-2.0

#ifndef FLMOR_GENERATORS_HPP
#define FLMOR_GENERATORS_HPP

#include <cstdint>

#include "flmor/system.hpp"

namespace flmor {

// Triple-chain oscillator: three damped spring chains of n_masses each,
// coupled through one extra mass. The second-order form
//   M q'' + D q' + K q = f u,  y = f^T q'
// with proportional damping D = alpha M + beta K is converted to first
// order as E = diag(K, M), A = [[0, K], [-K, -D]], B = [0; f], C = B^T,
// giving a SISO system of order n = 2 (3 n_masses + 1) with B = C^T.
struct TripleChainParams {
  double mass1 = 1.0, mass2 = 1.0, mass3 = 1.0; // chain masses
  double mass0 = 1.0;                           // coupling mass
  double k1 = 1.0, k2 = 1.0, k3 = 1.0;          // chain stiffnesses
  double k0 = 1.0;                              // coupling stiffness
  double alpha = 0.1, beta = 0.1;               // proportional damping
};

GeneralizedSystem generate_triple_chain(Index n_masses,
                                        const TripleChainParams &params = {});

// Deterministic random stable generalized system: E symmetric positive
// definite sparse, A shifted so the generalized spectral abscissa is below
// -0.1 (exactly, via a dense eigenvalue computation for moderate n, via a
// field-of-values bound beyond that).
GeneralizedSystem generate_random_stable(Index n, Index p, Index m,
                                         double density, std::uint64_t seed);

// Deterministic random index-1 system whose eliminated pencil is provably
// stable: J1 + J1^T is kept negative definite with enough margin to absorb
// the elimination term J2 J4^-1 J3, and E1 is SPD. coupling scales the
// J2/J3 blocks.
struct Index1GeneratorParams {
  Index p = 2;
  Index m = 2;
  double density = 0.02;
  double coupling = 0.1;
  std::uint64_t seed = 1;
};

Index1System generate_random_index1(Index n1, Index n2,
                                    const Index1GeneratorParams &params = {});

// Lightly damped modal structure with a few dominant modes; stands in for
// flexible-structure benchmarks in tests when no data files are available.
GeneralizedSystem generate_modal_structure(Index n_modes, Index p, Index m,
                                           std::uint64_t seed);

} // namespace flmor

#endif
