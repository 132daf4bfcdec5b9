// SPDX-License-Identifier: Apache-2.0

#include "flmor/generators.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "flmor/rng.hpp"

namespace flmor {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void require_positive(double v, const char *name) {
  if (!(v > 0.0)) throw ValidationError(std::string(name) + " must be positive");
}

// Sparse matrix with roughly density*cols entries per row, normal values.
// Entries are produced row by row so the result is seed-deterministic.
SpMat random_sparse(Index rows, Index cols, double density, Rng &rng) {
  Triplets trips;
  const Index per_row = std::max<Index>(
      1, static_cast<Index>(std::llround(density * static_cast<double>(cols))));
  trips.reserve(static_cast<std::size_t>(rows * per_row));
  for (Index i = 0; i < rows; ++i) {
    std::set<Index> cols_used;
    for (Index k = 0; k < per_row; ++k)
      cols_used.insert(static_cast<Index>(rng.below(static_cast<std::uint64_t>(cols))));
    for (Index j : cols_used) trips.emplace_back(i, j, rng.normal());
  }
  SpMat m(rows, cols);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

// SPD sparse matrix of the form I + s*(S + S^T) with the scaling chosen so
// the symmetric part stays well inside the unit ball (lambda_min >= 0.5).
SpMat random_spd(Index n, double density, Rng &rng) {
  SpMat s = random_sparse(n, n, density / 2.0, rng);
  SpMat sym = SpMat(s.transpose()) + s;
  // infinity-norm bound on the eigenvalues of sym
  VecX row_sums = VecX::Zero(n);
  for (int k = 0; k < sym.outerSize(); ++k)
    for (SpMat::InnerIterator it(sym, k); it; ++it)
      row_sums(it.row()) += std::abs(it.value());
  const double bound = std::max(row_sums.maxCoeff(), 1e-12);
  SpMat eye(n, n);
  eye.setIdentity();
  SpMat e = eye + SpMat(sym * (0.5 / bound));
  e.makeCompressed();
  return e;
}

// Network-like sparse matrix: entries confined to a window around the
// (scaled) diagonal, with the per-row count saturating at a constant so
// large instances keep bounded degree. The localized pattern has good
// separators, so sparse factorizations of such blocks stay cheap -- the
// regime where the implicit index-1 path pays off.
SpMat banded_random_sparse(Index rows, Index cols, double density, Rng &rng) {
  Triplets trips;
  const Index per_row = std::clamp<Index>(
      static_cast<Index>(std::llround(density * static_cast<double>(cols))), 1,
      12);
  const Index half = std::max<Index>(2 * per_row, 8);
  trips.reserve(static_cast<std::size_t>(rows * per_row));
  for (Index i = 0; i < rows; ++i) {
    const Index center = rows == cols ? i : (i * cols) / rows;
    const Index lo = std::max<Index>(0, center - half);
    const Index hi = std::min<Index>(cols - 1, center + half);
    const Index width = hi - lo + 1;
    std::set<Index> cols_used;
    for (Index k = 0; k < per_row; ++k)
      cols_used.insert(
          lo + static_cast<Index>(rng.below(static_cast<std::uint64_t>(width))));
    for (Index j : cols_used) trips.emplace_back(i, j, rng.normal());
  }
  SpMat m(rows, cols);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

// Banded counterpart of random_spd (same I + scaled symmetric part shape).
SpMat banded_random_spd(Index n, double density, Rng &rng) {
  SpMat s = banded_random_sparse(n, n, density / 2.0, rng);
  SpMat sym = SpMat(s.transpose()) + s;
  VecX row_sums = VecX::Zero(n);
  for (int k = 0; k < sym.outerSize(); ++k)
    for (SpMat::InnerIterator it(sym, k); it; ++it)
      row_sums(it.row()) += std::abs(it.value());
  const double bound = std::max(row_sums.maxCoeff(), 1e-12);
  SpMat eye(n, n);
  eye.setIdentity();
  SpMat e = eye + SpMat(sym * (0.5 / bound));
  e.makeCompressed();
  return e;
}

double max_abs_row_sum(const SpMat &m) {
  VecX row_sums = VecX::Zero(m.rows());
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      row_sums(it.row()) += std::abs(it.value());
  return m.rows() == 0 ? 0.0 : row_sums.maxCoeff();
}

MatX random_dense(Index rows, Index cols, Rng &rng) {
  MatX m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

} // namespace

GeneralizedSystem generate_triple_chain(Index n_masses, const TripleChainParams &prm) {
  if (n_masses < 1) throw ValidationError("n_masses must be at least 1");
  require_positive(prm.mass1, "mass1");
  require_positive(prm.mass2, "mass2");
  require_positive(prm.mass3, "mass3");
  require_positive(prm.mass0, "mass0");
  require_positive(prm.k1, "k1");
  require_positive(prm.k2, "k2");
  require_positive(prm.k3, "k3");
  require_positive(prm.k0, "k0");
  require_positive(prm.alpha, "alpha");
  require_positive(prm.beta, "beta");

  const Index ell = n_masses;
  const Index N = 3 * ell + 1;  // chain masses plus the coupling mass
  const Index coupler = N - 1;

  const double chain_mass[3] = {prm.mass1, prm.mass2, prm.mass3};
  const double chain_k[3] = {prm.k1, prm.k2, prm.k3};

  Triplets k_trips;
  VecX mass = VecX::Zero(N);
  auto add_spring = [&](Index a, Index b, double k) {
    k_trips.emplace_back(a, a, k);
    k_trips.emplace_back(b, b, k);
    k_trips.emplace_back(a, b, -k);
    k_trips.emplace_back(b, a, -k);
  };
  for (int c = 0; c < 3; ++c) {
    const Index base = c * ell;
    for (Index j = 0; j < ell; ++j) mass(base + j) = chain_mass[c];
    // wall anchor at the head of each chain
    k_trips.emplace_back(base, base, chain_k[c]);
    for (Index j = 0; j + 1 < ell; ++j) add_spring(base + j, base + j + 1, chain_k[c]);
    add_spring(base + ell - 1, coupler, prm.k0);
  }
  mass(coupler) = prm.mass0;

  SpMat K(N, N);
  K.setFromTriplets(k_trips.begin(), k_trips.end());
  SpMat M(N, N);
  {
    Triplets m_trips;
    for (Index i = 0; i < N; ++i) m_trips.emplace_back(i, i, mass(i));
    M.setFromTriplets(m_trips.begin(), m_trips.end());
  }
  const SpMat Dmat = SpMat(prm.alpha * M) + SpMat(prm.beta * K);

  // first-order form with E = diag(K, M), A = [[0, K], [-K, -D]]
  const Index n = 2 * N;
  Triplets e_trips, a_trips;
  for (int k = 0; k < K.outerSize(); ++k)
    for (SpMat::InnerIterator it(K, k); it; ++it) {
      e_trips.emplace_back(it.row(), it.col(), it.value());
      a_trips.emplace_back(it.row(), N + it.col(), it.value());
      a_trips.emplace_back(N + it.row(), it.col(), -it.value());
    }
  for (int k = 0; k < M.outerSize(); ++k)
    for (SpMat::InnerIterator it(M, k); it; ++it)
      e_trips.emplace_back(N + it.row(), N + it.col(), it.value());
  for (int k = 0; k < Dmat.outerSize(); ++k)
    for (SpMat::InnerIterator it(Dmat, k); it; ++it)
      a_trips.emplace_back(N + it.row(), N + it.col(), -it.value());

  GeneralizedSystem sys;
  sys.E = SpMat(n, n);
  sys.E.setFromTriplets(e_trips.begin(), e_trips.end());
  sys.A = SpMat(n, n);
  sys.A.setFromTriplets(a_trips.begin(), a_trips.end());
  sys.B = MatX::Zero(n, 1);
  sys.B(N + coupler, 0) = 1.0;  // force on the coupling mass
  sys.C = sys.B.transpose();    // collocated velocity output
  sys.D = MatX::Zero(1, 1);
  return sys;
}

GeneralizedSystem generate_random_stable(Index n, Index p, Index m, double density,
                                         std::uint64_t seed) {
  if (n < 1 || p < 1 || m < 1) throw ValidationError("n, p, m must be positive");
  if (!(density > 0.0 && density <= 1.0))
    throw ValidationError("density must lie in (0, 1]");

  Rng rng(seed);
  GeneralizedSystem sys;
  sys.E = random_spd(n, density, rng);
  SpMat a0 = random_sparse(n, n, density, rng);

  double shift = 0.0;
  if (n <= 1000) {
    shift = spectral_abscissa(a0, sys.E) + 0.11;
  } else {
    // field-of-values bound: Re lam <= lam_max(sym(A0)) / lam_min(E), and
    // lam_min(E) >= 0.5 by construction of random_spd
    const SpMat sym = SpMat(SpMat(a0.transpose()) + a0) * 0.5;
    shift = max_abs_row_sum(sym) / 0.5 + 0.11;
  }
  sys.A = a0 - SpMat(sys.E * shift);
  sys.A.makeCompressed();
  sys.B = random_dense(n, p, rng);
  sys.C = random_dense(m, n, rng);
  sys.D = MatX::Zero(m, p);
  return sys;
}

Index1System generate_random_index1(Index n1, Index n2,
                                    const Index1GeneratorParams &prm) {
  if (n1 < 1 || n2 < 1) throw ValidationError("n1, n2 must be positive");
  if (!(prm.coupling > 0.0 && prm.coupling <= 0.5))
    throw ValidationError("coupling must lie in (0, 0.5]");

  Rng rng(prm.seed);
  Index1System sys;
  sys.E1 = banded_random_spd(n1, prm.density, rng);

  // J1 with negative definite symmetric part: margin delta below zero
  const double delta = 1.0;
  SpMat s1 = banded_random_sparse(n1, n1, prm.density, rng);
  {
    const SpMat sym = SpMat(s1.transpose()) + s1;
    const double rho = max_abs_row_sum(sym);
    SpMat eye(n1, n1);
    eye.setIdentity();
    sys.J1 = s1 - SpMat(eye * (0.5 * rho + delta));
  }

  // J4 = I + T with ||T||_F = 0.3, so ||J4^-1|| <= 1/0.7
  {
    SpMat t = banded_random_sparse(n2, n2, prm.density, rng);
    const double tn = std::max(t.norm(), 1e-12);
    SpMat eye(n2, n2);
    eye.setIdentity();
    sys.J4 = eye + SpMat(t * (0.3 / tn));
  }

  // couplings small enough that J2 J4^-1 J3 cannot destroy the J1 margin
  const double cscale = std::sqrt(0.7 * delta * prm.coupling);
  {
    SpMat j2 = banded_random_sparse(n1, n2, prm.density, rng);
    sys.J2 = SpMat(j2 * (cscale / std::max(j2.norm(), 1e-12)));
    SpMat j3 = banded_random_sparse(n2, n1, prm.density, rng);
    sys.J3 = SpMat(j3 * (cscale / std::max(j3.norm(), 1e-12)));
  }

  sys.B1 = random_dense(n1, prm.p, rng);
  sys.B2 = random_dense(n2, prm.p, rng);
  sys.C1 = random_dense(prm.m, n1, rng);
  sys.C2 = random_dense(prm.m, n2, rng);
  sys.Da = MatX::Zero(prm.m, prm.p);
  return sys;
}

GeneralizedSystem generate_modal_structure(Index n_modes, Index p, Index m,
                                           std::uint64_t seed) {
  if (n_modes < 1 || p < 1 || m < 1)
    throw ValidationError("n_modes, p, m must be positive");
  Rng rng(seed);
  const Index n = 2 * n_modes;

  Triplets a_trips;
  MatX B = MatX::Zero(n, p);
  MatX C = MatX::Zero(m, n);
  for (Index k = 0; k < n_modes; ++k) {
    const double t = n_modes == 1 ? 0.0
                                  : static_cast<double>(k) /
                                        static_cast<double>(n_modes - 1);
    const double omega = 0.5 * std::pow(100.0, t);      // 0.5 .. 50 rad/s
    const double zeta = 0.002 + 0.02 * rng.uniform();   // light damping
    const Index i = 2 * k;
    a_trips.emplace_back(i, i + 1, omega);
    a_trips.emplace_back(i + 1, i, -omega);
    a_trips.emplace_back(i + 1, i + 1, -2.0 * zeta * omega);
    // decaying mode participation so low-order models capture the response
    const double gain = std::pow(0.82, static_cast<double>(k));
    for (Index j = 0; j < p; ++j) B(i + 1, j) = gain * rng.normal();
    for (Index j = 0; j < m; ++j) C(j, i + 1) = gain * rng.normal();
  }

  GeneralizedSystem sys;
  sys.A = SpMat(n, n);
  sys.A.setFromTriplets(a_trips.begin(), a_trips.end());
  sys.E = SpMat(n, n);
  sys.E.setIdentity();
  sys.B = B;
  sys.C = C;
  sys.D = MatX::Zero(m, p);
  return sys;
}

} // namespace flmor
