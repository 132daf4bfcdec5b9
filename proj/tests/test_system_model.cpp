// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "flmor/generators.hpp"
#include "flmor/matrix_market.hpp"
#include "flmor/operators.hpp"
#include "flmor/system.hpp"

using namespace flmor;

namespace {

std::string temp_dir(const std::string &name) {
  const auto dir = std::filesystem::temp_directory_path() / "flmor_sys_tests" / name;
  std::filesystem::create_directories(dir);
  return dir.string();
}

Index1System scalar_index1() {
  // n1 = n2 = 1: J1 = -1, E1 = 1, J2 = J3 = 1, J4 = -2, B1 = 1, B2 = 0,
  // C1 = 1, C2 = 0 eliminates to A = -1 + 1/2 = -0.5, B = C = 1, D = 0.
  Index1System sys;
  sys.E1 = SpMat(1, 1); sys.E1.insert(0, 0) = 1.0;
  sys.J1 = SpMat(1, 1); sys.J1.insert(0, 0) = -1.0;
  sys.J2 = SpMat(1, 1); sys.J2.insert(0, 0) = 1.0;
  sys.J3 = SpMat(1, 1); sys.J3.insert(0, 0) = 1.0;
  sys.J4 = SpMat(1, 1); sys.J4.insert(0, 0) = -2.0;
  sys.B1 = MatX::Ones(1, 1);
  sys.B2 = MatX::Zero(1, 1);
  sys.C1 = MatX::Ones(1, 1);
  sys.C2 = MatX::Zero(1, 1);
  sys.Da = MatX::Zero(1, 1);
  return sys;
}

} // namespace

TEST_CASE("loading defaults a missing feedthrough to zero") {
  const std::string dir = temp_dir("load_default_d");
  SpMat eye(2, 2);
  eye.setIdentity();
  write_market(dir + "/E.mtx", eye);
  write_market(dir + "/A.mtx", SpMat(-1.0 * eye));
  write_market(dir + "/B.mtx", MatX(MatX::Identity(2, 2)));
  write_market(dir + "/C.mtx", MatX(MatX::Identity(2, 2)));
  write_manifest(dir + "/system.manifest",
                 {{"E", "E.mtx"}, {"A", "A.mtx"}, {"B", "B.mtx"}, {"C", "C.mtx"}});
  const GeneralizedSystem sys = load_generalized(dir + "/system.manifest");
  CHECK(sys.n() == 2);
  CHECK(sys.D.rows() == 2);
  CHECK(sys.D.cols() == 2);
  CHECK(sys.D.isZero(0.0));
}

TEST_CASE("save/load round-trip reproduces all blocks exactly") {
  const GeneralizedSystem sys = generate_random_stable(15, 2, 3, 0.3, 5);
  const std::string dir = temp_dir("roundtrip");
  save_generalized(dir, sys);
  const GeneralizedSystem back = load_generalized(dir + "/system.manifest");
  CHECK((MatX(back.E) - MatX(sys.E)).norm() == 0.0);
  CHECK((MatX(back.A) - MatX(sys.A)).norm() == 0.0);
  CHECK((back.B - sys.B).norm() == 0.0);
  CHECK((back.C - sys.C).norm() == 0.0);
  CHECK((back.D - sys.D).norm() == 0.0);
}

TEST_CASE("singular J4 fails validation") {
  Index1System sys = scalar_index1();
  SpMat zero(1, 1);
  zero.setZero();
  sys.J4 = zero;
  CHECK_THROWS_AS(validate(sys), ValidationError);
}

TEST_CASE("dimension mismatch names the offending block") {
  GeneralizedSystem sys = generate_random_stable(6, 1, 1, 0.5, 3);
  sys.B = MatX::Ones(5, 1);
  try {
    validate(sys);
    FAIL("expected StructureError");
  } catch (const StructureError &e) {
    CHECK(std::string(e.what()).find("B") != std::string::npos);
  }
}

TEST_CASE("unstable pencil fails validation") {
  GeneralizedSystem sys = generate_random_stable(6, 1, 1, 0.5, 3);
  sys.A = SpMat(MatX::Identity(6, 6).sparseView());
  CHECK_THROWS_AS(validate(sys), ValidationError);
}

TEST_CASE("triple chain has the advertised order and structure") {
  const GeneralizedSystem sys = generate_triple_chain(1);
  CHECK(sys.n() == 8); // 2 * (3*1 + 1)
  CHECK(sys.p() == 1);
  CHECK(sys.m() == 1);
  CHECK((sys.B.transpose() - sys.C).norm() == 0.0);
  CHECK(spectral_abscissa(sys.A, sys.E) < 0.0);
  validate(sys);
}

TEST_CASE("triple chain B equals C transpose for arbitrary parameters") {
  TripleChainParams prm;
  prm.mass2 = 3.0;
  prm.k1 = 0.7;
  prm.alpha = 0.05;
  const GeneralizedSystem sys = generate_triple_chain(4, prm);
  CHECK(sys.n() == 2 * (3 * 4 + 1));
  CHECK((sys.B.transpose() - sys.C).norm() == 0.0);
  CHECK(spectral_abscissa(sys.A, sys.E) < 0.0);
}

TEST_CASE("triple chain at benchmark scale stays sparse") {
  // n = 2(3l + 1) cannot hit 10000 exactly; l = 1666 gives the nearest order
  const GeneralizedSystem sys = generate_triple_chain(1666);
  CHECK(sys.n() == 9998);
  CHECK(sys.A.nonZeros() < 12 * sys.n());
  CHECK((sys.B.transpose() - sys.C).norm() == 0.0);
}

TEST_CASE("triple chain rejects non-positive parameters") {
  TripleChainParams prm;
  prm.k0 = 0.0;
  CHECK_THROWS_AS(generate_triple_chain(2, prm), ValidationError);
  CHECK_THROWS_AS(generate_triple_chain(0), ValidationError);
}

TEST_CASE("random stable generator is bitwise deterministic") {
  const GeneralizedSystem a = generate_random_stable(20, 2, 2, 0.15, 7);
  const GeneralizedSystem b = generate_random_stable(20, 2, 2, 0.15, 7);
  CHECK((MatX(a.A) - MatX(b.A)).norm() == 0.0);
  CHECK((MatX(a.E) - MatX(b.E)).norm() == 0.0);
  CHECK((a.B - b.B).norm() == 0.0);
  CHECK((a.C - b.C).norm() == 0.0);
}

TEST_CASE("random stable generator keeps the abscissa below -0.1") {
  const GeneralizedSystem sys = generate_random_stable(40, 1, 1, 0.1, 1);
  CHECK(spectral_abscissa(sys.A, sys.E) < -0.1);
}

TEST_CASE("full density is accepted") {
  const GeneralizedSystem sys = generate_random_stable(5, 1, 1, 1.0, 9);
  validate(sys);
}

TEST_CASE("generator rejects bad arguments") {
  CHECK_THROWS_AS(generate_random_stable(0, 1, 1, 0.5, 1), ValidationError);
  CHECK_THROWS_AS(generate_random_stable(5, 1, 1, 0.0, 1), ValidationError);
  CHECK_THROWS_AS(generate_random_stable(5, 1, 1, 1.5, 1), ValidationError);
}

TEST_CASE("index-1 generator is deterministic and valid") {
  Index1GeneratorParams prm;
  prm.seed = 4;
  const Index1System a = generate_random_index1(12, 8, prm);
  const Index1System b = generate_random_index1(12, 8, prm);
  CHECK((MatX(a.J1) - MatX(b.J1)).norm() == 0.0);
  CHECK((a.B2 - b.B2).norm() == 0.0);
  validate(a);
  CHECK(spectral_abscissa(eliminate_algebraic(a).A, a.E1) < 0.0);
}

TEST_CASE("decoupled elimination keeps J1, B1, C1") {
  Index1System sys = scalar_index1();
  SpMat zero(1, 1);
  zero.setZero();
  sys.J2 = zero;
  sys.J3 = zero;
  sys.B2 = MatX::Constant(1, 1, 3.0);
  sys.C2 = MatX::Constant(1, 1, 2.0);
  const GeneralizedSystem g = eliminate_algebraic(sys);
  CHECK(MatX(g.A)(0, 0) == -1.0);
  CHECK(g.B(0, 0) == 1.0);
  CHECK(g.C(0, 0) == 1.0);
  // D = Da - C2 J4^-1 B2 = 0 - 2*(-1/2)*3 = 3
  CHECK(g.D(0, 0) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("scalar elimination arithmetic") {
  const GeneralizedSystem g = eliminate_algebraic(scalar_index1());
  CHECK(MatX(g.A)(0, 0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(g.B(0, 0) == 1.0);
  CHECK(g.C(0, 0) == 1.0);
  CHECK(g.D(0, 0) == 0.0);
}

TEST_CASE("elimination preserves the transfer function") {
  Index1GeneratorParams prm;
  prm.seed = 11;
  prm.density = 0.3;
  const Index1System dae = generate_random_index1(6, 4, prm);
  const GeneralizedSystem elim = eliminate_algebraic(dae);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double nu = 1e-2 * std::pow(1e4 / 1e-2, k / 19.0);
    const MatXc g_dae = transfer_function(dae, Complex(0.0, nu));
    const MatXc g_elim = transfer_function(elim, Complex(0.0, nu));
    worst = std::max(worst, (g_dae - g_elim).norm() / g_dae.norm());
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("elimination refuses above the cap") {
  Index1GeneratorParams prm;
  prm.seed = 2;
  const Index1System sys = generate_random_index1(30, 20, prm);
  CHECK_THROWS_AS(eliminate_algebraic(sys, 40), CapExceededError);
}

TEST_CASE("index-1 operator realizes the eliminated A implicitly") {
  Index1GeneratorParams prm;
  prm.seed = 13;
  prm.density = 0.2;
  const Index1System sys = generate_random_index1(10, 6, prm);
  const GeneralizedSystem elim = eliminate_algebraic(sys);
  Index1Operator op(sys);
  const MatX x = MatX::Identity(10, 10);
  CHECK((op.apply_A(x) - MatX(elim.A)).norm() <= 1e-12 * MatX(elim.A).norm());
}

TEST_CASE("effective index-1 system matches the eliminated b, c, d") {
  Index1GeneratorParams prm;
  prm.seed = 14;
  prm.density = 0.2;
  const Index1System sys = generate_random_index1(10, 6, prm);
  const GeneralizedSystem elim = eliminate_algebraic(sys);
  const EffectiveSystem eff = make_effective(sys);
  CHECK((eff.b - elim.B).norm() <= 1e-12 * elim.B.norm());
  CHECK((eff.c - elim.C).norm() <= 1e-12 * elim.C.norm());
  CHECK((eff.d - elim.D).norm() <= 1e-12 * std::max(elim.D.norm(), 1.0));
}

TEST_CASE("modal generator produces a stable identity-descriptor system") {
  const GeneralizedSystem sys = generate_modal_structure(10, 2, 2, 3);
  CHECK(sys.n() == 20);
  validate(sys);
}
