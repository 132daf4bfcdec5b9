// SPDX-License-Identifier: Apache-2.0

#include "flmor/system.hpp"

#include <filesystem>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SparseLU>

#include "flmor/matrix_market.hpp"

namespace flmor {

namespace {

void require(bool cond, const std::string &msg) {
  if (!cond) throw StructureError(msg);
}

std::string dims(const char *name, Index r, Index c) {
  std::ostringstream os;
  os << name << " is " << r << "x" << c;
  return os.str();
}

void check_factorizable(const SpMat &m, const char *name) {
  Eigen::SparseLU<SpMat> lu;
  lu.compute(m);
  if (lu.info() != Eigen::Success) {
    throw ValidationError(std::string(name) + " is singular or could not be factored");
  }
}

} // namespace

double spectral_abscissa(const SpMat &A, const SpMat &E) {
  const MatX Ad(A);
  const MatX Ed(E);
  Eigen::GeneralizedEigenSolver<MatX> ges;
  ges.compute(Ad, Ed, /*computeEigenvectors=*/false);
  double abscissa = -std::numeric_limits<double>::infinity();
  const auto alphas = ges.alphas();
  const auto betas = ges.betas();
  for (Index i = 0; i < alphas.size(); ++i) {
    if (betas(i) == 0.0) {
      throw ValidationError("pencil has an infinite eigenvalue (singular E)");
    }
    abscissa = std::max(abscissa, (alphas(i) / betas(i)).real());
  }
  return abscissa;
}

double spectral_abscissa(const MatX &a_hat) {
  Eigen::EigenSolver<MatX> es(a_hat, /*computeEigenvectors=*/false);
  double abscissa = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < a_hat.rows(); ++i)
    abscissa = std::max(abscissa, es.eigenvalues()(i).real());
  return abscissa;
}

bool is_stable(const ReducedModel &red) {
  return red.r() == 0 || spectral_abscissa(red.a_hat) < 0.0;
}

void validate(const GeneralizedSystem &sys, const ValidationOptions &opts) {
  const Index n = sys.A.rows();
  require(sys.A.cols() == n, dims("A", sys.A.rows(), sys.A.cols()) + ", expected square");
  require(sys.E.rows() == n && sys.E.cols() == n,
          dims("E", sys.E.rows(), sys.E.cols()) + ", expected " + dims("A", n, n));
  require(sys.B.rows() == n, dims("B", sys.B.rows(), sys.B.cols()) + ", row count must equal n");
  require(sys.C.cols() == n, dims("C", sys.C.rows(), sys.C.cols()) + ", column count must equal n");
  require(sys.D.rows() == sys.C.rows() && sys.D.cols() == sys.B.cols(),
          dims("D", sys.D.rows(), sys.D.cols()) + ", expected m x p");
  require(n > 0 && sys.B.cols() > 0 && sys.C.rows() > 0, "empty system");

  check_factorizable(sys.E, "E");
  if (opts.check_stability && n <= opts.stability_cap) {
    const double a = spectral_abscissa(sys.A, sys.E);
    if (!(a < 0.0)) {
      std::ostringstream os;
      os << "pencil (A, E) is not stable: spectral abscissa " << a;
      throw ValidationError(os.str());
    }
  }
}

void validate(const Index1System &sys, const ValidationOptions &opts) {
  const Index n1 = sys.J1.rows();
  const Index n2 = sys.J4.rows();
  require(sys.J1.cols() == n1, "J1 must be square");
  require(sys.E1.rows() == n1 && sys.E1.cols() == n1, "E1 must be n1 x n1");
  require(sys.J4.cols() == n2, "J4 must be square");
  require(sys.J2.rows() == n1 && sys.J2.cols() == n2, "J2 must be n1 x n2");
  require(sys.J3.rows() == n2 && sys.J3.cols() == n1, "J3 must be n2 x n1");
  require(sys.B1.rows() == n1 && sys.B2.rows() == n2, "B1/B2 row counts must be n1/n2");
  require(sys.B1.cols() == sys.B2.cols(), "B1 and B2 must share p");
  require(sys.C1.cols() == n1 && sys.C2.cols() == n2, "C1/C2 column counts must be n1/n2");
  require(sys.C1.rows() == sys.C2.rows(), "C1 and C2 must share m");
  require(sys.Da.rows() == sys.C1.rows() && sys.Da.cols() == sys.B1.cols(),
          "Da must be m x p");
  require(n1 > 0 && n2 > 0, "empty index-1 system");

  check_factorizable(sys.J4, "J4");
  check_factorizable(sys.E1, "E1");
  (void)opts;
}

GeneralizedSystem eliminate_algebraic(const Index1System &sys, Index elimination_cap) {
  if (sys.n1() + sys.n2() > elimination_cap) {
    std::ostringstream os;
    os << "eliminate_algebraic refused: n1+n2 = " << (sys.n1() + sys.n2())
       << " exceeds the cap " << elimination_cap
       << "; the eliminated matrices are dense, use the implicit index-1 path";
    throw CapExceededError(os.str());
  }
  Eigen::SparseLU<SpMat> j4;
  j4.compute(sys.J4);
  if (j4.info() != Eigen::Success) throw SolverError("J4 factorization failed");

  const MatX t3 = j4.solve(MatX(sys.J3)); // J4^-1 J3
  const MatX tb = j4.solve(sys.B2);       // J4^-1 B2

  GeneralizedSystem out;
  out.E = sys.E1;
  out.A = (MatX(sys.J1) - sys.J2 * t3).sparseView();
  out.B = sys.B1 - sys.J2 * tb;
  out.C = sys.C1 - sys.C2 * t3;
  out.D = sys.Da - sys.C2 * tb;
  return out;
}

Index1System transpose_blocks(const Index1System &sys) {
  Index1System t;
  t.E1 = SpMat(sys.E1.transpose());
  t.J1 = SpMat(sys.J1.transpose());
  t.J2 = SpMat(sys.J3.transpose());
  t.J3 = SpMat(sys.J2.transpose());
  t.J4 = SpMat(sys.J4.transpose());
  t.B1 = sys.C1.transpose();
  t.B2 = sys.C2.transpose();
  t.C1 = sys.B1.transpose();
  t.C2 = sys.B2.transpose();
  t.Da = sys.Da.transpose();
  return t;
}

MatXc transfer_function(const GeneralizedSystem &sys, Complex s) {
  const MatXc resolvent_arg = s * MatXc(sys.E) - MatXc(sys.A);
  Eigen::PartialPivLU<MatXc> lu(resolvent_arg);
  return sys.C.cast<Complex>() * lu.solve(sys.B.cast<Complex>()) +
         sys.D.cast<Complex>();
}

MatXc transfer_function(const Index1System &sys, Complex s) {
  const Index n1 = sys.n1(), n2 = sys.n2();
  MatXc K(n1 + n2, n1 + n2);
  K.topLeftCorner(n1, n1) = s * MatXc(sys.E1) - MatXc(sys.J1);
  K.topRightCorner(n1, n2) = -MatXc(sys.J2);
  K.bottomLeftCorner(n2, n1) = -MatXc(sys.J3);
  K.bottomRightCorner(n2, n2) = -MatXc(sys.J4);
  MatXc rhs(n1 + n2, sys.p());
  rhs.topRows(n1) = sys.B1.cast<Complex>();
  rhs.bottomRows(n2) = sys.B2.cast<Complex>();
  const MatXc xw = Eigen::PartialPivLU<MatXc>(K).solve(rhs);
  return sys.C1.cast<Complex>() * xw.topRows(n1) +
         sys.C2.cast<Complex>() * xw.bottomRows(n2) + sys.Da.cast<Complex>();
}

MatXc transfer_function(const ReducedModel &red, Complex s) {
  const MatXc K = s * MatXc::Identity(red.r(), red.r()) - red.a_hat.cast<Complex>();
  return red.c_hat.cast<Complex>() * Eigen::PartialPivLU<MatXc>(K).solve(
             red.b_hat.cast<Complex>()) + red.d_hat.cast<Complex>();
}

namespace {

SpMat load_role_sparse(const std::map<std::string, std::string> &man,
                       const std::string &role) {
  const auto it = man.find(role);
  if (it == man.end())
    throw StructureError("manifest is missing required role '" + role + "'");
  return read_market_sparse(it->second);
}

MatX load_role_dense(const std::map<std::string, std::string> &man,
                     const std::string &role) {
  const auto it = man.find(role);
  if (it == man.end())
    throw StructureError("manifest is missing required role '" + role + "'");
  return read_market_dense(it->second);
}

// Feedthrough defaults to the zero matrix when the role is absent.
MatX load_role_optional(const std::map<std::string, std::string> &man,
                        const std::string &role, Index rows, Index cols) {
  const auto it = man.find(role);
  if (it == man.end()) return MatX::Zero(rows, cols);
  return read_market_dense(it->second);
}

} // namespace

GeneralizedSystem load_generalized(const std::string &manifest_path,
                                   const ValidationOptions &opts) {
  const auto man = read_manifest(manifest_path);
  GeneralizedSystem sys;
  sys.E = load_role_sparse(man, "E");
  sys.A = load_role_sparse(man, "A");
  sys.B = load_role_dense(man, "B");
  sys.C = load_role_dense(man, "C");
  sys.D = load_role_optional(man, "D", sys.C.rows(), sys.B.cols());
  validate(sys, opts);
  return sys;
}

Index1System load_index1(const std::string &manifest_path,
                         const ValidationOptions &opts) {
  const auto man = read_manifest(manifest_path);
  Index1System sys;
  sys.E1 = load_role_sparse(man, "E1");
  sys.J1 = load_role_sparse(man, "J1");
  sys.J2 = load_role_sparse(man, "J2");
  sys.J3 = load_role_sparse(man, "J3");
  sys.J4 = load_role_sparse(man, "J4");
  sys.B1 = load_role_dense(man, "B1");
  sys.B2 = load_role_dense(man, "B2");
  sys.C1 = load_role_dense(man, "C1");
  sys.C2 = load_role_dense(man, "C2");
  sys.Da = load_role_optional(man, "Da", sys.C1.rows(), sys.B1.cols());
  validate(sys, opts);
  return sys;
}

void save_generalized(const std::string &dir, const GeneralizedSystem &sys) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path base(dir);
  write_market((base / "E.mtx").string(), sys.E);
  write_market((base / "A.mtx").string(), sys.A);
  write_market((base / "B.mtx").string(), sys.B);
  write_market((base / "C.mtx").string(), sys.C);
  write_market((base / "D.mtx").string(), sys.D);
  write_manifest((base / "system.manifest").string(),
                 {{"E", "E.mtx"}, {"A", "A.mtx"}, {"B", "B.mtx"},
                  {"C", "C.mtx"}, {"D", "D.mtx"}});
}

void save_reduced(const std::string &dir, const ReducedModel &red) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path base(dir);
  write_market((base / "A_hat.mtx").string(), red.a_hat);
  write_market((base / "B_hat.mtx").string(), red.b_hat);
  write_market((base / "C_hat.mtx").string(), red.c_hat);
  write_market((base / "D_hat.mtx").string(), red.d_hat);
  write_manifest((base / "reduced.manifest").string(),
                 {{"A_hat", "A_hat.mtx"}, {"B_hat", "B_hat.mtx"},
                  {"C_hat", "C_hat.mtx"}, {"D_hat", "D_hat.mtx"}});
}

ReducedModel load_reduced(const std::string &manifest_path) {
  const auto man = read_manifest(manifest_path);
  ReducedModel red;
  red.a_hat = load_role_dense(man, "A_hat");
  red.b_hat = load_role_dense(man, "B_hat");
  red.c_hat = load_role_dense(man, "C_hat");
  red.d_hat = load_role_optional(man, "D_hat", red.c_hat.rows(), red.b_hat.cols());
  if (red.a_hat.rows() != red.a_hat.cols() || red.b_hat.rows() != red.a_hat.rows() ||
      red.c_hat.cols() != red.a_hat.rows()) {
    throw StructureError("reduced model blocks have inconsistent dimensions");
  }
  return red;
}

} // namespace flmor
