// SPDX-License-Identifier: Apache-2.0

// End-to-end exercises of the command-line tool as a subprocess.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "flmor/evaluation.hpp"
#include "flmor/system.hpp"

using namespace flmor;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string &args) {
  const std::string cmd =
      std::string(FLMOR_CLI_PATH) + " " + args + " > cli_stdout.txt 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string &name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("reduce writes its artifacts and reports max-iter at zero budget") {
  TempDir dir("flmor_cli_reduce");
  const std::string out = (dir.path / "out").string();
  const int rc = run_cli("reduce --set generator=random:25,2,2,0.2 --set r=4 "
                         "--set max_iter=0 --set output_dir=" + out);
  CHECK(rc == 0);
  CHECK(fs::exists(dir.path / "out" / "reduced.manifest"));
  CHECK(fs::exists(dir.path / "out" / "A_hat.mtx"));
  CHECK(fs::exists(dir.path / "out" / "V.mtx"));
  CHECK(fs::exists(dir.path / "out" / "error_report.txt"));
  CHECK(fs::exists(dir.path / "out" / "sigma.csv"));
  const std::string report = slurp(dir.path / "out" / "tsia_report.txt");
  CHECK(report.find("status = max-iter") != std::string::npos);
  CHECK(report.find("iterations = 0") != std::string::npos);
}

TEST_CASE("identical configs produce byte-identical artifacts") {
  TempDir dir("flmor_cli_repro");
  const std::string common = "reduce --set generator=random:20,2,2,0.25 "
                             "--set r=3 --set max_iter=8 --set output_dir=";
  CHECK(run_cli(common + (dir.path / "a").string()) == 0);
  CHECK(run_cli(common + (dir.path / "b").string()) == 0);
  for (const char *name : {"A_hat.mtx", "B_hat.mtx", "C_hat.mtx", "D_hat.mtx",
                           "V.mtx", "W.mtx", "tsia_report.txt", "sigma.csv"}) {
    CHECK(slurp(dir.path / "a" / name) == slurp(dir.path / "b" / name));
  }
}

TEST_CASE("evaluate reproduces the error figures of reduce") {
  TempDir dir("flmor_cli_eval");
  const std::string gen = "--set generator=random:20,1,1,0.3 --set r=3 "
                          "--set max_iter=20 ";
  CHECK(run_cli("reduce " + gen + "--set output_dir=" +
                (dir.path / "red").string()) == 0);
  CHECK(run_cli("evaluate " + gen + "--set reduced_manifest=" +
                (dir.path / "red" / "reduced.manifest").string() +
                " --set output_dir=" + (dir.path / "eval").string()) == 0);
  const ErrorReport a =
      read_error_report((dir.path / "red" / "error_report.txt").string());
  const ErrorReport b =
      read_error_report((dir.path / "eval" / "error_report.txt").string());
  // same model, same system: the figures agree up to text round-off
  CHECK(std::abs(a.xi - b.xi) <= 1e-10 * std::max(a.xi, 1e-12));
}

TEST_CASE("missing reduced manifest exits with the input error code") {
  TempDir dir("flmor_cli_missing");
  const int rc = run_cli("evaluate --set generator=random:15,1,1,0.3 "
                         "--set reduced_manifest=" +
                         (dir.path / "nope.manifest").string() +
                         " --set output_dir=" + (dir.path / "out").string());
  CHECK(rc == 2);
}

TEST_CASE("conflicting model sources exit with the input error code") {
  TempDir dir("flmor_cli_conflict");
  const int rc = run_cli("reduce --set output_dir=" + (dir.path / "o").string());
  CHECK(rc == 2); // no source configured at all
}

TEST_CASE("verify quick passes") {
  CHECK(run_cli("verify --level quick") == 0);
}

TEST_CASE("mis-signed cross term makes verification fail") {
  CHECK(run_cli("verify --level quick --flip-cross-sign") == 1);
}

TEST_CASE("benchmark writes one CSV row per size") {
  TempDir dir("flmor_cli_bench");
  const int rc = run_cli("benchmark --set benchmark_sizes=120 "
                         "--set output_dir=" + (dir.path / "out").string());
  CHECK(rc == 0);
  const std::string csv = slurp(dir.path / "out" / "benchmark.csv");
  std::istringstream in(csv);
  std::string line;
  int rows = 0;
  REQUIRE(std::getline(in, line));
  CHECK(line == "n1,n2,t_dense_path,t_sparse_path");
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 1);
  CHECK(csv.find("120,240,") != std::string::npos);
}
