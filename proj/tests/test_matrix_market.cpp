// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "flmor/matrix_market.hpp"
#include "flmor/rng.hpp"

using namespace flmor;

namespace {

std::string temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "flmor_mm_tests";
  std::filesystem::create_directories(dir);
  return dir.string();
}

void write_file(const std::string &path, const std::string &content) {
  std::ofstream out(path);
  out << content;
}

} // namespace

TEST_CASE("sparse round-trip is exact") {
  Rng rng(42);
  SpMat m(13, 9);
  std::vector<Eigen::Triplet<double>> trips;
  for (int k = 0; k < 30; ++k)
    trips.emplace_back(static_cast<int>(rng.below(13)),
                       static_cast<int>(rng.below(9)), rng.normal());
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();

  const std::string path = temp_dir() + "/roundtrip_sparse.mtx";
  write_market(path, m);
  const SpMat back = read_market_sparse(path);
  REQUIRE(back.rows() == m.rows());
  REQUIRE(back.cols() == m.cols());
  CHECK((MatX(back) - MatX(m)).norm() == 0.0);
}

TEST_CASE("dense round-trip is exact") {
  Rng rng(7);
  MatX m(5, 3);
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 3; ++j) m(i, j) = rng.normal();
  // include values that stress the formatter
  m(0, 0) = 1.0 / 3.0;
  m(1, 1) = -1e-300;
  m(2, 2) = 0.0;

  const std::string path = temp_dir() + "/roundtrip_dense.mtx";
  write_market(path, m);
  const MatX back = read_market_dense(path);
  CHECK((back - m).norm() == 0.0);
}

TEST_CASE("symmetric coordinate files are expanded") {
  const std::string path = temp_dir() + "/symmetric.mtx";
  write_file(path, "%%MatrixMarket matrix coordinate real symmetric\n"
                   "3 3 3\n"
                   "1 1 2.0\n"
                   "2 1 -1.0\n"
                   "3 3 4.0\n");
  const MatX m = read_market_dense(path);
  CHECK(m(0, 1) == -1.0);
  CHECK(m(1, 0) == -1.0);
  CHECK(m(2, 2) == 4.0);
  CHECK(m(0, 0) == 2.0);
}

TEST_CASE("symmetric array files are expanded") {
  const std::string path = temp_dir() + "/symmetric_array.mtx";
  // lower triangle, column major: (1,1) (2,1) (2,2)
  write_file(path, "%%MatrixMarket matrix array real symmetric\n"
                   "2 2\n1\n5\n3\n");
  const MatX m = read_market_dense(path);
  CHECK(m(0, 0) == 1.0);
  CHECK(m(1, 0) == 5.0);
  CHECK(m(0, 1) == 5.0);
  CHECK(m(1, 1) == 3.0);
}

TEST_CASE("parse errors name file and line") {
  const std::string path = temp_dir() + "/broken.mtx";
  write_file(path, "%%MatrixMarket matrix coordinate real general\n"
                   "2 2 1\n"
                   "1 oops 3.0\n");
  try {
    read_market_sparse(path);
    FAIL("expected ParseError");
  } catch (const ParseError &e) {
    const std::string msg = e.what();
    CHECK(msg.find(path) != std::string::npos);
    CHECK(msg.find(":3") != std::string::npos);
  }
}

TEST_CASE("out-of-range index is rejected") {
  const std::string path = temp_dir() + "/range.mtx";
  write_file(path, "%%MatrixMarket matrix coordinate real general\n"
                   "2 2 1\n"
                   "3 1 1.0\n");
  CHECK_THROWS_AS(read_market_sparse(path), ParseError);
}

TEST_CASE("missing banner is rejected") {
  const std::string path = temp_dir() + "/nobanner.mtx";
  write_file(path, "2 2 1\n1 1 1.0\n");
  CHECK_THROWS_AS(read_market_sparse(path), ParseError);
}

TEST_CASE("manifest resolves paths relative to its directory") {
  const std::string dir = temp_dir();
  const std::string path = dir + "/test.manifest";
  write_file(path, "# roles\nA = A.mtx\n E = sub/E.mtx \n");
  const auto entries = read_manifest(path);
  REQUIRE(entries.size() == 2);
  CHECK(entries.at("A") == dir + "/A.mtx");
  CHECK(entries.at("E") == dir + "/sub/E.mtx");
}

TEST_CASE("manifest without assignment fails") {
  const std::string path = temp_dir() + "/bad.manifest";
  write_file(path, "just a line\n");
  CHECK_THROWS_AS(read_manifest(path), ParseError);
}
