// SPDX-License-Identifier: Apache-2.0

#include "flmor/matrix_market.hpp"

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace flmor {

namespace {

[[noreturn]] void fail(const std::string &path, int line, const std::string &what) {
  throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

struct MarketHeader {
  bool coordinate = true;
  bool symmetric = false;
};

// Reads and validates the banner, leaving the stream at the size line.
MarketHeader read_banner(std::ifstream &in, const std::string &path, int &lineno) {
  std::string line;
  if (!std::getline(in, line)) fail(path, 1, "empty file");
  lineno = 1;
  std::istringstream hs(line);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") fail(path, 1, "missing %%MatrixMarket banner");
  if (object != "matrix") fail(path, 1, "unsupported object '" + object + "'");
  MarketHeader h;
  if (format == "coordinate") {
    h.coordinate = true;
  } else if (format == "array") {
    h.coordinate = false;
  } else {
    fail(path, 1, "unsupported format '" + format + "'");
  }
  if (field != "real" && field != "integer") {
    fail(path, 1, "unsupported field '" + field + "' (only real matrices)");
  }
  if (symmetry == "general") {
    h.symmetric = false;
  } else if (symmetry == "symmetric") {
    h.symmetric = true;
  } else {
    fail(path, 1, "unsupported symmetry '" + symmetry + "'");
  }
  return h;
}

bool next_data_line(std::ifstream &in, std::string &line, int &lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    bool blank = true;
    for (char c : line) {
      if (!std::isspace(static_cast<unsigned char>(c))) {
        blank = false;
        break;
      }
    }
    if (blank || line[line.find_first_not_of(" \t")] == '%') continue;
    return true;
  }
  return false;
}

SpMat read_sparse_impl(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  int lineno = 0;
  const MarketHeader h = read_banner(in, path, lineno);

  std::string line;
  if (!next_data_line(in, line, lineno)) fail(path, lineno, "missing size line");

  if (h.coordinate) {
    long rows = 0, cols = 0, nnz = 0;
    {
      std::istringstream ss(line);
      if (!(ss >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0)
        fail(path, lineno, "malformed coordinate size line");
    }
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(h.symmetric ? 2 * nnz : nnz));
    for (long k = 0; k < nnz; ++k) {
      if (!next_data_line(in, line, lineno)) fail(path, lineno, "unexpected end of file");
      std::istringstream ss(line);
      long i = 0, j = 0;
      double v = 0.0;
      if (!(ss >> i >> j >> v)) fail(path, lineno, "malformed coordinate entry");
      if (i < 1 || i > rows || j < 1 || j > cols)
        fail(path, lineno, "index out of range");
      trips.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
      if (h.symmetric && i != j)
        trips.emplace_back(static_cast<int>(j - 1), static_cast<int>(i - 1), v);
    }
    SpMat m(static_cast<Index>(rows), static_cast<Index>(cols));
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return m;
  }

  long rows = 0, cols = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> rows >> cols) || rows < 0 || cols < 0)
      fail(path, lineno, "malformed array size line");
  }
  MatX dense(rows, cols);
  for (long j = 0; j < cols; ++j) {
    const long i0 = h.symmetric ? j : 0;
    for (long i = i0; i < rows; ++i) {
      if (!next_data_line(in, line, lineno)) fail(path, lineno, "unexpected end of file");
      std::istringstream ss(line);
      double v = 0.0;
      if (!(ss >> v)) fail(path, lineno, "malformed array entry");
      dense(i, j) = v;
      if (h.symmetric) dense(j, i) = v;
    }
  }
  return dense.sparseView();
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

} // namespace

SpMat read_market_sparse(const std::string &path) { return read_sparse_impl(path); }

MatX read_market_dense(const std::string &path) {
  return MatX(read_sparse_impl(path));
}

void write_market(const std::string &path, const SpMat &m) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      out << (it.row() + 1) << " " << (it.col() + 1) << " "
          << format_value(it.value()) << "\n";
    }
  }
}

void write_market(const std::string &path, const MatX &m) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << " " << m.cols() << "\n";
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) out << format_value(m(i, j)) << "\n";
}

std::map<std::string, std::string> read_manifest(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open manifest");
  const auto dir = std::filesystem::path(path).parent_path();
  std::map<std::string, std::string> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(path, lineno, "expected 'role = path'");
    const std::string role = trim(line.substr(0, eq));
    const std::string rel = trim(line.substr(eq + 1));
    if (role.empty() || rel.empty()) fail(path, lineno, "expected 'role = path'");
    entries[role] = (dir / rel).string();
  }
  return entries;
}

void write_manifest(const std::string &path,
                    const std::map<std::string, std::string> &entries) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  for (const auto &[role, file] : entries) out << role << " = " << file << "\n";
}

} // namespace flmor
