// SPDX-License-Identifier: Apache-2.0

#ifndef FLMOR_MATRIX_MARKET_HPP
#define FLMOR_MATRIX_MARKET_HPP

#include <map>
#include <string>

#include "flmor/types.hpp"

namespace flmor {

// Matrix Market I/O for real matrices: coordinate and array formats,
// general and symmetric qualifiers. Symmetric files are expanded to full
// storage on read; writers always emit the general qualifier.

// Reads either format as a sparse matrix.
SpMat read_market_sparse(const std::string &path);

// Reads either format as a dense matrix.
MatX read_market_dense(const std::string &path);

void write_market(const std::string &path, const SpMat &m);
void write_market(const std::string &path, const MatX &m);

// Plain-text manifest: one "role = relative/path.mtx" assignment per line,
// '#' comments. Paths are resolved against the manifest's directory.
std::map<std::string, std::string> read_manifest(const std::string &path);
void write_manifest(const std::string &path,
                    const std::map<std::string, std::string> &entries);

} // namespace flmor

#endif
