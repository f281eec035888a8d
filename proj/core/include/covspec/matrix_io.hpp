#pragma once

// Data matrix file formats.  CSV: rows = variables, columns = samples,
// optional header.  Binary: 16-byte magic "COVSPEC-MAT\0" (zero padded),
// a u32 length-prefixed UTF-8 JSON header {p, n, dtype, layout}, then the
// column-major little-endian payload (complex as interleaved re, im).

#include <iosfwd>
#include <string>
#include <variant>

#include <Eigen/Core>

#include "covspec/errors.hpp"

namespace covspec {

using DataMatrix = std::variant<Eigen::MatrixXd, Eigen::MatrixXcd>;

void write_matrix_binary(std::ostream& os, const DataMatrix& m);
DataMatrix read_matrix_binary(std::istream& is);

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(std::istream& is);

// Dispatches on extension: .csv vs binary.
DataMatrix load_matrix(const std::string& path);
void save_matrix(const std::string& path, const DataMatrix& m);

}  // namespace covspec
