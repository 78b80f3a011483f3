#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "jgecert/tensor.hpp"

namespace jgecert::io {

// Plain-text formats. Every file starts with a comma-separated header line and
// then lists one value per line, printed with 17 significant digits so a
// write/read round trip is exact.
//
//   tensor:   "dims,I1,I2,I3"        then I1*I2*I3 entries, mode-1 fastest
//   factors:  "factors,I1,I2,I3,R"   then A, B, C each column-major
//   matrix:   "matrix,rows,cols"     then entries column-major
//
// Blank lines and lines starting with '#' are ignored by the readers.

void write_tensor(std::ostream& os, const Tensor3& t);
Tensor3 read_tensor(std::istream& is);
void save_tensor(const std::filesystem::path& path, const Tensor3& t);
Tensor3 load_tensor(const std::filesystem::path& path);

void write_factors(std::ostream& os, const FactorTriple& f);
FactorTriple read_factors(std::istream& is);
void save_factors(const std::filesystem::path& path, const FactorTriple& f);
FactorTriple load_factors(const std::filesystem::path& path);

void write_matrix(std::ostream& os, const Matrix& m);
Matrix read_matrix(std::istream& is);
void save_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix(const std::filesystem::path& path);

/// "%.17g" formatting shared by all text outputs (CSV included).
std::string format_double(double v);

}  // namespace jgecert::io
