#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "cwica/matrix.hpp"

namespace cwica {

/// Matrix CSV: one row per sample, '.' decimal separator, shortest
/// round-trippable double formatting (reload is bit-identical). No header
/// unless requested; the optional header names columns c0..c{D-1}.
void write_matrix_csv(std::ostream& out, const Matrix& m, bool header = false);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m, bool header = false);

Matrix read_matrix_csv(std::istream& in, bool header = false);
Matrix read_matrix_csv(const std::filesystem::path& path, bool header = false);

/// Shortest decimal form of `v` that parses back to the same bits.
std::string format_double(double v);

/// Strict double parse of a full token.
double parse_double(const std::string& token);

} // namespace cwica
