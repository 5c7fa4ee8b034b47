#ifndef CHOLCOV_IO_HPP
#define CHOLCOV_IO_HPP

#include <string>
#include <vector>

#include "cholcov/geometry.hpp"

namespace cholcov {

/// Numeric CSV ('.' decimal, comma separators). A non-numeric first line is
/// treated as a header and skipped on read; writes emit 17-significant-digit
/// values so outputs round-trip exactly.
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header = {});

LocationSet read_locations_csv(const std::string& path);
void write_locations_csv(const std::string& path, const LocationSet& locs);

/// Ordering export: one row per ordered position with the 1-based original
/// index and the semicolon-joined 1-based ordered neighbor indices.
void write_ordering_csv(const std::string& path, const OrderedGeometry& geometry);

std::string format_double(double v);

}  // namespace cholcov

#endif  // CHOLCOV_IO_HPP
