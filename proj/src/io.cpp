#include "cholcov/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cholcov {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t next = line.find(',', pos);
    if (next == std::string::npos) next = line.size();
    const std::string cell = line.substr(pos, next - pos);
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str()) return false;
    while (end && *end == ' ') ++end;
    if (end && *end != '\0' && *end != '\r') return false;
    out.push_back(v);
    pos = next + 1;
    if (next == line.size()) break;
  }
  return !out.empty();
}

bool blank(const std::string& line) {
  for (char c : line)
    if (c != ' ' && c != '\t' && c != '\r') return false;
  return true;
}

}  // namespace

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  std::vector<double> row;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    if (!parse_row(line, row)) {
      if (first) {
        first = false;  // header line
        continue;
      }
      throw IoError("non-numeric row in " + path);
    }
    first = false;
    if (!rows.empty() && rows.front().size() != row.size())
      throw IoError("ragged rows in " + path);
    rows.push_back(row);
  }
  if (rows.empty()) return Matrix(0, 0);
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j)
      out << (j ? "," : "") << header[j];
    out << '\n';
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
}

LocationSet read_locations_csv(const std::string& path) {
  return LocationSet(read_matrix_csv(path));
}

void write_locations_csv(const std::string& path, const LocationSet& locs) {
  std::vector<std::string> header;
  for (int j = 0; j < locs.dim(); ++j) header.push_back("x" + std::to_string(j + 1));
  write_matrix_csv(path, locs.coords, header);
}

void write_ordering_csv(const std::string& path, const OrderedGeometry& geometry) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "ordered_index,original_index,neighbors\n";
  for (int k = 0; k < geometry.size(); ++k) {
    out << (k + 1) << ',' << (geometry.perm[static_cast<std::size_t>(k)] + 1) << ',';
    const auto& g = geometry.neighbors[static_cast<std::size_t>(k)];
    for (std::size_t j = 0; j < g.size(); ++j) out << (j ? ";" : "") << (g[j] + 1);
    out << '\n';
  }
}

}  // namespace cholcov
