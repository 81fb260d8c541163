#include "ompath/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ompath {

std::string format_full(double x) {
  if (x == 0.0) x = 0.0;  // canonicalize -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_path_csv(std::ostream& out, const Path& p) {
  out << "t";
  for (Eigen::Index c = 0; c < p.dim(); ++c) out << ",x" << (c + 1);
  out << "\n";
  for (Eigen::Index i = 0; i < p.grid.nodes(); ++i) {
    out << format_full(p.grid.t(i));
    for (Eigen::Index c = 0; c < p.dim(); ++c) out << "," << format_full(p.values(i, c));
    out << "\n";
  }
}

void write_path_csv(const std::string& filename, const Path& p) {
  std::ofstream out(filename);
  if (!out) throw std::runtime_error("cannot open " + filename + " for writing");
  write_path_csv(out, p);
}

Path read_path_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("path csv: missing header");
  Eigen::Index dim = 0;
  for (char ch : line)
    if (ch == ',') ++dim;
  if (dim < 1) throw std::runtime_error("path csv: header must be t,x1,...,xd");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<double> row;
    while (std::getline(ss, field, ',')) row.push_back(std::stod(field));
    if (static_cast<Eigen::Index>(row.size()) != dim + 1)
      throw std::runtime_error("path csv: ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.size() < 3) throw std::runtime_error("path csv: need at least 3 nodes");

  TimeGrid grid(static_cast<Eigen::Index>(rows.size()) - 1);
  Path p(grid, dim);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Eigen::Index c = 0; c < dim; ++c) p.values(static_cast<Eigen::Index>(i), c) = rows[i][c + 1];
  return p;
}

Path read_path_csv(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw std::runtime_error("cannot open " + filename);
  return read_path_csv(in);
}

void write_kv(std::ostream& out, const KeyValues& kv) {
  for (const auto& [key, value] : kv) out << key << "=" << value << "\n";
}

void write_kv(const std::string& filename, const KeyValues& kv) {
  std::ofstream out(filename);
  if (!out) throw std::runtime_error("cannot open " + filename + " for writing");
  write_kv(out, kv);
}

}  // namespace ompath
