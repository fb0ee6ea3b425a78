#include "netinfer/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "netinfer/errors.hpp"

namespace netinfer {

Eigen::MatrixXd read_matrix(std::istream& in) {
  std::string header;
  if (!std::getline(in, header))
    throw FormatError("matrix: empty input, expected 'rows cols' header");
  std::istringstream hs(header);
  long long rows = -1, cols = -1;
  if (!(hs >> rows >> cols) || rows < 0 || cols < 0)
    throw FormatError("matrix: malformed header, expected 'rows cols'");
  std::string rest;
  if (hs >> rest)
    throw FormatError("matrix: trailing tokens after 'rows cols' header");
  Eigen::MatrixXd m(rows, cols);
  for (long long i = 0; i < rows; ++i) {
    std::string line;
    if (!std::getline(in, line))
      throw FormatError("matrix: expected " + std::to_string(rows) +
                        " rows, got " + std::to_string(i));
    std::istringstream ls(line);
    for (long long j = 0; j < cols; ++j) {
      double v;
      if (!(ls >> v))
        throw FormatError("matrix: row " + std::to_string(i) + " has fewer than " +
                          std::to_string(cols) + " entries");
      m(i, j) = v;
    }
    if (ls >> rest)
      throw FormatError("matrix: row " + std::to_string(i) +
                        " has more than " + std::to_string(cols) + " entries");
  }
  return m;
}

Eigen::MatrixXd load_matrix(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("matrix: cannot open '" + path + "'");
  return read_matrix(f);
}

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  out << m.rows() << " " << m.cols() << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << " ";
      out << format_double(m(i, j));
    }
    out << "\n";
  }
}

void save_matrix(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream f(path);
  if (!f) throw FormatError("matrix: cannot open '" + path + "' for writing");
  write_matrix(f, m);
}

}  // namespace netinfer
