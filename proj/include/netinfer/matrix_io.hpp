#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

namespace netinfer {

// Matrix text format: first line "rows cols", then `rows` lines of
// whitespace-separated decimal floats. Values are written as the shortest
// decimal strings that round-trip IEEE doubles exactly.
Eigen::MatrixXd read_matrix(std::istream& in);
Eigen::MatrixXd load_matrix(const std::string& path);
void write_matrix(std::ostream& out, const Eigen::MatrixXd& m);
void save_matrix(const std::string& path, const Eigen::MatrixXd& m);

// Shortest decimal string that round-trips the double exactly.
std::string format_double(double v);

}  // namespace netinfer
