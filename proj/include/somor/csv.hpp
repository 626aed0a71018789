#pragma once

#include <string>
#include <vector>

#include "somor/linalg.hpp"
#include "somor/timeint.hpp"

namespace somor::csv {

/// Shortest representation that parses back to the same double.
std::string format(double x);

/// Numeric table. When `labels` is non-empty the first column holds one text
/// label per row and header[0] names that column.
struct Table {
  std::vector<std::string> header;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;
};

void write(const std::string& path, const Table& table);
Table read(const std::string& path);

/// Columns of M as CSV columns named prefix_1..prefix_k.
void write_matrix(const std::string& path, const MatrixXd& M, const std::string& prefix = "v");
MatrixXd read_matrix(const std::string& path);

/// Header t,q_1..q_n,y_1..y_p; one row per time.
void write_trajectory(const std::string& path, const Trajectory& tr);

}  // namespace somor::csv
