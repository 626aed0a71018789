#include "somor/mmio.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "somor/csv.hpp"

namespace somor {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& msg) {
  throw ParseError(path + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

MatrixXd read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open Matrix Market file '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) fail(path, 1, "empty file");
  ++lineno;
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket" || lower(object) != "matrix") fail(path, lineno, "missing %%MatrixMarket matrix banner");
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (format != "coordinate" && format != "array") fail(path, lineno, "unknown format '" + format + "'");
  if (field != "real" && field != "integer" && field != "double") fail(path, lineno, "unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric") {
    fail(path, lineno, "unsupported symmetry '" + symmetry + "'");
  }
  const bool sym = symmetry == "symmetric";
  const bool skew = symmetry == "skew-symmetric";

  auto next_data_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++lineno;
      auto pos = out.find_first_not_of(" \t\r");
      if (pos == std::string::npos || out[pos] == '%') continue;
      return true;
    }
    return false;
  };

  if (!next_data_line(line)) fail(path, lineno, "missing size line");
  std::istringstream size_line(line);
  long rows = 0, cols = 0, nnz = 0;
  if (!(size_line >> rows >> cols) || rows <= 0 || cols <= 0) fail(path, lineno, "invalid size line");
  if (format == "coordinate" && !(size_line >> nnz)) fail(path, lineno, "coordinate size line needs an entry count");
  if ((sym || skew) && rows != cols) fail(path, lineno, "symmetric matrix must be square");

  MatrixXd A = MatrixXd::Zero(rows, cols);
  if (format == "coordinate") {
    for (long e = 0; e < nnz; ++e) {
      if (!next_data_line(line)) fail(path, lineno, "expected " + std::to_string(nnz) + " entries, got " + std::to_string(e));
      std::istringstream ls(line);
      long i = 0, j = 0;
      double v = 0.0;
      if (!(ls >> i >> j >> v)) fail(path, lineno, "malformed entry");
      if (i < 1 || i > rows || j < 1 || j > cols) fail(path, lineno, "index out of range");
      A(i - 1, j - 1) += v;
      if ((sym || skew) && i != j) A(j - 1, i - 1) += skew ? -v : v;
    }
  } else {
    // column-major; symmetric storage lists the lower triangle only
    for (long j = 0; j < cols; ++j) {
      for (long i = (sym || skew) ? j + (skew ? 1 : 0) : 0; i < rows; ++i) {
        if (!next_data_line(line)) fail(path, lineno, "too few array entries");
        std::istringstream ls(line);
        double v = 0.0;
        if (!(ls >> v)) fail(path, lineno, "malformed value");
        A(i, j) = v;
        if ((sym || skew) && i != j) A(j, i) = skew ? -v : v;
      }
    }
  }
  if (next_data_line(line)) fail(path, lineno, "unexpected trailing data");
  return A;
}

void write_matrix_market(const std::string& path, const MatrixXd& A) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write '" + path + "'");
  out << "%%MatrixMarket matrix array real general\n";
  out << A.rows() << " " << A.cols() << "\n";
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    for (Eigen::Index i = 0; i < A.rows(); ++i) out << csv::format(A(i, j)) << "\n";
  }
}

LinearSecondOrderSystem load_linear_system(const LinearSystemPaths& paths) {
  MatrixXd M = read_matrix_market(paths.M);
  MatrixXd K = read_matrix_market(paths.K);
  MatrixXd B = read_matrix_market(paths.B);
  MatrixXd D = paths.D ? read_matrix_market(*paths.D) : MatrixXd::Zero(M.rows(), M.cols());
  MatrixXd C = paths.C ? read_matrix_market(*paths.C) : MatrixXd(B.transpose());
  std::ostringstream report;
  const auto n = M.rows();
  if (M.cols() != n) report << " M is " << M.rows() << "x" << M.cols() << ";";
  if (K.rows() != n || K.cols() != n) report << " K is " << K.rows() << "x" << K.cols() << ";";
  if (D.rows() != n || D.cols() != n) report << " D is " << D.rows() << "x" << D.cols() << ";";
  if (B.rows() != n) report << " B has " << B.rows() << " rows;";
  if (C.cols() != n) report << " C has " << C.cols() << " columns;";
  if (!report.str().empty()) throw ArgumentError("inconsistent dimensions (n=" + std::to_string(n) + "):" + report.str());
  return LinearSecondOrderSystem(std::move(M), std::move(D), std::move(K), std::move(B), std::move(C));
}

}  // namespace somor
