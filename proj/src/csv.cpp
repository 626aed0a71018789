#include "somor/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "somor/errors.hpp"

namespace somor::csv {

std::string format(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s, const std::string& path, std::size_t line) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && (*b == ' ' || *b == '"')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '"' || e[-1] == '\r')) --e;
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) {
    throw ParseError(path + ":" + std::to_string(line) + ": not a number: '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"') {
      // a doubled quote inside a quoted cell is a literal quote
      if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else {
        quoted = !quoted;
      }
    } else if (c == ',' && !quoted) {
      out.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  out.push_back(cell);
  return out;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

void write(const std::string& path, const Table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write '" + path + "'");
  for (std::size_t j = 0; j < table.header.size(); ++j) out << (j ? "," : "") << quote(table.header[j]);
  out << "\n";
  const bool labelled = !table.labels.empty();
  if (labelled && table.labels.size() != table.rows.size()) throw ArgumentError("one label per row required");
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (labelled) out << quote(table.labels[i]);
    const auto& row = table.rows[i];
    for (std::size_t j = 0; j < row.size(); ++j) out << ((j || labelled) ? "," : "") << format(row[j]);
    out << "\n";
  }
}

Table read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open CSV file '" + path + "'");
  Table t;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(path + ": empty CSV file");
  ++lineno;
  t.header = split(line);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                       " fields, got " + std::to_string(cells.size()));
    }
    std::size_t first = 0;
    double dummy = 0.0;
    const auto& c0 = cells[0];
    const bool numeric = std::from_chars(c0.data(), c0.data() + c0.size(), dummy).ec == std::errc() || c0.empty();
    if (!numeric) {
      if (t.rows.size() != t.labels.size()) throw ParseError(path + ":" + std::to_string(lineno) + ": mixed labelled rows");
      t.labels.push_back(c0);
      first = 1;
    } else if (!t.labels.empty()) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": missing row label");
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (std::size_t j = first; j < cells.size(); ++j) row.push_back(parse_double(cells[j], path, lineno));
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_matrix(const std::string& path, const MatrixXd& M, const std::string& prefix) {
  Table t;
  for (Eigen::Index j = 0; j < M.cols(); ++j) t.header.push_back(prefix + "_" + std::to_string(j + 1));
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(M.cols()));
    for (Eigen::Index j = 0; j < M.cols(); ++j) row[static_cast<std::size_t>(j)] = M(i, j);
    t.rows.push_back(std::move(row));
  }
  write(path, t);
}

MatrixXd read_matrix(const std::string& path) {
  Table t = read(path);
  MatrixXd M(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (std::size_t j = 0; j < t.header.size(); ++j) {
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t.rows[i][j];
    }
  }
  return M;
}

void write_trajectory(const std::string& path, const Trajectory& tr) {
  Table t;
  t.header.push_back("t");
  for (Eigen::Index i = 0; i < tr.Q.rows(); ++i) t.header.push_back("q_" + std::to_string(i + 1));
  for (Eigen::Index i = 0; i < tr.Y.rows(); ++i) t.header.push_back("y_" + std::to_string(i + 1));
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    const auto c = static_cast<Eigen::Index>(k);
    std::vector<double> row;
    row.reserve(t.header.size());
    row.push_back(tr.times[k]);
    for (Eigen::Index i = 0; i < tr.Q.rows(); ++i) row.push_back(tr.Q(i, c));
    for (Eigen::Index i = 0; i < tr.Y.rows(); ++i) row.push_back(tr.Y(i, c));
    t.rows.push_back(std::move(row));
  }
  write(path, t);
}

}  // namespace somor::csv
