#include "flt/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "flt/errors.hpp"

namespace flt {

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  // trailing blank lines are tolerated
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

double parse_cell(const std::string& text, const std::string& path, int row,
                  int col) {
  const char* b = text.data();
  const char* e = b + text.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (*(e - 1) == ' ' || *(e - 1) == '\t')) --e;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(b, e, value);
  if (ec != std::errc{} || ptr != e || b == e)
    throw InputError(path + ": row " + std::to_string(row) + ", column " +
                     std::to_string(col) + ": cannot parse '" + text + "'");
  if (!std::isfinite(value))
    throw InputError(path + ": row " + std::to_string(row) + ", column " +
                     std::to_string(col) + ": non-finite value");
  return value;
}

std::vector<double> parse_row(const std::string& line, const std::string& path,
                              int row) {
  std::vector<double> out;
  std::size_t start = 0;
  int col = 1;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string cell = line.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    out.push_back(parse_cell(cell, path, row, col));
    if (comma == std::string::npos) break;
    start = comma + 1;
    ++col;
  }
  return out;
}

}  // namespace

CurvesFile read_curves_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.size() < 2)
    throw InputError(path + ": need a grid row and at least one curve row");

  const auto grid_row = parse_row(lines[0], path, 1);
  const int p = static_cast<int>(grid_row.size());
  if (p < 2) throw InputError(path + ": grid row has fewer than 2 points");

  CurvesFile out;
  out.grid_points = Eigen::Map<const Eigen::VectorXd>(grid_row.data(), p);
  const int n = static_cast<int>(lines.size()) - 1;
  out.curves.resize(n, p);
  for (int i = 0; i < n; ++i) {
    const auto row = parse_row(lines[i + 1], path, i + 2);
    if (static_cast<int>(row.size()) != p)
      throw InputError(path + ": row " + std::to_string(i + 2) + " has " +
                       std::to_string(row.size()) + " cells, expected " +
                       std::to_string(p));
    out.curves.row(i) = Eigen::Map<const Eigen::VectorXd>(row.data(), p);
  }
  return out;
}

Eigen::VectorXd read_responses_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw InputError(path + ": empty responses file");
  Eigen::VectorXd y(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].find(',') != std::string::npos)
      throw InputError(path + ": row " + std::to_string(i + 1) +
                       ": expected a single column");
    y(static_cast<Eigen::Index>(i)) =
        parse_cell(lines[i], path, static_cast<int>(i) + 1, 1);
  }
  return y;
}

namespace {

std::string format_matrix_csv(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  os.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << m(i, j);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace

void write_curves_csv(const std::string& path,
                      const Eigen::VectorXd& grid_points,
                      const Eigen::MatrixXd& curves) {
  Eigen::MatrixXd all(curves.rows() + 1, curves.cols());
  all.row(0) = grid_points.transpose();
  all.bottomRows(curves.rows()) = curves;
  atomic_write_text(path, format_matrix_csv(all));
}

void write_responses_csv(const std::string& path, const Eigen::VectorXd& y) {
  atomic_write_text(path, format_matrix_csv(y));
}

void atomic_write_text(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw InputError("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace flt
