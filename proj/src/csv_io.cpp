#include "censee/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "censee/errors.hpp"

namespace censee {

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

double parse_cell(const std::string& cell, int row, int col) {
  const char* b = cell.data();
  const char* e = b + cell.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (*(e - 1) == ' ' || *(e - 1) == '\t')) --e;
  double v = 0.0;
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e)
    throw Error("csv", "non-numeric cell at row " + std::to_string(row) + ", column " +
                           std::to_string(col + 1));
  return v;
}

}  // namespace

Dataset parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("csv", "cannot open " + path);
  std::string line;
  double censor_level = 0.0;

  // Optional metadata line.
  if (!std::getline(in, line)) throw Error("csv", "empty file: " + path);
  if (!line.empty() && line[0] == '#') {
    auto pos = line.find("censor_level=");
    if (pos != std::string::npos)
      censor_level = parse_cell(line.substr(pos + 13), 0, 0);
    if (!std::getline(in, line)) throw Error("csv", "missing header row in " + path);
  }

  auto header = split_line(line);
  int y_col = -1;
  for (size_t c = 0; c < header.size(); ++c) {
    std::string name = header[c];
    // trim
    while (!name.empty() && (name.back() == ' ' || name.back() == '\t')) name.pop_back();
    while (!name.empty() && (name.front() == ' ' || name.front() == '\t')) name.erase(0, 1);
    header[c] = name;
    if (name == "y") y_col = static_cast<int>(c);
  }
  if (y_col < 0) throw Error("csv", "missing required column \"y\" in " + path);
  const int ncols = static_cast<int>(header.size());
  const int p = ncols - 1;
  if (p < 1) throw Error("csv", "need at least one covariate column besides y");

  std::vector<double> ys;
  std::vector<double> xs;
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (static_cast<int>(cells.size()) != ncols)
      throw Error("csv", "ragged row " + std::to_string(row + 1) + ": expected " +
                             std::to_string(ncols) + " cells, got " +
                             std::to_string(cells.size()));
    for (int c = 0; c < ncols; ++c) {
      double v = parse_cell(cells[static_cast<size_t>(c)], row + 1, c);
      if (c == y_col)
        ys.push_back(v);
      else
        xs.push_back(v);
    }
    ++row;
  }
  if (row == 0) throw Error("csv", "no data rows in " + path);

  Dataset d;
  d.censor_level = censor_level;
  d.y = Eigen::Map<Eigen::VectorXd>(ys.data(), row);
  d.X.resize(row, p);
  for (int i = 0; i < row; ++i)
    for (int j = 0; j < p; ++j) d.X(i, j) = xs[static_cast<size_t>(i) * p + j];
  d.validate();
  return d;
}

void write_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("csv", "cannot write " + path);
  out << "# censor_level=" << format_double(d.censor_level) << "\n";
  out << "y";
  for (Eigen::Index j = 0; j < d.p(); ++j) out << ",x" << (j + 1);
  out << "\n";
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    out << format_double(d.y[i]);
    for (Eigen::Index j = 0; j < d.p(); ++j) out << "," << format_double(d.X(i, j));
    out << "\n";
  }
  if (!out) throw Error("csv", "write failed for " + path);
}

}  // namespace censee
