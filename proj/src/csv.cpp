#include "htevim/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace htevim {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == x) return buf;
  }
  return buf;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool is_missing(const std::string& cell) {
  const std::string t = trim(cell);
  return t.empty() || t == "NA" || t == "na" || t == "NaN" || t == "nan" ||
         t == "NULL";
}

bool parse_double(const std::string& cell, double* out) {
  const std::string t = trim(cell);
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, *out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

void write_dataset_csv(const Dataset& data, const std::string& path,
                       const std::string& treatment_col,
                       const std::string& outcome_col) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (Eigen::Index j = 0; j < data.p(); ++j) {
    const std::string name = j < static_cast<Eigen::Index>(data.names.size())
                                 ? data.names[j]
                                 : "w" + std::to_string(j + 1);
    out << name << ",";
  }
  out << treatment_col << "," << outcome_col << "\n";
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.p(); ++j)
      out << format_double(data.W(i, j)) << ",";
    out << format_double(data.A[i]) << "," << format_double(data.Y[i]) << "\n";
  }
}

CsvReadResult read_dataset_csv(const std::string& path, const CsvReadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ": empty file");
  std::vector<std::string> header = split_line(line);
  for (auto& h : header) h = trim(h);

  auto find_col = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw std::runtime_error(path + ": column not found: " + name);
    return static_cast<int>(it - header.begin());
  };

  const int a_col = find_col(opts.treatment_col);
  const int y_col = find_col(opts.outcome_col);

  std::vector<int> w_cols;
  std::vector<std::string> w_names;
  if (opts.covariate_cols.empty()) {
    for (int j = 0; j < static_cast<int>(header.size()); ++j) {
      if (j != a_col && j != y_col) {
        w_cols.push_back(j);
        w_names.push_back(header[j]);
      }
    }
  } else {
    for (const auto& name : opts.covariate_cols) {
      const int j = find_col(name);
      if (j == a_col || j == y_col)
        throw std::runtime_error(path + ": covariate overlaps treatment/outcome: " + name);
      w_cols.push_back(j);
      w_names.push_back(name);
    }
  }
  if (w_cols.empty()) throw std::runtime_error(path + ": no covariate columns");

  std::vector<std::vector<double>> w_rows;
  std::vector<double> a_vals, y_vals;
  int dropped = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": expected " + std::to_string(header.size()) +
                               " cells, got " + std::to_string(cells.size()));

    bool missing = is_missing(cells[a_col]) || is_missing(cells[y_col]);
    for (int j : w_cols) missing = missing || is_missing(cells[j]);
    if (missing) {
      ++dropped;
      continue;
    }

    auto value_at = [&](int j) {
      double v;
      if (!parse_double(cells[j], &v))
        throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                 ": cannot parse '" + trim(cells[j]) +
                                 "' in column " + header[j]);
      return v;
    };

    const double a = value_at(a_col);
    if (a != 0.0 && a != 1.0)
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": treatment value must be 0 or 1, got " +
                               trim(cells[a_col]));
    std::vector<double> w(w_cols.size());
    for (size_t k = 0; k < w_cols.size(); ++k) w[k] = value_at(w_cols[k]);
    w_rows.push_back(std::move(w));
    a_vals.push_back(a);
    y_vals.push_back(value_at(y_col));
  }

  const int n = static_cast<int>(y_vals.size());
  const int p = static_cast<int>(w_cols.size());
  CsvReadResult result;
  result.rows_dropped_missing = dropped;
  result.dataset.W.resize(n, p);
  result.dataset.A.resize(n);
  result.dataset.Y.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) result.dataset.W(i, j) = w_rows[i][j];
    result.dataset.A[i] = a_vals[i];
    result.dataset.Y[i] = y_vals[i];
  }
  result.dataset.names = w_names;
  return result;
}

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("Table::add_row: cell count mismatch");
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::ostringstream out;
  for (size_t j = 0; j < columns.size(); ++j)
    out << columns[j] << (j + 1 < columns.size() ? "," : "");
  out << "\n";
  for (const auto& row : rows) {
    for (size_t j = 0; j < row.size(); ++j)
      out << row[j] << (j + 1 < row.size() ? "," : "");
    out << "\n";
  }
  return out.str();
}

std::string Table::to_markdown() const {
  std::ostringstream out;
  out << "|";
  for (const auto& c : columns) out << " " << c << " |";
  out << "\n|";
  for (size_t j = 0; j < columns.size(); ++j) out << " --- |";
  out << "\n";
  for (const auto& row : rows) {
    out << "|";
    for (const auto& cell : row) out << " " << cell << " |";
    out << "\n";
  }
  return out.str();
}

void Table::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << to_csv();
}

void Table::write_markdown(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << to_markdown();
}

}  // namespace htevim
