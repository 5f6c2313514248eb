#include "bvmlab/tabular_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bvmlab/error.hpp"

namespace bvmlab {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

template <class T>
void join(std::ostream& os, const std::vector<T>& items) {
  for (std::size_t i = 0; i < items.size(); ++i) os << (i ? "," : "") << items[i];
  os << '\n';
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string Table::field(const std::string& name) const {
  for (std::size_t i = 0; i < fields.size() && i < values.size(); ++i)
    if (fields[i] == name) return values[i];
  fail(ErrorCode::Io, "table header lacks field '" + name + "'");
}

void write_table(std::ostream& os, const Table& t) {
  join(os, t.fields);
  join(os, t.values);
  join(os, t.columns);
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
  }
}

Table read_table(std::istream& is) {
  Table t;
  std::string line;
  if (!std::getline(is, line)) fail(ErrorCode::Io, "table: missing header line");
  t.fields = split_csv(line);
  if (!std::getline(is, line)) fail(ErrorCode::Io, "table: missing value line");
  t.values = split_csv(line);
  if (!std::getline(is, line)) fail(ErrorCode::Io, "table: missing column line");
  t.columns = split_csv(line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split_csv(line)) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        fail(ErrorCode::Io, "table: non-numeric cell '" + cell + "'");
      }
    }
    if (row.size() != t.columns.size()) fail(ErrorCode::Io, "table: ragged row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table coefficient_table(const CoefficientFunction& f) {
  Table t;
  t.fields = {"basis", "truncation"};
  t.values = {to_string(f.basis.tag), std::to_string(f.basis.truncation)};
  // Extra field only for the reversed zero-location ordering.
  if (f.basis.order == SineOrder::Reverse) {
    t.fields.push_back("order");
    t.values.push_back("reverse");
  }
  t.columns = {"index", "re", "im"};
  if (f.basis.tag == BasisTag::ZernikeDisk) {
    for (int j = 0; j < f.coeffs.size() / 2; ++j)
      t.rows.push_back({double(j), f.coeffs(2 * j), f.coeffs(2 * j + 1)});
  } else {
    for (int i = 0; i < f.coeffs.size(); ++i) t.rows.push_back({double(i), f.coeffs(i), 0.0});
  }
  return t;
}

CoefficientFunction coefficients_from_table(const Table& t) {
  const bool reverse = std::find(t.fields.begin(), t.fields.end(), "order") != t.fields.end() &&
                       t.field("order") == "reverse";
  const BasisId basis(parse_basis_tag(t.field("basis")), std::stoi(t.field("truncation")),
                      reverse ? SineOrder::Reverse : SineOrder::Forward);
  CoefficientFunction f(basis);
  const bool complex = basis.tag == BasisTag::ZernikeDisk;
  const std::size_t expected = complex ? f.coeffs.size() / 2 : f.coeffs.size();
  if (t.rows.size() != expected) fail(ErrorCode::Io, "coefficient table has wrong row count");
  for (const auto& row : t.rows) {
    const int i = static_cast<int>(row[0]);
    if (i < 0 || static_cast<std::size_t>(i) >= expected) fail(ErrorCode::Io, "coefficient index out of range");
    if (complex) {
      f.coeffs(2 * i) = row[1];
      f.coeffs(2 * i + 1) = row[2];
    } else {
      f.coeffs(i) = row[1];
    }
  }
  return f;
}

void write_coefficients(const std::string& path, const CoefficientFunction& f) {
  std::ostringstream os;
  write_table(os, coefficient_table(f));
  write_text_file(path, os.str());
}

CoefficientFunction read_coefficients(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  return coefficients_from_table(read_table(in));
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << content;
  if (!out) fail(ErrorCode::Io, "write failed for " + path);
}

}  // namespace bvmlab
