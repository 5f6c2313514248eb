#pragma once

#include <complex>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "bvmlab/spectral.hpp"

namespace bvmlab {

// Shortest round-trip-safe text for a double (17 significant digits).
std::string format_double(double v);

// Plain-text table: a header line of field names, a line of field values,
// a column header line, then one row per record.
struct Table {
  std::vector<std::string> fields;
  std::vector<std::string> values;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string field(const std::string& name) const;
};

void write_table(std::ostream& os, const Table& t);
Table read_table(std::istream& is);

Table coefficient_table(const CoefficientFunction& f);
CoefficientFunction coefficients_from_table(const Table& t);

void write_coefficients(const std::string& path, const CoefficientFunction& f);
CoefficientFunction read_coefficients(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace bvmlab
