#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "squidharm/fitting.hpp"

namespace squidharm {

// Numeric table with a header row; column names carry their units.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> comments;  // emitted as "# ..." lines before the header

  // Index of `name`; throws ConfigError naming the column when absent.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
  void add_row(std::vector<double> row);
  bool operator==(const Table&) const = default;
};

// Shortest decimal representation that parses back to the same double.
std::string format_number(double value);

void write_csv(std::ostream& out, const Table& table);
std::string to_csv(const Table& table);

// Lines starting with '#' before the header become comments. Throws
// ConfigError on ragged rows or unparsable fields (with the line number).
Table read_csv(std::istream& in);
Table read_csv_file(const std::string& path);

// Writes to a sibling temporary file and renames it into place.
void atomic_write(const std::string& path, const std::string& contents);

// flux_phi0,i,j,ng,freq_GHz,weight
Table dataset_table(const TransitionDataset& data);
// `weight` may be omitted (defaults to 1); other columns are required.
TransitionDataset dataset_from_table(const Table& table);

// E_J1_GHz,ratio,sigma_E_J1_GHz,sigma_ratio
Table ratio_table(const std::vector<LinePoint>& points);
std::vector<LinePoint> ratio_points_from_table(const Table& table);

}  // namespace squidharm
