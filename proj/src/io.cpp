#include "squidharm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "squidharm/error.hpp"

namespace squidharm {

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ConfigError("missing column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

bool Table::has_column(const std::string& name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

void Table::add_row(std::vector<double> row) {
  require(row.size() == columns.size(), "row width does not match the header");
  rows.push_back(std::move(row));
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const Table& table) {
  for (const auto& c : table.comments) out << "# " << c << '\n';
  for (std::size_t k = 0; k < table.columns.size(); ++k) out << (k ? "," : "") << table.columns[k];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_number(row[k]);
    out << '\n';
  }
}

std::string to_csv(const Table& table) {
  std::ostringstream out;
  write_csv(out, table);
  return out.str();
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

Table read_csv(std::istream& in) {
  Table t;
  std::string line;
  int number = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header && line[0] == '#') {
      t.comments.push_back(line.size() > 2 && line[1] == ' ' ? line.substr(2) : line.substr(1));
      continue;
    }
    auto fields = split(line);
    if (!header) {
      t.columns = std::move(fields);
      header = true;
      continue;
    }
    if (fields.size() != t.columns.size()) {
      throw ConfigError("line " + std::to_string(number) + ": expected " + std::to_string(t.columns.size()) +
                        " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> row;
    for (const auto& f : fields) {
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw ConfigError("line " + std::to_string(number) + ": cannot parse '" + f + "'");
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (!header) throw ConfigError("table has no header row");
  return t;
}

Table read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return read_csv(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void atomic_write(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw ConfigError("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ConfigError("cannot move output into '" + path + "'");
  }
}

Table dataset_table(const TransitionDataset& data) {
  Table t;
  t.columns = {"flux_phi0", "i", "j", "ng", "freq_GHz", "weight"};
  t.comments.push_back("provenance=" + data.provenance);
  if (data.seed) t.comments.push_back("seed=" + std::to_string(*data.seed));
  for (const auto& r : data.records) t.add_row({r.flux_phi0, double(r.i), double(r.j), r.n_g, r.frequency, r.weight});
  return t;
}

TransitionDataset dataset_from_table(const Table& table) {
  const std::size_t cf = table.column("flux_phi0"), ci = table.column("i"), cj = table.column("j"),
                    cg = table.column("ng"), cv = table.column("freq_GHz");
  const bool weighted = table.has_column("weight");
  const std::size_t cw = weighted ? table.column("weight") : 0;
  TransitionDataset data;
  for (const auto& c : table.comments) {
    if (c.rfind("provenance=", 0) == 0) data.provenance = c.substr(11);
    if (c.rfind("seed=", 0) == 0) data.seed = std::stoull(c.substr(5));
  }
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& row = table.rows[k];
    auto level = [&](std::size_t col, const char* name) {
      const double v = row[col];
      if (v != std::floor(v) || v < 0 || v > 1e6) {
        throw ConfigError("row " + std::to_string(k + 1) + ": column '" + name + "' must be a level index");
      }
      return static_cast<int>(v);
    };
    data.records.push_back({row[cf], level(ci, "i"), level(cj, "j"), row[cg], row[cv], weighted ? row[cw] : 1.0});
  }
  return data;
}

Table ratio_table(const std::vector<LinePoint>& points) {
  Table t;
  t.columns = {"E_J1_GHz", "ratio", "sigma_E_J1_GHz", "sigma_ratio"};
  for (const auto& p : points) t.add_row({p.x, p.y, p.sigma_x, p.sigma_y});
  return t;
}

std::vector<LinePoint> ratio_points_from_table(const Table& table) {
  const std::size_t cx = table.column("E_J1_GHz"), cy = table.column("ratio"), sx = table.column("sigma_E_J1_GHz"),
                    sy = table.column("sigma_ratio");
  std::vector<LinePoint> out;
  for (const auto& row : table.rows) out.push_back({row[cx], row[cy], row[sx], row[sy]});
  return out;
}

}  // namespace squidharm
