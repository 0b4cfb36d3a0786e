#pragma once

#include "twostacks/error.hpp"
#include "twostacks/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace twostacks {

struct EstimateRow {
  std::size_t n = 0;
  Real value;
  Real std_dev;
  std::size_t samples = 0;
};

/// (n, value, std_dev, samples) rows for predicted coefficients, ratios or
/// estimator sequences.
struct EstimateTable {
  std::vector<EstimateRow> rows;

  bool empty() const noexcept { return rows.empty(); }
  std::size_t size() const noexcept { return rows.size(); }

  const EstimateRow* find(std::size_t n) const {
    for (const auto& r : rows)
      if (r.n == n) return &r;
    return nullptr;
  }
};

inline void write_csv(std::ostream& out, const EstimateTable& t) {
  out << "n,value,std_dev,samples\n";
  for (const auto& r : t.rows) {
    out << r.n << ',' << format_sci(r.value) << ',' << format_sci(r.std_dev) << ',' << r.samples << '\n';
  }
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) {
    const auto a = f.find_first_not_of(" \t\r");
    const auto b = f.find_last_not_of(" \t\r");
    fields.push_back(a == std::string::npos ? std::string() : f.substr(a, b - a + 1));
  }
  return fields;
}

}  // namespace detail

/// Reads the CSV written by write_csv. Comment lines ('#') are skipped; the
/// samples column is optional.
inline EstimateTable read_csv(std::istream& in) {
  EstimateTable t;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto fields = detail::split_csv(line);
    if (!header_seen) {
      header_seen = true;
      if (fields.empty() || fields[0] != "n") {
        throw Error(ErrorKind::InputFormat, "line " + std::to_string(line_no) + ": expected a header starting with 'n'");
      }
      continue;
    }
    if (fields.size() < 3) throw Error(ErrorKind::InputFormat, "line " + std::to_string(line_no) + ": too few columns");
    try {
      EstimateRow r;
      r.n = std::stoul(fields[0]);
      r.value = Real(fields[1]);
      r.std_dev = Real(fields[2]);
      r.samples = fields.size() > 3 && !fields[3].empty() ? std::stoul(fields[3]) : 0;
      t.rows.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw Error(ErrorKind::InputFormat, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return t;
}

inline EstimateTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InputFormat, "cannot open table '" + path + "'");
  return read_csv(in);
}

struct TrimmedStats {
  Real mean;
  Real std_dev;  // sample standard deviation of the kept values
  std::size_t kept = 0;
};

/// Sorts, drops ceil(trim * count) values from each end, and reports the
/// mean and sample standard deviation of the rest.
inline TrimmedStats trimmed_stats(std::vector<Real> values, double trim) {
  if (trim < 0 || trim >= 0.5) throw Error(ErrorKind::InvalidArgument, "trim fraction must lie in [0, 0.5)");
  std::sort(values.begin(), values.end());
  const auto count = values.size();
  const auto drop = static_cast<std::size_t>(std::ceil(trim * static_cast<double>(count) - 1e-12));
  TrimmedStats out;
  if (count <= 2 * drop) return out;
  const auto begin = values.begin() + static_cast<std::ptrdiff_t>(drop);
  const auto end = values.end() - static_cast<std::ptrdiff_t>(drop);
  out.kept = static_cast<std::size_t>(end - begin);
  Real sum = 0;
  for (auto it = begin; it != end; ++it) sum += *it;
  out.mean = sum / out.kept;
  Real ss = 0;
  for (auto it = begin; it != end; ++it) ss += (*it - out.mean) * (*it - out.mean);
  out.std_dev = out.kept > 1 ? Real(sqrt(ss / (out.kept - 1))) : Real(0);
  return out;
}

}  // namespace twostacks
