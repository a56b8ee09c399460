#include "levyspec/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <vector>

#include "levyspec/errors.hpp"

namespace levyspec {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    cells.push_back(trim(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return cells;
}

bool parse_double(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  const char* first = cell.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

}  // namespace

Eigen::ArrayXd read_increments_csv(std::istream& in, const CsvReadOptions& opts) {
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  std::size_t columns = 0;
  std::size_t column = 0;
  bool seen_first = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cells = split(t);
    if (!seen_first) {
      seen_first = true;
      columns = cells.size();
      column = columns - 1;
      double probe;
      bool header = false;
      for (const auto& c : cells) header = header || !parse_double(c, probe);
      if (header) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
          if (cells[i] == "value") column = i;
        }
        continue;
      }
    }
    if (cells.size() != columns) {
      throw ParseError("expected " + std::to_string(columns) + " columns, found " + std::to_string(cells.size()),
                       lineno);
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      double v;
      if (!parse_double(cells[i], v)) throw ParseError("non-numeric cell '" + cells[i] + "'", lineno);
      if (i == column) values.push_back(v);
    }
  }
  if (opts.difference) {
    if (values.size() < 2) throw ParseError("differencing needs at least two observations", lineno);
    for (std::size_t i = 0; i + 1 < values.size(); ++i) values[i] = values[i + 1] - values[i];
    values.pop_back();
  }
  if (values.empty()) throw ParseError("no observations", lineno);
  return Eigen::Map<const Eigen::ArrayXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Eigen::ArrayXd read_increments_file(const std::string& path, const CsvReadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open data file '" + path + "'");
  return read_increments_csv(in, opts);
}

void write_sample_csv(std::ostream& os, const IncrementSample& sample) {
  os << "index,value\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < sample.n(); ++i) os << i << ',' << sample.values[i] << '\n';
}

}  // namespace levyspec
