#pragma once

// Increment files: one numeric column, optional header, '#' comment lines.

#include <Eigen/Core>
#include <iosfwd>
#include <string>

#include "levyspec/sampling.hpp"

namespace levyspec {

/// Multi-column files contribute the column named `value`, else the last one.
struct CsvReadOptions {
  bool difference = false;  ///< treat rows as levels X_{i Delta} and difference them
};

/// Throws ParseError with the 1-based line number on malformed rows.
Eigen::ArrayXd read_increments_csv(std::istream& in, const CsvReadOptions& opts = {});
Eigen::ArrayXd read_increments_file(const std::string& path, const CsvReadOptions& opts = {});

/// `index,value` rows.
void write_sample_csv(std::ostream& os, const IncrementSample& sample);

}  // namespace levyspec
