#pragma once

#include "htevim/types.hpp"

#include <string>
#include <vector>

namespace htevim {

// Deterministic shortest-round-trip formatting: the printed string parses
// back to the identical double.
std::string format_double(double x);

// CSV interchange for datasets: header row, one column per covariate (by
// name) plus the treatment and outcome columns, '.' decimal separator.
void write_dataset_csv(const Dataset& data, const std::string& path,
                       const std::string& treatment_col = "a",
                       const std::string& outcome_col = "y");

struct CsvReadOptions {
  std::string treatment_col = "a";
  std::string outcome_col = "y";
  // Empty = every remaining column is a covariate.
  std::vector<std::string> covariate_cols;
};

struct CsvReadResult {
  Dataset dataset;
  int rows_dropped_missing = 0;
};

// Throws std::runtime_error with a line number on malformed input, unknown
// columns, or a non-binary treatment value. Rows with missing cells in the
// selected columns are dropped and counted.
CsvReadResult read_dataset_csv(const std::string& path, const CsvReadOptions& opts);

// Minimal generic table used for metrics / report output.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::string to_csv() const;
  std::string to_markdown() const;
  void write_csv(const std::string& path) const;
  void write_markdown(const std::string& path) const;
};

}  // namespace htevim
