#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dwreg/dataset.hpp"

namespace dwreg {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// physical line on which each row starts (header is line 1)
  std::vector<std::size_t> lines;

  std::size_t column_index(const std::string& name) const;
};

/// RFC-4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF.
/// Throws DataError on duplicate header names, ragged rows or an unterminated quote.
CsvTable parse_csv(std::istream& input);
CsvTable read_csv_file(const std::filesystem::path& path);

/// Loads a count response and real-valued covariates, in the order given.
/// Rows with missing or unparseable cells are rejected, listing row numbers.
Dataset ingest_csv(const std::filesystem::path& path, const std::string& response_name,
                   const std::vector<std::string>& covariate_names, bool add_intercept = true);

/// Covariate rows only, for prediction.
Eigen::MatrixXd read_covariate_rows(const std::filesystem::path& path, const std::vector<std::string>& covariate_names);

}  // namespace dwreg
