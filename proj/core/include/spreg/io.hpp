#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spreg/model.hpp"

namespace spreg {

/// Numeric CSV: header names and an n x k value matrix.
struct Table {
  std::vector<std::string> names;
  Eigen::MatrixXd values;

  Eigen::Index rows() const noexcept { return values.rows(); }
  /// Throws ConfigError naming the column if absent.
  Eigen::Index column(const std::string& name) const;
};

/// Which columns to read. Empty `columns` means every column.
/// Only the selected columns must be numeric.
struct CsvSchema {
  std::vector<std::string> columns;
};

/// Header row, comma separated, '.' decimal point, optional double quotes,
/// LF or CRLF. `source` names the input in error messages.
/// Throws ConfigError with line/column on empty input, ragged rows or cells that do not parse.
Table read_table(std::istream& is, const CsvSchema& schema = {}, const std::string& source = "<input>");
Table read_table(const std::filesystem::path& path, const CsvSchema& schema = {});

/// Response plus covariates from a table. With a threshold the response
/// becomes the exceedance y - threshold.
struct DataSchema {
  std::string response;
  std::vector<std::string> covariates;  // empty: every other column
  std::optional<double> threshold;
};

DataBlock read_csv(const std::filesystem::path& path, const DataSchema& schema);
DataBlock to_data_block(const Table& table, const DataSchema& schema);
/// Covariates only (response set to zero), for prediction.
DataBlock covariate_block(const Table& table, const std::vector<std::string>& covariates);

/// Response column first, then covariates; 17 significant digits.
void write_csv(std::ostream& os, const DataBlock& data, const std::string& response_name = "y");

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace spreg
