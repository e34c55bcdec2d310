#include "spreg/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "spreg/errors.hpp"

namespace spreg {
namespace {

std::vector<std::string> split_row(const std::string& line, const std::string& where) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  if (quoted) throw ConfigError(where + ": unterminated quote");
  out.push_back(std::move(cell));
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const char* last = t.data() + t.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

}  // namespace

Eigen::Index Table::column(const std::string& name) const {
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (names[j] == name) return static_cast<Eigen::Index>(j);
  }
  throw ConfigError("unknown column '" + name + "'");
}

Table read_table(std::istream& is, const CsvSchema& schema, const std::string& source) {
  std::string line;
  long line_no = 0;
  // Leading '#' lines carry provenance comments.
  do {
    if (!std::getline(is, line)) throw ConfigError(source + ": empty file");
    ++line_no;
  } while (!line.empty() && line[0] == '#');
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::vector<std::string> header = split_row(line, source + " line " + std::to_string(line_no));
  for (std::string& h : header) h = trim(h);

  std::vector<std::size_t> pick;
  std::vector<std::string> names;
  if (schema.columns.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) pick.push_back(j);
    names = header;
  } else {
    for (const std::string& c : schema.columns) {
      std::size_t j = 0;
      while (j < header.size() && header[j] != c) ++j;
      if (j == header.size()) throw ConfigError(source + ": missing column '" + c + "'");
      pick.push_back(j);
      names.push_back(c);
    }
  }

  std::vector<double> cells;
  long row = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const std::string where = source + " line " + std::to_string(line_no) + " (row " + std::to_string(row) + ")";
    const std::vector<std::string> fields = split_row(line, where);
    if (fields.size() != header.size()) {
      throw ConfigError(where + ": expected " + std::to_string(header.size()) + " fields, found " +
                        std::to_string(fields.size()));
    }
    for (std::size_t k = 0; k < pick.size(); ++k) {
      double v = 0.0;
      if (!parse_double(fields[pick[k]], v)) {
        throw ConfigError(where + ", column '" + names[k] + "': cannot parse '" + fields[pick[k]] + "' as a number");
      }
      cells.push_back(v);
    }
  }
  if (row == 0) throw ConfigError(source + ": no data rows");
  Table t;
  t.names = std::move(names);
  t.values.resize(row, static_cast<Eigen::Index>(pick.size()));
  for (Eigen::Index i = 0; i < t.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < t.values.cols(); ++j) {
      t.values(i, j) = cells[static_cast<std::size_t>(i * t.values.cols() + j)];
    }
  }
  return t;
}

Table read_table(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open data file '" + path.string() + "'");
  return read_table(in, schema, path.string());
}

DataBlock to_data_block(const Table& table, const DataSchema& schema) {
  const Eigen::Index yj = table.column(schema.response);
  std::vector<std::string> cov = schema.covariates;
  if (cov.empty()) {
    for (const std::string& n : table.names) {
      if (n != schema.response) cov.push_back(n);
    }
  }
  Eigen::MatrixXd x(table.rows(), static_cast<Eigen::Index>(cov.size()));
  for (std::size_t k = 0; k < cov.size(); ++k) x.col(static_cast<Eigen::Index>(k)) = table.values.col(table.column(cov[k]));
  const Eigen::VectorXd y = table.values.col(yj);
  if (schema.threshold) return DataBlock::exceedances(y, *schema.threshold, std::move(cov), std::move(x));
  return DataBlock(y, std::move(cov), std::move(x));
}

DataBlock read_csv(const std::filesystem::path& path, const DataSchema& schema) {
  CsvSchema cs;
  if (!schema.covariates.empty()) {
    cs.columns.push_back(schema.response);
    cs.columns.insert(cs.columns.end(), schema.covariates.begin(), schema.covariates.end());
  }
  return to_data_block(read_table(path, cs), schema);
}

DataBlock covariate_block(const Table& table, const std::vector<std::string>& covariates) {
  Eigen::MatrixXd x(table.rows(), static_cast<Eigen::Index>(covariates.size()));
  for (std::size_t k = 0; k < covariates.size(); ++k) {
    x.col(static_cast<Eigen::Index>(k)) = table.values.col(table.column(covariates[k]));
  }
  return DataBlock(Eigen::VectorXd::Zero(table.rows()), covariates, std::move(x));
}

void write_csv(std::ostream& os, const DataBlock& data, const std::string& response_name) {
  const auto old = os.precision(17);
  os << response_name;
  for (const std::string& n : data.names()) os << ',' << n;
  os << '\n';
  const double shift = data.threshold().value_or(0.0);
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    os << data.y()[i] + shift;
    for (Eigen::Index j = 0; j < data.covariates().cols(); ++j) os << ',' << data.covariates()(i, j);
    os << '\n';
  }
  os.precision(old);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace spreg
