#include "dwreg/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "dwreg/error.hpp"

namespace dwreg {

namespace {

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t");
  return text.substr(first, last - first + 1);
}

bool is_missing(std::string_view cell) {
  const std::string_view t = trim(cell);
  return t.empty() || t == "NA" || t == "NaN" || t == "nan" || t == ".";
}

std::optional<double> parse_real(std::string_view cell) {
  std::string_view t = trim(cell);
  if (!t.empty() && t.front() == '+') t.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || end != t.data() + t.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<std::int64_t> parse_integer(std::string_view cell) {
  std::string_view t = trim(cell);
  if (!t.empty() && t.front() == '+') t.remove_prefix(1);
  std::int64_t value = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || end != t.data() + t.size()) return std::nullopt;
  return value;
}

std::string list_rows(const std::vector<std::size_t>& rows) {
  std::ostringstream out;
  const std::size_t shown = std::min<std::size_t>(rows.size(), 10);
  for (std::size_t i = 0; i < shown; ++i) out << (i ? ", " : "") << rows[i];
  if (rows.size() > shown) out << " and " << rows.size() - shown << " more";
  return out.str();
}

std::vector<std::size_t> resolve_columns(const CsvTable& table, const std::vector<std::string>& names) {
  std::vector<std::size_t> indices;
  for (const auto& name : names) indices.push_back(table.column_index(name));
  return indices;
}

Eigen::MatrixXd parse_covariates(const CsvTable& table, const std::vector<std::string>& names,
                                 std::vector<std::size_t>& bad_rows) {
  const std::vector<std::size_t> columns = resolve_columns(table, names);
  Eigen::MatrixXd values(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    bool bad = false;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const std::string& cell = table.rows[r][columns[c]];
      const auto parsed = is_missing(cell) ? std::nullopt : parse_real(cell);
      if (!parsed) {
        bad = true;
        continue;
      }
      values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = *parsed;
    }
    if (bad) bad_rows.push_back(r + 1);
  }
  return values;
}

}  // namespace

std::size_t CsvTable::column_index(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    std::string available;
    for (const auto& h : header) available += (available.empty() ? "" : ", ") + ("'" + h + "'");
    throw DataError("column '" + name + "' not found; available columns: " + available);
  }
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable parse_csv(std::istream& input) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> starts;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t record_line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = record.size() == 1 && record.front().empty();
    if (!blank) {
      records.push_back(std::move(record));
      starts.push_back(record_line);
    }
    record.clear();
  };

  char ch = 0;
  while (input.get(ch)) {
    if (in_quotes) {
      if (ch == '"') {
        if (input.peek() == '"') {
          input.get(ch);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!field_started || trim(field).empty()) {
          field.clear();
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(ch);
        }
        break;
      case ',': end_field(); break;
      case '\r':
        if (input.peek() == '\n') input.get(ch);
        [[fallthrough]];
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (in_quotes) throw DataError("unterminated quoted field starting on line " + std::to_string(record_line));
  if (field_started || !field.empty() || !record.empty()) end_record();

  if (records.empty()) throw DataError("CSV input has no header row");
  CsvTable table;
  table.header = std::move(records.front());
  std::set<std::string> seen;
  for (const auto& name : table.header) {
    if (!seen.insert(name).second) throw DataError("duplicate column name '" + name + "' in header");
  }
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw DataError("row " + std::to_string(r) + " (line " + std::to_string(starts[r]) + ") has " +
                      std::to_string(records[r].size()) + " fields; header has " +
                      std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(records[r]));
    table.lines.push_back(starts[r]);
  }
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream input(path, std::ios::binary);
  if (!input) throw DataError("cannot open input file '" + path.string() + "'");
  return parse_csv(input);
}

Dataset ingest_csv(const std::filesystem::path& path, const std::string& response_name,
                   const std::vector<std::string>& covariate_names, bool add_intercept) {
  if (std::find(covariate_names.begin(), covariate_names.end(), response_name) != covariate_names.end()) {
    throw DataError("response column '" + response_name + "' is also listed as a covariate");
  }
  const CsvTable table = read_csv_file(path);
  if (table.rows.empty()) throw DataError("input file '" + path.string() + "' contains no data rows");
  const std::size_t response_column = table.column_index(response_name);

  std::vector<std::size_t> bad_rows;
  Eigen::MatrixXd covariates = parse_covariates(table, covariate_names, bad_rows);
  std::vector<std::int64_t> response(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string& cell = table.rows[r][response_column];
    if (is_missing(cell)) {
      bad_rows.push_back(r + 1);
      continue;
    }
    std::optional<std::int64_t> count = parse_integer(cell);
    if (!count) {
      const auto value = parse_real(cell);
      if (!value) {
        bad_rows.push_back(r + 1);
        continue;
      }
      // integer-valued reals such as "3.0" are accepted
      if (*value != std::floor(*value) || std::abs(*value) > 9.0e15) {
        throw DataError("row " + std::to_string(r + 1) + ", column '" + response_name + "': value '" + cell +
                        "' is not an integer count");
      }
      count = static_cast<std::int64_t>(*value);
    }
    if (*count < 0) {
      throw DataError("row " + std::to_string(r + 1) + ", column '" + response_name + "': value '" + cell +
                      "' is negative");
    }
    response[r] = *count;
  }
  if (!bad_rows.empty()) {
    std::sort(bad_rows.begin(), bad_rows.end());
    bad_rows.erase(std::unique(bad_rows.begin(), bad_rows.end()), bad_rows.end());
    throw DataError("missing or unparseable cells in rows " + list_rows(bad_rows));
  }
  return Dataset(std::move(response), std::move(covariates), covariate_names, add_intercept);
}

Eigen::MatrixXd read_covariate_rows(const std::filesystem::path& path, const std::vector<std::string>& covariate_names) {
  const CsvTable table = read_csv_file(path);
  if (table.rows.empty()) throw DataError("input file '" + path.string() + "' contains no data rows");
  std::vector<std::size_t> bad_rows;
  Eigen::MatrixXd covariates = parse_covariates(table, covariate_names, bad_rows);
  if (!bad_rows.empty()) throw DataError("missing or unparseable cells in rows " + list_rows(bad_rows));
  return covariates;
}

}  // namespace dwreg
