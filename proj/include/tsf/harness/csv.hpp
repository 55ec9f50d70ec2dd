#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsf/core/cohort.hpp"

namespace tsf::harness {

// Column encoding. Numeric columns are parsed as decimals; categorical
// columns map each label to a code, and labels outside the map take
// `unknown_code` when one is declared.
struct FeatureColumn {
  std::string name;
  bool categorical = false;
  std::map<std::string, double> codes;
  std::optional<double> unknown_code;
};

// Sidecar schema. With no declared features every column other than the
// duration and event columns is read as numeric, in header order.
struct CohortSchema {
  std::string duration_column = "duration";
  std::string event_column = "event";
  std::vector<FeatureColumn> features;

  static CohortSchema from_json(const std::string& text);
  std::string to_json() const;
};

CohortSchema load_schema(const std::filesystem::path& path);

// Raised for malformed input. row() counts data rows from 1 (the header is
// row 0); column() is the header name, empty for row-level problems.
class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t row, std::string column, const std::string& what);
  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

Cohort parse_cohort_csv(std::istream& in, const CohortSchema& schema = {});
Cohort load_cohort_csv(const std::filesystem::path& path, const CohortSchema& schema = {});

// Header "duration,event,<features>"; values in shortest round-trip form.
void write_cohort_csv(std::ostream& out, const Cohort& cohort);
void write_cohort_csv(const std::filesystem::path& path, const Cohort& cohort);

// Shortest decimal that parses back to exactly `x`.
std::string format_double(double x);
// Whole-string decimal parse; nullopt when anything is left over.
std::optional<double> parse_double(std::string_view text);

std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace tsf::harness
