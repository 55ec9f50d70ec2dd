#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace tsf::harness {

struct Column {
  std::string family;
  std::string method;
  friend bool operator==(const Column&, const Column&) = default;
};

struct Cell {
  double mean = 0.0;  // NaN when no fold produced a score
  double sd = 0.0;
  std::size_t n_valid = 0;
  std::size_t n_absent = 0;
  bool row_best = false;      // maximum of its family on this row
  bool below_target = false;  // mean lower than the family's Target cell
  std::vector<std::optional<double>> folds;
};

struct ResultsTable {
  std::vector<std::size_t> sizes;  // kFullPool (0) for the full training pool
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> cells;  // [row][column]

  std::optional<std::size_t> column_index(const std::string& family, const std::string& method) const;
  const Cell& at(std::size_t row, const std::string& family, const std::string& method) const;
  // Recomputes row_best and below_target from the means.
  void mark();
};

enum class ResultFormat { Csv, Text, Trend };

void write_results_csv(std::ostream& out, const ResultsTable& table);
void write_results_text(std::ostream& out, const ResultsTable& table);
void write_results_trend(std::ostream& out, const ResultsTable& table);

// Throws std::runtime_error for an unwritable path.
void emit_results(const ResultsTable& table, ResultFormat format, const std::filesystem::path& path);

// Inverse of write_results_csv (fold scores are not part of the file).
ResultsTable parse_results_csv(std::istream& in);

std::string size_label(std::size_t size);

}  // namespace tsf::harness
