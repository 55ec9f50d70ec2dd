#include "tsf/harness/results.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tsf/harness/csv.hpp"
#include "tsf/harness/cv.hpp"

namespace tsf::harness {

namespace {

constexpr const char* kCsvHeader = "family,method,size,mean,sd,n_valid,n_absent,row_best,below_target";

std::string fixed4(double x) {
  if (std::isnan(x)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

std::size_t parse_size(const std::string& text) {
  if (text == "full") return kFullPool;
  const auto v = parse_double(text);
  if (!v || *v < 1 || *v != std::floor(*v)) throw std::runtime_error("results: bad size '" + text + "'");
  return static_cast<std::size_t>(*v);
}

}  // namespace

std::string size_label(std::size_t size) { return size == kFullPool ? "full" : std::to_string(size); }

std::optional<std::size_t> ResultsTable::column_index(const std::string& family, const std::string& method) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].family == family && columns[c].method == method) return c;
  }
  return std::nullopt;
}

const Cell& ResultsTable::at(std::size_t row, const std::string& family, const std::string& method) const {
  const auto c = column_index(family, method);
  if (!c) throw std::out_of_range("results: no column " + family + "/" + method);
  return cells.at(row).at(*c);
}

void ResultsTable::mark() {
  for (auto& row : cells) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      double best = -INFINITY;
      std::optional<double> target;
      for (std::size_t d = 0; d < columns.size(); ++d) {
        if (columns[d].family != columns[c].family || std::isnan(row[d].mean)) continue;
        best = std::max(best, row[d].mean);
        if (columns[d].method == "Target") target = row[d].mean;
      }
      Cell& cell = row[c];
      cell.row_best = !std::isnan(cell.mean) && cell.mean == best;
      cell.below_target =
          columns[c].method != "Target" && target && !std::isnan(cell.mean) && cell.mean < *target;
    }
  }
}

void write_results_csv(std::ostream& out, const ResultsTable& table) {
  out << kCsvHeader << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    for (std::size_t r = 0; r < table.sizes.size(); ++r) {
      const Cell& cell = table.cells[r][c];
      out << table.columns[c].family << ',' << table.columns[c].method << ',' << size_label(table.sizes[r]) << ','
          << (std::isnan(cell.mean) ? "NA" : format_double(cell.mean)) << ','
          << (std::isnan(cell.sd) ? "NA" : format_double(cell.sd)) << ',' << cell.n_valid << ',' << cell.n_absent
          << ',' << int(cell.row_best) << ',' << int(cell.below_target) << '\n';
    }
  }
}

void write_results_text(std::ostream& out, const ResultsTable& table) {
  std::vector<std::string> families;
  for (const auto& col : table.columns) {
    if (std::find(families.begin(), families.end(), col.family) == families.end()) families.push_back(col.family);
  }
  out << "C^td mean +/- sd over folds; ^ row maximum, * below Target\n";
  for (const auto& family : families) {
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (table.columns[c].family == family) cols.push_back(c);
    }
    std::vector<std::vector<std::string>> grid;
    grid.push_back({"size"});
    for (std::size_t c : cols) grid.back().push_back(table.columns[c].method);
    for (std::size_t r = 0; r < table.sizes.size(); ++r) {
      grid.push_back({size_label(table.sizes[r])});
      for (std::size_t c : cols) {
        const Cell& cell = table.cells[r][c];
        std::string text = fixed4(cell.mean) + " +/- " + fixed4(cell.sd);
        if (cell.row_best) text += "^";
        if (cell.below_target) text += "*";
        grid.back().push_back(std::move(text));
      }
    }
    std::vector<std::size_t> width(cols.size() + 1, 0);
    for (const auto& line : grid) {
      for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
    }
    out << '\n' << family << '\n';
    for (const auto& line : grid) {
      for (std::size_t i = 0; i < line.size(); ++i) {
        out << line[i];
        if (i + 1 < line.size()) out << std::string(width[i] - line[i].size() + 2, ' ');
      }
      out << '\n';
    }
  }
}

void write_results_trend(std::ostream& out, const ResultsTable& table) {
  out << "family\tmethod\tsize\tmean\tsd\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    for (std::size_t r = 0; r < table.sizes.size(); ++r) {
      const Cell& cell = table.cells[r][c];
      out << table.columns[c].family << '\t' << table.columns[c].method << '\t' << size_label(table.sizes[r])
          << '\t' << fixed4(cell.mean) << '\t' << fixed4(cell.sd) << '\n';
    }
  }
}

void emit_results(const ResultsTable& table, ResultFormat format, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  switch (format) {
    case ResultFormat::Csv: write_results_csv(out, table); break;
    case ResultFormat::Text: write_results_text(out, table); break;
    case ResultFormat::Trend: write_results_trend(out, table); break;
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

ResultsTable parse_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("results: unexpected header");
  ResultsTable table;
  auto number = [](const std::string& s) {
    if (s == "NA") return std::nan("");
    const auto v = parse_double(s);
    if (!v) throw std::runtime_error("results: bad number '" + s + "'");
    return *v;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw std::runtime_error("results: expected 9 fields");
    const Column col{f[0], f[1]};
    const std::size_t size = parse_size(f[2]);
    auto c = table.column_index(col.family, col.method);
    if (!c) {
      table.columns.push_back(col);
      c = table.columns.size() - 1;
      for (auto& row : table.cells) row.resize(table.columns.size());
    }
    auto r_it = std::find(table.sizes.begin(), table.sizes.end(), size);
    if (r_it == table.sizes.end()) {
      table.sizes.push_back(size);
      table.cells.emplace_back(table.columns.size());
      r_it = table.sizes.end() - 1;
    }
    Cell& cell = table.cells[static_cast<std::size_t>(r_it - table.sizes.begin())][*c];
    cell.mean = number(f[3]);
    cell.sd = number(f[4]);
    cell.n_valid = static_cast<std::size_t>(number(f[5]));
    cell.n_absent = static_cast<std::size_t>(number(f[6]));
    cell.row_best = f[7] == "1";
    cell.below_target = f[8] == "1";
  }
  return table;
}

}  // namespace tsf::harness
