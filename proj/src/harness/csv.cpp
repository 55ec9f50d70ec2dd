#include "tsf/harness/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "tsf/io/serialize.hpp"

namespace tsf::harness {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

struct Binding {
  std::size_t column;
  const FeatureColumn* feature;
};

}  // namespace

CsvError::CsvError(std::size_t row, std::string column, const std::string& what)
    : std::runtime_error("row " + std::to_string(row) + (column.empty() ? "" : ", column '" + column + "'") +
                         ": " + what),
      row_(row),
      column_(std::move(column)) {}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double x = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
  return x;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    cells.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

CohortSchema CohortSchema::from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  CohortSchema schema;
  schema.duration_column = doc.value("duration_column", schema.duration_column);
  schema.event_column = doc.value("event_column", schema.event_column);
  for (const auto& f : doc.value("features", nlohmann::json::array())) {
    FeatureColumn col;
    col.name = f.at("name").get<std::string>();
    const std::string type = f.value("type", "numeric");
    if (type == "categorical") {
      col.categorical = true;
      col.codes = f.at("codes").get<std::map<std::string, double>>();
      if (f.contains("unknown_code") && !f.at("unknown_code").is_null()) {
        col.unknown_code = f.at("unknown_code").get<double>();
      }
    } else if (type != "numeric") {
      throw std::runtime_error("schema: unknown column type '" + type + "' for " + col.name);
    }
    schema.features.push_back(std::move(col));
  }
  return schema;
}

std::string CohortSchema::to_json() const {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : this->features) {
    nlohmann::json col{{"name", f.name}, {"type", f.categorical ? "categorical" : "numeric"}};
    if (f.categorical) {
      col["codes"] = f.codes;
      col["unknown_code"] = f.unknown_code ? nlohmann::json(*f.unknown_code) : nlohmann::json(nullptr);
    }
    features.push_back(std::move(col));
  }
  return nlohmann::json{{"duration_column", duration_column}, {"event_column", event_column}, {"features", features}}
      .dump(2);
}

CohortSchema load_schema(const std::filesystem::path& path) { return CohortSchema::from_json(io::read_text(path)); }

Cohort parse_cohort_csv(std::istream& in, const CohortSchema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw CsvError(0, "", "missing header");
  const auto header = split_csv_line(line);
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!position.emplace(header[c], c).second) throw CsvError(0, header[c], "duplicate column");
  }
  auto require = [&](const std::string& name) {
    const auto it = position.find(name);
    if (it == position.end()) throw CsvError(0, name, "missing column");
    return it->second;
  };
  const std::size_t duration_col = require(schema.duration_column);
  const std::size_t event_col = require(schema.event_column);

  std::vector<FeatureColumn> implicit;
  if (schema.features.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c != duration_col && c != event_col) implicit.push_back(FeatureColumn{header[c], false, {}, {}});
    }
  }
  const auto& features = schema.features.empty() ? implicit : schema.features;
  std::vector<Binding> bindings;
  std::vector<std::string> names;
  for (const auto& f : features) {
    bindings.push_back({require(f.name), &f});
    names.push_back(f.name);
  }

  std::vector<double> covariates, durations;
  std::vector<int> events;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw CsvError(row, "", "expected " + std::to_string(header.size()) + " cells, found " +
                                  std::to_string(cells.size()));
    }
    const auto duration = parse_double(cells[duration_col]);
    if (!duration || !std::isfinite(*duration) || *duration < 0.0) {
      throw CsvError(row, header[duration_col], "invalid duration '" + cells[duration_col] + "'");
    }
    const std::string& ev = cells[event_col];
    if (ev != "0" && ev != "1") throw CsvError(row, header[event_col], "event must be 0 or 1, found '" + ev + "'");
    durations.push_back(*duration);
    events.push_back(ev == "1" ? 1 : 0);
    for (const auto& b : bindings) {
      const std::string& cell = cells[b.column];
      if (b.feature->categorical) {
        const auto it = b.feature->codes.find(cell);
        if (it != b.feature->codes.end()) {
          covariates.push_back(it->second);
        } else if (b.feature->unknown_code) {
          covariates.push_back(*b.feature->unknown_code);
        } else {
          throw CsvError(row, b.feature->name, "undeclared category '" + cell + "'");
        }
      } else {
        const auto x = parse_double(cell);
        if (!x || !std::isfinite(*x)) throw CsvError(row, b.feature->name, "unparseable value '" + cell + "'");
        covariates.push_back(*x);
      }
    }
  }
  if (row == 0) throw CsvError(0, "", "no data rows");
  return Cohort(std::move(covariates), std::move(durations), std::move(events), std::move(names));
}

Cohort load_cohort_csv(const std::filesystem::path& path, const CohortSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_cohort_csv(in, schema);
}

void write_cohort_csv(std::ostream& out, const Cohort& cohort) {
  out << "duration,event";
  for (const auto& name : cohort.feature_names()) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < cohort.n_subjects(); ++i) {
    out << format_double(cohort.durations()[i]) << ',' << cohort.events()[i];
    for (double x : cohort.row(i)) out << ',' << format_double(x);
    out << '\n';
  }
}

void write_cohort_csv(const std::filesystem::path& path, const Cohort& cohort) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_cohort_csv(out, cohort);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace tsf::harness
