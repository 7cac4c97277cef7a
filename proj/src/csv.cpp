#include "sinrldp/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sinrldp {

namespace {

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

double parse_double(const std::string& s, const std::string& where) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument(where + ": not a number: '" + s + "'");
  }
  return v;
}

std::size_t parse_index(const std::string& s, const std::string& where) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument(where + ": not an index: '" + s + "'");
  }
  return v;
}

std::size_t column(const CsvTable& t, const std::string& name, const std::string& where) {
  for (std::size_t i = 0; i < t.schema.size(); ++i) {
    if (t.schema[i] == name) return i;
  }
  throw std::invalid_argument(where + ": missing column '" + name + "'");
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_cell(const CsvCell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return quote_if_needed(v);
        } else {
          return std::to_string(v);
        }
      },
      cell);
}

std::string render_csv(const std::vector<CsvRecord>& records,
                       const std::vector<std::string>& schema) {
  std::string out;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (i > 0) out += ',';
    out += quote_if_needed(schema[i]);
  }
  out += '\n';
  for (const auto& rec : records) {
    if (rec.size() != schema.size()) {
      throw std::invalid_argument("write_csv: record width " + std::to_string(rec.size()) +
                                  " does not match schema width " +
                                  std::to_string(schema.size()));
    }
    for (std::size_t i = 0; i < rec.size(); ++i) {
      if (i > 0) out += ',';
      out += format_cell(rec[i]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::vector<CsvRecord>& records, const std::vector<std::string>& schema,
               const std::filesystem::path& path) {
  const std::string text = render_csv(records, schema);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  CsvTable t;
  std::string line;
  bool header = true;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header) {
      t.schema = split_line(line);
      header = false;
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != t.schema.size()) {
      throw std::invalid_argument(path.string() + ": row width does not match the header");
    }
    CsvRecord rec;
    for (auto& s : fields) rec.emplace_back(std::move(s));
    t.records.push_back(std::move(rec));
  }
  if (header) throw std::invalid_argument(path.string() + ": empty file");
  return t;
}

CsvTable measure_table(const BinnedMeasure& m, const PartitionSpec& part) {
  CsvTable t;
  if (m.support() == BinnedMeasure::Support::cells) {
    t.schema = {"cell", "spatial", "power", "weight"};
    for (std::size_t c = 0; c < m.cells(); ++c) {
      t.records.push_back({std::uint64_t{c}, std::uint64_t{part.cell_spatial(c)},
                           std::uint64_t{part.cell_power(c)}, m[c]});
    }
  } else {
    t.schema = {"cell_a", "cell_b", "weight"};
    for (std::size_t a = 0; a < m.cells(); ++a) {
      for (std::size_t b = 0; b < m.cells(); ++b) {
        t.records.push_back({std::uint64_t{a}, std::uint64_t{b}, m.at(a, b)});
      }
    }
  }
  return t;
}

CsvTable profile_table(const SinrProfile& p, const PartitionSpec& part) {
  CsvTable t;
  t.schema = {"cell", "bin", "lower", "upper", "weight"};
  for (std::size_t c = 0; c < p.cells(); ++c) {
    if (p.empty(c)) continue;
    const auto row = p.row(c);
    for (std::size_t b = 0; b < p.bins(); ++b) {
      const double lo = b == 0 ? 0.0 : part.sinr_edges[b - 1];
      const double hi = b < part.sinr_edges.size() ? part.sinr_edges[b]
                                                   : std::numeric_limits<double>::infinity();
      t.records.push_back({std::uint64_t{c}, std::uint64_t{b}, lo, hi, row[b]});
    }
  }
  return t;
}

BinnedMeasure read_measure_csv(const std::filesystem::path& path, BinnedMeasure::Support support,
                               const PartitionSpec& part) {
  const CsvTable t = read_csv(path);
  const std::string where = path.string();
  const std::size_t k = part.cells();
  const std::size_t wcol = column(t, "weight", where);
  std::vector<double> w(support == BinnedMeasure::Support::cells ? k : k * k, 0.0);
  if (support == BinnedMeasure::Support::cells) {
    const std::size_t ccol = column(t, "cell", where);
    for (const auto& rec : t.records) {
      const std::size_t c = parse_index(std::get<std::string>(rec[ccol]), where);
      if (c >= k) throw std::invalid_argument(where + ": cell index out of range");
      w[c] = parse_double(std::get<std::string>(rec[wcol]), where);
    }
  } else {
    const std::size_t acol = column(t, "cell_a", where);
    const std::size_t bcol = column(t, "cell_b", where);
    for (const auto& rec : t.records) {
      const std::size_t a = parse_index(std::get<std::string>(rec[acol]), where);
      const std::size_t b = parse_index(std::get<std::string>(rec[bcol]), where);
      if (a >= k || b >= k) throw std::invalid_argument(where + ": cell index out of range");
      w[a * k + b] = parse_double(std::get<std::string>(rec[wcol]), where);
    }
  }
  return BinnedMeasure::from_weights(support, k, std::move(w));
}

SinrProfile read_profile_csv(const std::filesystem::path& path, const PartitionSpec& part) {
  const CsvTable t = read_csv(path);
  const std::string where = path.string();
  const std::size_t k = part.cells();
  const std::size_t bins = part.sinr_bins();
  const std::size_t ccol = column(t, "cell", where);
  const std::size_t bcol = column(t, "bin", where);
  const std::size_t wcol = column(t, "weight", where);
  std::vector<double> rows(k * bins, 0.0);
  std::vector<char> seen(k, 0);
  for (const auto& rec : t.records) {
    const std::size_t c = parse_index(std::get<std::string>(rec[ccol]), where);
    const std::size_t b = parse_index(std::get<std::string>(rec[bcol]), where);
    if (c >= k || b >= bins) throw std::invalid_argument(where + ": index out of range");
    rows[c * bins + b] = parse_double(std::get<std::string>(rec[wcol]), where);
    seen[c] = 1;
  }
  SinrProfile p(k, bins);
  for (std::size_t c = 0; c < k; ++c) {
    if (seen[c]) {
      p.set_row(c, std::span<const double>(rows.data() + c * bins, bins));
    } else {
      p.mark_empty(c);
    }
  }
  return p;
}

}  // namespace sinrldp
