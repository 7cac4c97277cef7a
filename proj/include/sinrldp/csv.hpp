#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "sinrldp/partition.hpp"

namespace sinrldp {

using CsvCell = std::variant<std::int64_t, std::uint64_t, double, std::string>;
using CsvRecord = std::vector<CsvCell>;

struct CsvTable {
  std::vector<std::string> schema;
  std::vector<CsvRecord> records;
};

/// Shortest round-trip decimal; "inf" / "-inf" for infinities and an empty string for NaN.
std::string format_double(double v);
std::string format_cell(const CsvCell& cell);

/// Header row plus one line per record, LF endings. Throws std::invalid_argument when a
/// record does not match the schema width and std::runtime_error when the path is not
/// writable.
void write_csv(const std::vector<CsvRecord>& records, const std::vector<std::string>& schema,
               const std::filesystem::path& path);
std::string render_csv(const std::vector<CsvRecord>& records,
                       const std::vector<std::string>& schema);

/// Parses a file written by write_csv (no quoted fields with embedded newlines).
CsvTable read_csv(const std::filesystem::path& path);

// Fixed schemas for the binned measures.
//   cells:      cell, spatial, power, weight
//   cell pairs: cell_a, cell_b, weight
//   profile:    cell, bin, lower, upper, weight   (rows of empty cells are omitted)
CsvTable measure_table(const BinnedMeasure& m, const PartitionSpec& part);
CsvTable profile_table(const SinrProfile& p, const PartitionSpec& part);

/// Inverse of measure_table. Cells absent from the file carry weight 0.
BinnedMeasure read_measure_csv(const std::filesystem::path& path, BinnedMeasure::Support support,
                               const PartitionSpec& part);
SinrProfile read_profile_csv(const std::filesystem::path& path, const PartitionSpec& part);

}  // namespace sinrldp
