// Copyright 2026 The WaveCast Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Ingestion and preprocessing of minute-level sensor records: CSV loading,
// gap imputation, hourly aggregation and min-max scaling.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wavecast {

using Instant = std::chrono::sys_seconds;

/// Parses `YYYY-MM-DDTHH:MM:SSZ`. Returns nullopt on malformed input.
std::optional<Instant> parse_timestamp(std::string_view text);
std::string format_timestamp(Instant t);

/// Pollutant columns recognised by the loader, in canonical order.
const std::vector<std::string>& known_pollutants();
/// Default unit for a pollutant: ppb for gases, µg/m³ for particulates.
std::string default_unit(std::string_view pollutant);

struct RawRow {
  Instant timestamp;
  std::vector<std::optional<double>> values;  // parallel to RawRecords::pollutants
};

/// Minute-resolution readings with strictly increasing timestamps.
struct RawRecords {
  std::vector<std::string> pollutants;
  std::map<std::string, std::string> units;
  std::vector<RawRow> rows;

  std::size_t column(std::string_view pollutant) const;
  std::size_t missing_count(std::size_t column) const;
};

struct CsvSchema {
  std::string timestamp_column = "timestamp";
  /// Empty means every recognised pollutant column present in the header.
  std::vector<std::string> pollutant_columns;
};

struct LoadReport {
  std::size_t rows = 0;
  std::map<std::string, std::size_t> missing_per_column;
  std::size_t dropped_rows = 0;
  std::map<std::string, std::size_t> imputed_per_column;

  std::string to_json() const;
};

struct LoadResult {
  RawRecords records;
  LoadReport report;
};

LoadResult load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});

enum class ImputePolicy { kLinear, kCarryForward };

/// Fills missing cells. Leading gaps take the first observation, trailing gaps
/// the last one. Throws EmptyDataError if a column has no observation at all.
RawRecords impute_missing(const RawRecords& records, ImputePolicy policy = ImputePolicy::kLinear);

/// Hourly observations of one pollutant. Slot i covers [start + i h, start + (i+1) h).
struct TimeSeries {
  Instant start{};
  std::vector<double> values;
  std::string pollutant;
  std::string unit;

  std::size_t size() const noexcept { return values.size(); }
};

/// Arithmetic mean of each clock hour's readings. Requires imputed records.
TimeSeries hourly_average(const RawRecords& records, std::string_view pollutant);

struct NormParams {
  double min = 0.0;
  double max = 0.0;
  bool degenerate = false;

  double apply(double y) const;
  double invert(double x) const;
};

NormParams fit_minmax(std::span<const double> values);
std::pair<TimeSeries, NormParams> minmax_normalize(const TimeSeries& series);
/// Scales with already-fitted parameters; values may fall outside [0, 1].
TimeSeries normalize_with(const TimeSeries& series, const NormParams& params);
TimeSeries denormalize(const TimeSeries& series, const NormParams& params);

/// Reads and writes the single-column hourly series file produced by ingest.
void write_series_csv(const std::filesystem::path& path, const TimeSeries& series);
TimeSeries read_series_csv(const std::filesystem::path& path);

}  // namespace wavecast
