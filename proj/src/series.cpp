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

#include "wavecast/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "wavecast/error.hpp"

namespace wavecast {
namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = line.find(',', begin);
    std::string_view cell = line.substr(begin, comma == std::string_view::npos ? line.npos : comma - begin);
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.remove_suffix(1);
    while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
    out.emplace_back(cell);
    if (comma == std::string_view::npos) break;
    begin = comma + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view text) {
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

bool parse_int(std::string_view text, int& out) {
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

void require_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("series contains a non-finite value");
  }
}

}  // namespace

std::optional<Instant> parse_timestamp(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SSZ
  if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
      text[16] != ':' || text[19] != 'Z') {
    return std::nullopt;
  }
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) || !parse_int(text.substr(8, 2), d) ||
      !parse_int(text.substr(11, 2), h) || !parse_int(text.substr(14, 2), mi) || !parse_int(text.substr(17, 2), s)) {
    return std::nullopt;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59 || h < 0 || mi < 0 || s < 0) return std::nullopt;
  return std::chrono::sys_days{ymd} + std::chrono::hours{h} + std::chrono::minutes{mi} + std::chrono::seconds{s};
}

std::string format_timestamp(Instant t) {
  const auto day = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day ymd{day};
  const std::chrono::hh_mm_ss hms{t - day};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

const std::vector<std::string>& known_pollutants() {
  static const std::vector<std::string> names{"NO2", "O3", "CO", "SO2", "PM2.5", "PM10"};
  return names;
}

std::string default_unit(std::string_view pollutant) {
  return pollutant.starts_with("PM") ? "µg/m³" : "ppb";
}

std::size_t RawRecords::column(std::string_view pollutant) const {
  const auto it = std::find(pollutants.begin(), pollutants.end(), pollutant);
  if (it == pollutants.end()) throw SchemaError("unknown pollutant column: " + std::string(pollutant));
  return static_cast<std::size_t>(it - pollutants.begin());
}

std::size_t RawRecords::missing_count(std::size_t col) const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [col](const RawRow& r) { return !r.values[col].has_value(); }));
}

std::string LoadReport::to_json() const {
  nlohmann::ordered_json j;
  j["rows"] = rows;
  j["missing_per_column"] = missing_per_column;
  j["dropped_rows"] = dropped_rows;
  j["imputed_per_column"] = imputed_per_column;
  return j.dump(2) + "\n";
}

LoadResult load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open CSV file: " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw EmptyDataError("CSV file is empty: " + path.string());
  const auto header = split_csv_line(line);

  const auto ts_it = std::find(header.begin(), header.end(), schema.timestamp_column);
  if (ts_it == header.end()) throw SchemaError("timestamp column '" + schema.timestamp_column + "' not found");
  const auto ts_col = static_cast<std::size_t>(ts_it - header.begin());

  std::vector<std::string> wanted = schema.pollutant_columns;
  if (wanted.empty()) {
    for (const auto& name : known_pollutants()) {
      if (std::find(header.begin(), header.end(), name) != header.end()) wanted.push_back(name);
    }
  }
  if (wanted.empty()) throw SchemaError("no pollutant columns found in header");

  std::vector<std::size_t> value_cols;
  for (const auto& name : wanted) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw SchemaError("pollutant column '" + name + "' not found");
    value_cols.push_back(static_cast<std::size_t>(it - header.begin()));
  }

  LoadResult result;
  RawRecords& rec = result.records;
  rec.pollutants = wanted;
  for (const auto& name : wanted) rec.units[name] = default_unit(name);

  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    const auto ts = ts_col < cells.size() ? parse_timestamp(cells[ts_col]) : std::nullopt;
    if (!ts) {
      ++result.report.dropped_rows;
      continue;
    }
    RawRow row{*ts, {}};
    row.values.reserve(value_cols.size());
    for (std::size_t c : value_cols) row.values.push_back(c < cells.size() ? parse_double(cells[c]) : std::nullopt);
    rec.rows.push_back(std::move(row));
  }
  if (rec.rows.empty()) throw EmptyDataError("no parseable rows in " + path.string());

  std::stable_sort(rec.rows.begin(), rec.rows.end(),
                   [](const RawRow& a, const RawRow& b) { return a.timestamp < b.timestamp; });
  // Duplicate timestamps keep the first occurrence.
  const auto last = std::unique(rec.rows.begin(), rec.rows.end(),
                                [](const RawRow& a, const RawRow& b) { return a.timestamp == b.timestamp; });
  result.report.dropped_rows += static_cast<std::size_t>(rec.rows.end() - last);
  rec.rows.erase(last, rec.rows.end());

  result.report.rows = rec.rows.size();
  for (std::size_t c = 0; c < wanted.size(); ++c) result.report.missing_per_column[wanted[c]] = rec.missing_count(c);
  return result;
}

RawRecords impute_missing(const RawRecords& records, ImputePolicy policy) {
  RawRecords out = records;
  const std::size_t n = out.rows.size();
  for (std::size_t c = 0; c < out.pollutants.size(); ++c) {
    auto cell = [&](std::size_t i) -> std::optional<double>& { return out.rows[i].values[c]; };

    std::size_t first = 0;
    while (first < n && !cell(first)) ++first;
    if (first == n) throw EmptyDataError("column " + out.pollutants[c] + " has no observed values");
    for (std::size_t i = 0; i < first; ++i) cell(i) = *cell(first);

    std::size_t prev = first;
    for (std::size_t i = first + 1; i < n; ++i) {
      if (!cell(i)) continue;
      if (i > prev + 1) {
        const double a = *cell(prev);
        const double b = *cell(i);
        for (std::size_t k = prev + 1; k < i; ++k) {
          if (policy == ImputePolicy::kCarryForward) {
            cell(k) = a;
          } else {
            const double frac = static_cast<double>(k - prev) / static_cast<double>(i - prev);
            cell(k) = a + (b - a) * frac;
          }
        }
      }
      prev = i;
    }
    for (std::size_t i = prev + 1; i < n; ++i) cell(i) = *cell(prev);
  }
  return out;
}

TimeSeries hourly_average(const RawRecords& records, std::string_view pollutant) {
  const std::size_t col = records.column(pollutant);
  if (records.rows.empty()) throw EmptyDataError("no records to aggregate");

  const auto hour_of = [](Instant t) { return std::chrono::floor<std::chrono::hours>(t); };
  const auto first_hour = hour_of(records.rows.front().timestamp);
  const auto last_hour = hour_of(records.rows.back().timestamp);
  const auto buckets = static_cast<std::size_t>((last_hour - first_hour).count()) + 1;

  std::vector<double> sums(buckets, 0.0);
  std::vector<std::size_t> counts(buckets, 0);
  for (const auto& row : records.rows) {
    const auto& v = row.values[col];
    if (!v) throw std::invalid_argument("hourly_average requires imputed records");
    const auto b = static_cast<std::size_t>((hour_of(row.timestamp) - first_hour).count());
    sums[b] += *v;
    ++counts[b];
  }

  TimeSeries ts;
  ts.start = first_hour;
  ts.pollutant = std::string(pollutant);
  const auto unit = records.units.find(ts.pollutant);
  ts.unit = unit != records.units.end() ? unit->second : default_unit(pollutant);
  ts.values.resize(buckets);
  for (std::size_t b = 0; b < buckets; ++b) {
    if (counts[b] == 0) {
      throw EmptyDataError("hour bucket " + format_timestamp(first_hour + std::chrono::hours{b}) + " has no readings");
    }
    ts.values[b] = sums[b] / static_cast<double>(counts[b]);
  }
  return ts;
}

double NormParams::apply(double y) const {
  if (degenerate) return y - min;
  return (y - min) / (max - min);
}

double NormParams::invert(double x) const {
  if (degenerate) {
    if (x != 0.0) throw std::domain_error("non-zero value cannot be denormalised with degenerate parameters");
    return min;
  }
  return x * (max - min) + min;
}

NormParams fit_minmax(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("cannot fit normalisation on an empty series");
  require_finite(values);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return NormParams{*lo, *hi, *lo == *hi};
}

std::pair<TimeSeries, NormParams> minmax_normalize(const TimeSeries& series) {
  const NormParams params = fit_minmax(series.values);
  return {normalize_with(series, params), params};
}

TimeSeries normalize_with(const TimeSeries& series, const NormParams& params) {
  require_finite(series.values);
  TimeSeries out = series;
  for (double& v : out.values) v = params.apply(v);
  return out;
}

TimeSeries denormalize(const TimeSeries& series, const NormParams& params) {
  TimeSeries out = series;
  for (double& v : out.values) v = params.invert(v);
  return out;
}

void write_series_csv(const std::filesystem::path& path, const TimeSeries& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "timestamp," << series.pollutant << " (" << series.unit << ")\n";
  char buf[64];
  for (std::size_t i = 0; i < series.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", series.values[i]);
    out << format_timestamp(series.start + std::chrono::hours{i}) << ',' << buf << '\n';
  }
}

TimeSeries read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("series file not found: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw EmptyDataError("series file is empty: " + path.string());
  const auto header = split_csv_line(line);
  if (header.size() != 2 || header[0] != "timestamp") throw SchemaError("malformed series header in " + path.string());

  TimeSeries ts;
  const std::string& label = header[1];
  const auto paren = label.find(" (");
  ts.pollutant = label.substr(0, paren);
  ts.unit = paren == std::string::npos ? default_unit(ts.pollutant) : label.substr(paren + 2, label.size() - paren - 3);

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    const auto t = cells.size() == 2 ? parse_timestamp(cells[0]) : std::nullopt;
    const auto v = cells.size() == 2 ? parse_double(cells[1]) : std::nullopt;
    if (!t || !v) throw SchemaError("malformed row in " + path.string() + ": " + line);
    if (ts.values.empty()) ts.start = *t;
    ts.values.push_back(*v);
  }
  if (ts.values.empty()) throw EmptyDataError("series file has no rows: " + path.string());
  return ts;
}

}  // namespace wavecast
