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


#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "wavecast/error.hpp"
#include "wavecast/series.hpp"

using namespace wavecast;

namespace {

const std::filesystem::path kDir = fixtures::scratch_dir("series_test");

std::filesystem::path csv(const std::string& name, const std::string& text) {
  const auto p = kDir / name;
  fixtures::write_text(p, text);
  return p;
}

Instant at(const char* s) { return *parse_timestamp(s); }

RawRecords one_column(const std::vector<std::optional<double>>& values) {
  RawRecords r;
  r.pollutants = {"NO2"};
  r.units["NO2"] = "ppb";
  const Instant t0 = at("2024-01-01T00:00:00Z");
  for (std::size_t i = 0; i < values.size(); ++i) r.rows.push_back({t0 + std::chrono::minutes(i), {values[i]}});
  return r;
}

std::vector<double> column_values(const RawRecords& r, std::size_t c = 0) {
  std::vector<double> out;
  for (const auto& row : r.rows) out.push_back(*row.values[c]);
  return out;
}

/// Minute rows starting at 00:00 with the given NO2 values.
RawRecords minutes(const std::vector<double>& values) {
  std::vector<std::optional<double>> v(values.begin(), values.end());
  return one_column(v);
}

}  // namespace

TEST_CASE("timestamps parse and format in UTC") {
  const auto t = parse_timestamp("2024-03-05T07:08:09Z");
  REQUIRE(t.has_value());
  CHECK(format_timestamp(*t) == "2024-03-05T07:08:09Z");
  CHECK_FALSE(parse_timestamp("2024-03-05 07:08:09").has_value());
  CHECK_FALSE(parse_timestamp("2024-13-05T07:08:09Z").has_value());
  CHECK_FALSE(parse_timestamp("garbage").has_value());
}

TEST_CASE("default units follow the pollutant family") {
  CHECK(default_unit("PM2.5") == "µg/m³");
  CHECK(default_unit("PM10") == "µg/m³");
  CHECK(default_unit("NO2") == "ppb");
  CHECK(known_pollutants().size() == 6);
}

TEST_CASE("load_csv reads a three-row file") {
  const auto p = csv("three.csv",
                     "timestamp,NO2\n2024-01-01T00:00:00Z,1\n2024-01-01T00:01:00Z,2\n2024-01-01T00:02:00Z,3\n");
  const LoadResult r = load_csv(p);
  REQUIRE(r.records.rows.size() == 3);
  CHECK(r.records.pollutants == std::vector<std::string>{"NO2"});
  CHECK(r.records.units.at("NO2") == "ppb");
  CHECK(r.report.missing_per_column.at("NO2") == 0);
  CHECK(column_values(r.records) == std::vector<double>{1, 2, 3});
}

TEST_CASE("blank and unparseable cells become missing and are counted") {
  const auto p = csv("blank.csv",
                     "timestamp,NO2,O3\n2024-01-01T00:00:00Z,1,5\n2024-01-01T00:01:00Z,,6\n"
                     "2024-01-01T00:02:00Z,3,abc\n");
  const LoadResult r = load_csv(p);
  CHECK(r.report.missing_per_column.at("NO2") == 1);
  CHECK(r.report.missing_per_column.at("O3") == 1);
  CHECK_FALSE(r.records.rows[1].values[0].has_value());
  CHECK_FALSE(r.records.rows[2].values[1].has_value());

  const auto j = nlohmann::json::parse(r.report.to_json());
  CHECK(j.at("rows") == 3);
  CHECK(j.at("dropped_rows") == 0);
  CHECK(j.at("missing_per_column").at("NO2") == 1);
}

TEST_CASE("shuffled timestamps come back sorted") {
  std::vector<int> minute(10);
  std::iota(minute.begin(), minute.end(), 0);
  std::mt19937_64 rng(5);
  std::shuffle(minute.begin(), minute.end(), rng);
  std::string text = "timestamp,NO2\n";
  for (int m : minute) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "2024-01-01T00:%02d:00Z,%d\n", m, 100 + m);
    text += buf;
  }
  const LoadResult r = load_csv(csv("shuffled.csv", text));
  REQUIRE(r.records.rows.size() == 10);
  // Oracle: sort the written pairs independently.
  std::vector<int> expected = minute;
  std::sort(expected.begin(), expected.end());
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(r.records.rows[i].timestamp == at("2024-01-01T00:00:00Z") + std::chrono::minutes(expected[i]));
    CHECK(*r.records.rows[i].values[0] == 100 + expected[i]);
  }
}

TEST_CASE("duplicate and unparseable timestamps are dropped and reported") {
  const auto p = csv("dups.csv",
                     "timestamp,NO2\n2024-01-01T00:00:00Z,1\nnot-a-time,2\n2024-01-01T00:00:00Z,9\n"
                     "2024-01-01T00:01:00Z,4\n");
  const LoadResult r = load_csv(p);
  CHECK(r.records.rows.size() == 2);
  CHECK(r.report.dropped_rows == 2);
  CHECK(*r.records.rows[0].values[0] == 1);  // first occurrence wins
}

TEST_CASE("load_csv error paths") {
  CHECK_THROWS_AS(load_csv(kDir / "absent.csv"), MissingArtifactError);
  CHECK_THROWS_AS(load_csv(csv("nots.csv", "time,NO2\n2024-01-01T00:00:00Z,1\n")), SchemaError);
  CHECK_THROWS_AS(load_csv(csv("nopol.csv", "timestamp,foo\n2024-01-01T00:00:00Z,1\n")), SchemaError);
  CHECK_THROWS_AS(load_csv(csv("norows.csv", "timestamp,NO2\nbad,1\n")), EmptyDataError);
  CHECK_THROWS_AS(load_csv(csv("empty.csv", "")), EmptyDataError);
  CsvSchema schema;
  schema.pollutant_columns = {"SO2"};
  CHECK_THROWS_AS(load_csv(csv("noso2.csv", "timestamp,NO2\n2024-01-01T00:00:00Z,1\n"), schema), SchemaError);
}

TEST_CASE("impute_missing examples") {
  CHECK(column_values(impute_missing(one_column({1.0, std::nullopt, 3.0}), ImputePolicy::kLinear)) ==
        std::vector<double>{1, 2, 3});
  CHECK(column_values(impute_missing(one_column({1.0, std::nullopt, std::nullopt}), ImputePolicy::kCarryForward)) ==
        std::vector<double>{1, 1, 1});
  CHECK(column_values(impute_missing(one_column({std::nullopt, 4.0, std::nullopt, 8.0}), ImputePolicy::kLinear)) ==
        std::vector<double>{4, 4, 6, 8});
  CHECK(column_values(impute_missing(one_column({2.0, std::nullopt, std::nullopt, 8.0}), ImputePolicy::kCarryForward)) ==
        std::vector<double>{2, 2, 2, 8});
}

TEST_CASE("impute_missing rejects an entirely missing column") {
  CHECK_THROWS_AS(impute_missing(one_column({std::nullopt, std::nullopt})), EmptyDataError);
}

TEST_CASE("impute_missing is idempotent and leaves no gaps") {
  std::mt19937_64 rng(11);
  std::bernoulli_distribution gap(0.3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto base = fixtures::random_vector(40, 100 + trial);
    std::vector<std::optional<double>> v;
    for (double x : base) v.push_back(gap(rng) ? std::nullopt : std::optional<double>(x));
    v[20] = 0.5;  // at least one observation
    for (auto policy : {ImputePolicy::kLinear, ImputePolicy::kCarryForward}) {
      const RawRecords once = impute_missing(one_column(v), policy);
      const RawRecords twice = impute_missing(once, policy);
      for (const auto& row : once.rows) CHECK(row.values[0].has_value());
      CHECK(column_values(once) == column_values(twice));
    }
  }
}

TEST_CASE("hourly_average examples") {
  SUBCASE("constant hour") {
    const TimeSeries ts = hourly_average(minutes(std::vector<double>(60, 7.0)), "NO2");
    CHECK(ts.values == std::vector<double>{7.0});
    CHECK(ts.pollutant == "NO2");
    CHECK(ts.unit == "ppb");
  }
  SUBCASE("0..59") {
    std::vector<double> v(60);
    std::iota(v.begin(), v.end(), 0.0);
    CHECK(hourly_average(minutes(v), "NO2").values == std::vector<double>{29.5});
  }
  SUBCASE("two hours") {
    std::vector<double> v(120);
    for (std::size_t i = 0; i < 120; ++i) v[i] = i < 60 ? (i % 2 ? 2.0 : 4.0) : 9.0;
    // Oracle: per-bucket means computed directly.
    double a = 0, b = 0;
    for (std::size_t i = 0; i < 60; ++i) a += v[i], b += v[60 + i];
    const TimeSeries ts = hourly_average(minutes(v), "NO2");
    CHECK(ts.values == std::vector<double>{a / 60, b / 60});
    CHECK(ts.values == std::vector<double>{3.0, 9.0});
    CHECK(ts.start == at("2024-01-01T00:00:00Z"));
  }
}

TEST_CASE("hourly buckets are left-closed clock hours") {
  RawRecords r;
  r.pollutants = {"NO2"};
  r.units["NO2"] = "ppb";
  r.rows.push_back({at("2024-01-01T00:30:00Z"), {1.0}});
  r.rows.push_back({at("2024-01-01T00:59:00Z"), {3.0}});
  r.rows.push_back({at("2024-01-01T01:00:00Z"), {10.0}});
  const TimeSeries ts = hourly_average(r, "NO2");
  CHECK(ts.start == at("2024-01-01T00:00:00Z"));
  CHECK(ts.values == std::vector<double>{2.0, 10.0});
}

TEST_CASE("an hour without readings is an error") {
  RawRecords r;
  r.pollutants = {"NO2"};
  r.units["NO2"] = "ppb";
  r.rows.push_back({at("2024-01-01T00:00:00Z"), {1.0}});
  r.rows.push_back({at("2024-01-01T02:00:00Z"), {2.0}});
  CHECK_THROWS_AS(hourly_average(r, "NO2"), EmptyDataError);
  CHECK_THROWS_AS(hourly_average(RawRecords{{"NO2"}, {{"NO2", "ppb"}}, {}}, "NO2"), EmptyDataError);
}

TEST_CASE("hourly mean lies within the hour's range") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto v = fixtures::random_vector(180, 500 + trial, -50, 50);
    const TimeSeries ts = hourly_average(minutes(v), "NO2");
    REQUIRE(ts.size() == 3);
    for (std::size_t h = 0; h < 3; ++h) {
      const auto b = v.begin() + static_cast<std::ptrdiff_t>(60 * h);
      CHECK(ts.values[h] >= *std::min_element(b, b + 60));
      CHECK(ts.values[h] <= *std::max_element(b, b + 60));
    }
  }
}

TEST_CASE("minmax_normalize examples") {
  auto [a, pa] = minmax_normalize(fixtures::make_series({0, 5, 10}));
  CHECK(a.values == std::vector<double>{0, 0.5, 1});
  CHECK(pa.min == 0);
  CHECK(pa.max == 10);
  CHECK_FALSE(pa.degenerate);

  auto [b, pb] = minmax_normalize(fixtures::make_series({4, 4, 4}));
  CHECK(b.values == std::vector<double>{0, 0, 0});
  CHECK(pb.degenerate);

  auto [c, pc] = minmax_normalize(fixtures::make_series({-2, 0, 2}));
  CHECK(c.values == std::vector<double>{0, 0.5, 1});

  CHECK_THROWS(minmax_normalize(fixtures::make_series({1, std::numeric_limits<double>::quiet_NaN()})));
  CHECK_THROWS(minmax_normalize(fixtures::make_series({})));
}

TEST_CASE("denormalize examples") {
  CHECK(denormalize(fixtures::make_series({0, 0.5, 1}), NormParams{0, 10, false}).values ==
        std::vector<double>{0, 5, 10});
  CHECK(denormalize(fixtures::make_series({0, 0, 0}), NormParams{4, 4, true}).values ==
        std::vector<double>{4, 4, 4});
  CHECK_THROWS_AS(denormalize(fixtures::make_series({0, 0.2}), NormParams{4, 4, true}), std::domain_error);
}

TEST_CASE("normalisation round-trips and stays in [0, 1]") {
  for (int trial = 0; trial < 20; ++trial) {
    const auto v = fixtures::random_vector(100, 900 + trial, -1e3, 1e3);
    const auto ts = fixtures::make_series(v);
    auto [n, p] = minmax_normalize(ts);
    for (double x : n.values) {
      CHECK(x >= 0.0);
      CHECK(x <= 1.0);
    }
    const auto back = denormalize(n, p);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(back.values[i] - v[i]) <= 1e-12 * std::abs(v[i]) + 1e-12);
  }
}

TEST_CASE("normalisation fitted on a prefix ignores appended test data") {
  const auto v = fixtures::random_vector(120, 77, 0, 30);
  const auto prefix = fixtures::make_series({v.begin(), v.begin() + 100});
  const NormParams fitted = minmax_normalize(prefix).second;
  auto extended = fixtures::make_series(v);
  extended.values.push_back(1e6);  // far outside the training range
  const NormParams refit = fit_minmax(std::span<const double>(extended.values).first(100));
  CHECK(refit.min == fitted.min);
  CHECK(refit.max == fitted.max);
  const auto applied = normalize_with(extended, fitted);
  CHECK(applied.values.back() > 1.0);  // applied, not clipped
}

TEST_CASE("series CSV round-trips exactly") {
  auto ts = fixtures::make_series(fixtures::random_vector(50, 4, 0, 100), "PM2.5");
  write_series_csv(kDir / "s.csv", ts);
  const TimeSeries back = read_series_csv(kDir / "s.csv");
  CHECK(back.values == ts.values);
  CHECK(back.pollutant == "PM2.5");
  CHECK(back.unit == ts.unit);
  CHECK(back.start == ts.start);
  CHECK_THROWS_AS(read_series_csv(kDir / "nope.csv"), MissingArtifactError);
}
