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


// Shared fixtures for the test binaries: synthetic series, scratch
// directories and small file helpers.

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wavecast/eval.hpp"
#include "wavecast/series.hpp"

namespace fixtures {

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

/// 10 + 5 sin(2 pi t / 24) + sigma_t e_t with sigma_t rising with the cycle.
inline std::vector<double> sine_noise(std::size_t n, std::uint64_t seed, double noise = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> e(0.0, 1.0);
  std::vector<double> y(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double c = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / 24.0);
    const double sigma = 0.2 + 0.6 * (1.0 + c) / 2.0;
    y[t] = 10.0 + 5.0 * c + noise * sigma * e(rng);
  }
  return y;
}

/// y_t = mu + phi (y_{t-1} - mu) + e_t, started from the stationary law.
inline std::vector<double> ar1(std::size_t n, std::uint64_t seed, double phi = 0.7, double mu = 20.0,
                               double sigma = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> e(0.0, sigma);
  std::vector<double> y(n);
  double x = e(rng) / std::sqrt(1.0 - phi * phi);
  for (std::size_t t = 0; t < n; ++t) {
    x = phi * x + e(rng);
    y[t] = mu + x;
  }
  return y;
}

inline wavecast::TimeSeries make_series(std::vector<double> values, std::string pollutant = "NO2") {
  wavecast::TimeSeries ts;
  ts.start = *wavecast::parse_timestamp("2024-01-01T00:00:00Z");
  ts.values = std::move(values);
  ts.pollutant = std::move(pollutant);
  ts.unit = wavecast::default_unit(ts.pollutant);
  return ts;
}

/// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("wavecast_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Three models over eight pollutant/horizon cells, with ties in cells 3 and 6.
inline wavecast::EvalReport mcb_table() {
  const char* models[] = {"alpha", "beta", "gamma"};
  const double mase[3][8] = {{0.61, 0.72, 0.90, 0.55, 0.80, 1.10, 0.66, 0.70},
                             {0.75, 0.70, 0.90, 0.81, 0.95, 1.10, 0.71, 0.92},
                             {0.98, 1.05, 0.85, 1.02, 1.00, 1.30, 0.99, 1.01}};
  const char* cells[8][2] = {{"NO2", "1d"}, {"NO2", "7d"}, {"PM10", "1d"}, {"PM10", "7d"},
                             {"O3", "1d"},  {"O3", "7d"},  {"SO2", "1d"},  {"SO2", "7d"}};
  wavecast::EvalReport r;
  for (std::size_t m = 0; m < 3; ++m)
    for (std::size_t c = 0; c < 8; ++c) r.cells.push_back({models[m], cells[c][0], cells[c][1], mase[m][c], ""});
  return r;
}

}  // namespace fixtures
