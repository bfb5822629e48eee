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


// wavecast-synth: writes a synthetic sub-hourly pollutant CSV (daily cycle,
// heteroskedastic noise, optional missing cells) for demos and tests.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "wavecast/series.hpp"

int main(int argc, char** argv) {
  CLI::App app{"wavecast-synth: synthetic pollutant CSV generator"};
  std::string out;
  std::size_t days = 30;
  std::size_t step_minutes = 15;
  std::uint64_t seed = 0;
  double missing = 0.0;
  bool constant = false;
  app.add_option("--out", out, "Output CSV path")->required();
  app.add_option("--days", days, "Number of days")->check(CLI::Range(1, 3650));
  app.add_option("--step-minutes", step_minutes, "Sampling interval in minutes")->check(CLI::Range(1, 60));
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--missing", missing, "Probability that a cell is left empty")->check(CLI::Range(0.0, 0.9));
  app.add_flag("--constant", constant, "Every pollutant constant (no cycle, no noise)");
  CLI11_PARSE(app, argc, argv);

  if (60 % step_minutes != 0) {
    std::cerr << "--step-minutes must divide 60\n";
    return 1;
  }

  const auto& names = wavecast::known_pollutants();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  if (const auto parent = std::filesystem::path(out).parent_path(); !parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  if (!f) {
    std::cerr << "cannot write " << out << "\n";
    return 1;
  }
  f << "timestamp";
  for (const auto& n : names) f << "," << n;
  f << "\n";

  const wavecast::Instant t0 = *wavecast::parse_timestamp("2024-01-01T00:00:00Z");
  const std::size_t samples = days * 24 * 60 / step_minutes;
  char buf[32];
  for (std::size_t i = 0; i < samples; ++i) {
    const auto t = t0 + std::chrono::minutes(i * step_minutes);
    const double hour = static_cast<double>(i * step_minutes) / 60.0;
    f << wavecast::format_timestamp(t);
    for (std::size_t p = 0; p < names.size(); ++p) {
      const double level = 10.0 + 8.0 * static_cast<double>(p);
      double v = level;
      if (!constant) {
        const double phase = 2.0 * std::numbers::pi * hour / 24.0 + 0.7 * static_cast<double>(p);
        const double cycle = std::sin(phase);
        const double sigma = 0.05 * level * (0.3 + 0.7 * (1.0 + cycle) / 2.0);
        v = std::max(0.0, level + 0.3 * level * cycle + sigma * noise(rng));
      }
      f << ",";
      if (missing > 0.0 && unit(rng) < missing) continue;
      std::snprintf(buf, sizeof buf, "%.4f", v);
      f << buf;
    }
    f << "\n";
  }
  return 0;
}
