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


// wavecast: command-line front end. One subcommand per pipeline stage plus
// run-all. Every command is a pure function of config, inputs and seed.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wavecast/config.hpp"
#include "wavecast/conformal.hpp"
#include "wavecast/error.hpp"
#include "wavecast/eval.hpp"
#include "wavecast/hash.hpp"
#include "wavecast/json_io.hpp"
#include "wavecast/pipeline.hpp"
#include "wavecast/series.hpp"
#include "wavecast/svg.hpp"

namespace fs = std::filesystem;
using namespace wavecast;

namespace {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kSchema = 2,
  kEmptyData = 3,
  kMissingArtifact = 4,
  kNumeric = 5,
};

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string pollutant;
  std::string horizon;
  std::optional<double> alpha;
  std::string format = "json";
};

// Shown in the forecast plot before the first forecast step.
constexpr std::size_t kPlotHistory = 168;

RunConfig resolve_config(const Flags& f) {
  RunConfig cfg;
  if (!f.config.empty()) cfg = load_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (!f.out.empty()) cfg.out_dir = f.out;
  if (f.alpha) cfg.conformal.alpha = *f.alpha;
  cfg.validate();
  return cfg;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError("missing artifact: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (content.empty() || content.back() != '\n') out << '\n';
}

fs::path series_dir(const RunConfig& c) { return c.out_dir / "series"; }
fs::path model_dir(const RunConfig& c) { return c.out_dir / "models"; }
fs::path eval_dir(const RunConfig& c) { return c.out_dir / "eval"; }

bool selected(const std::string& id, const std::string& pollutant, const Flags& f) {
  return f.pollutant.empty() || f.pollutant == id || f.pollutant == pollutant;
}

/// Artifacts of one kind, sorted by file name, keyed by stem.
std::map<std::string, fs::path> list_artifacts(const fs::path& dir, const std::string& ext, const char* hint) {
  std::map<std::string, fs::path> out;
  if (fs::is_directory(dir)) {
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().extension() == ext) out[e.path().stem().string()] = e.path();
    }
  }
  if (out.empty()) throw MissingArtifactError("no artifacts in " + dir.string() + "; run `" + hint + "` first");
  return out;
}

std::map<std::string, TimeSeries> load_series(const RunConfig& cfg, const Flags& f) {
  std::map<std::string, TimeSeries> out;
  for (const auto& [id, path] : list_artifacts(series_dir(cfg), ".csv", "wavecast ingest")) {
    TimeSeries ts = read_series_csv(path);
    if (selected(id, ts.pollutant, f)) out.emplace(id, std::move(ts));
  }
  if (out.empty()) throw MissingArtifactError("no ingested series matches pollutant " + f.pollutant);
  return out;
}

// --------------------------------------------------------------------------

int cmd_ingest(const RunConfig& cfg, const Flags& f) {
  if (cfg.data_paths.empty()) throw SchemaError("config lists no data.paths");
  const bool multi = cfg.data_paths.size() > 1;
  fs::create_directories(series_dir(cfg));
  Json reports = Json::object();
  for (const auto& path : cfg.data_paths) {
    CsvSchema schema;
    schema.pollutant_columns = cfg.pollutants;
    if (!f.pollutant.empty()) schema.pollutant_columns = {f.pollutant};
    LoadResult loaded = load_csv(path, schema);
    const RawRecords imputed = impute_missing(loaded.records, cfg.impute);
    for (std::size_t c = 0; c < loaded.records.pollutants.size(); ++c) {
      loaded.report.imputed_per_column[loaded.records.pollutants[c]] = loaded.records.missing_count(c);
    }
    const std::string stem = path.stem().string();
    for (const auto& p : imputed.pollutants) {
      const std::string id = multi ? stem + "." + p : p;
      write_series_csv(series_dir(cfg) / (id + ".csv"), hourly_average(imputed, p));
      std::cout << "series " << id << "\n";
    }
    reports[stem] = Json::parse(loaded.report.to_json());
  }
  write_file(cfg.out_dir / "load_report.json", reports.dump(2));
  return kOk;
}

int cmd_train(const RunConfig& cfg, const Flags& f) {
  const auto& cc = cfg.conformal;
  for (const auto& [id, ts] : load_series(cfg, f)) {
    const std::size_t min_train = cfg.model.lags + 9;
    if (ts.size() < cc.calibration + min_train) {
      throw EmptyDataError("series " + id + " has " + std::to_string(ts.size()) + " points; training plus " +
                           std::to_string(cc.calibration) + " calibration points needs " +
                           std::to_string(cc.calibration + min_train));
    }
    const std::size_t n_train = ts.size() - cc.calibration;
    TimeSeries train = ts;
    train.values.resize(n_train);
    const std::vector<double> actuals(ts.values.begin() + static_cast<std::ptrdiff_t>(n_train), ts.values.end());

    WaveCatBoostConfig mc = cfg.model;
    mc.gbdt.seed = derive_seed(cfg.seed, id);
    const WaveCatBoostModel fitted = fit_wavecatboost(train, mc);

    const std::size_t ulags = cc.uncertainty == UncertaintyMode::kLearned ? cfg.model.lags : 0;
    ResidualCollection residuals = collect_residuals(fitted, actuals, cc.steps, ulags);
    GbdtParams up = cfg.model.gbdt;
    up.seed = derive_seed(cfg.seed, id + "|uncertainty");
    const UncertaintyModel u = fit_uncertainty(residual_matrix(residuals.records), cc.uncertainty, up);
    const ConformalCalibrator cal = build_calibrator(residuals.records, cc.alpha, cc.window, cc.steps, u);

    Json snap{{"version", kSnapshotVersion},
              {"kind", "wavecast_run_model"},
              {"series", id},
              {"config_hash", cfg.hash()},
              {"train_points", n_train},
              {"calibration_points", actuals.size()},
              {"model", Json::parse(to_json(residuals.model))},
              {"calibrator", Json::parse(to_json(cal))}};
    write_file(model_dir(cfg) / (id + ".json"), snap.dump(2));
    std::cout << "model " << id << " components=" << fitted.component_count() << "\n";
  }
  return kOk;
}

int cmd_forecast(const RunConfig& cfg, const Flags& f) {
  const HorizonSpec hz = horizon_from_label(f.horizon.empty() ? "1d" : f.horizon);
  std::size_t matched = 0;
  for (const auto& [id, path] : list_artifacts(model_dir(cfg), ".json", "wavecast train")) {
    const Json snap = parse_versioned(read_file(path), "model");
    const WaveCatBoostModel model = wavecatboost_from_json(snap.at("model").dump());
    if (!selected(id, model.pollutant, f)) continue;
    ++matched;
    const ConformalCalibrator cal = with_alpha(calibrator_from_json(snap.at("calibrator").dump()), cfg.conformal.alpha);

    const ForecastResult fc = forecast(model, hz.steps);
    const std::vector<double> history = original_history(model);
    const IntervalForecast iv = make_interval(fc.point, history, cal, model.issued_at());

    Json out{{"series", id},
             {"horizon", hz.label},
             {"start", format_timestamp(model.start + std::chrono::hours(model.issued_at()))},
             {"forecast", Json::parse(to_json(fc))},
             {"interval", Json::parse(to_json(iv))}};
    const fs::path base = cfg.out_dir / "forecasts" / (id + "_" + hz.label);
    write_file(base.string() + ".json", out.dump(2));

    const std::size_t tail = std::min(kPlotHistory, history.size());
    const std::span<const double> recent = std::span<const double>(history).last(tail);
    write_file(base.string() + ".svg",
               forecast_svg(id + " " + hz.label + " forecast", recent, iv.point, iv.lower, iv.upper));
    std::cout << "forecast " << id << " " << hz.label << "\n";
  }
  if (matched == 0) throw MissingArtifactError("no trained model matches pollutant " + f.pollutant);
  return kOk;
}

int cmd_eval(const RunConfig& cfg, const Flags& f) {
  const auto series = load_series(cfg, f);
  std::vector<ModelSpec> specs;
  for (const auto& name : cfg.models) specs.push_back(model_spec_from_name(name, cfg.model));
  const std::vector<std::string> horizons = f.horizon.empty() ? cfg.horizons : std::vector<std::string>{f.horizon};
  EvalOptions opt;
  opt.seasonality = cfg.seasonality;
  opt.config_hash = cfg.hash();
  const EvalReport report = run_rolling_eval(series, specs, horizons, cfg.seed, opt);
  write_file(eval_dir(cfg) / "report.csv", report.to_csv());
  write_file(eval_dir(cfg) / "report.json", report.to_json());
  std::cout << (f.format == "csv" ? report.to_csv() : report.to_json() + "\n");
  return kOk;
}

int cmd_mcb(const RunConfig& cfg, const Flags& f) {
  const EvalReport report = EvalReport::from_json(read_file(eval_dir(cfg) / "report.json"));
  const double alpha = f.alpha.value_or(0.05);
  std::optional<std::string> horizon;
  if (!f.horizon.empty()) horizon = f.horizon;
  const McbResult result = mcb_test(report, alpha, horizon);
  const std::string name = horizon ? "mcb_" + *horizon : "mcb";
  write_file(cfg.out_dir / "mcb" / (name + ".json"), result.to_json());
  write_file(cfg.out_dir / "mcb" / (name + ".svg"), mcb_svg(result, horizon ? "MCB " + *horizon : "MCB"));
  if (f.format == "csv") {
    std::cout << "model,mean_rank,significantly_worse\n";
    for (std::size_t m = 0; m < result.models.size(); ++m) {
      const bool worse = std::find(result.significantly_worse.begin(), result.significantly_worse.end(),
                                   result.models[m]) != result.significantly_worse.end();
      std::cout << result.models[m] << "," << result.mean_ranks[m] << "," << (worse ? 1 : 0) << "\n";
    }
  } else {
    std::cout << result.to_json() << "\n";
  }
  return kOk;
}

int cmd_run_all(const RunConfig& cfg, const Flags& f) {
  cmd_ingest(cfg, f);
  cmd_train(cfg, f);
  cmd_forecast(cfg, f);
  // The eval horizons come from the config; --horizon only picks the forecast.
  Flags ef = f;
  ef.horizon.clear();
  cmd_eval(cfg, ef);
  if (cfg.models.size() >= 2) cmd_mcb(cfg, ef);
  return kOk;
}

int report_error(int code, const char* kind, const std::string& message, const std::string& component = {}) {
  Json j{{"error", kind}, {"exit_code", code}, {"message", message}};
  if (!component.empty()) j["component"] = component;
  std::cerr << j.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wavecast: wavelet-decomposed gradient boosting forecasts with conformal intervals"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags flags;
  app.add_option("--config", flags.config, "INI run configuration");
  app.add_option("--seed", flags.seed, "Override run.seed");
  app.add_option("--out", flags.out, "Override run.out (output directory)");
  app.add_option("--pollutant", flags.pollutant, "Restrict to one series (pollutant or series id)");
  app.add_option("--horizon", flags.horizon, "Forecast horizon")->check(CLI::IsMember({"1d", "7d", "14d", "31d"}));
  app.add_option("--alpha", flags.alpha, "Miscoverage level for intervals / MCB")->check(CLI::Range(0.0, 1.0));
  app.add_option("--format", flags.format, "Stdout format for eval and mcb")->check(CLI::IsMember({"json", "csv"}));

  using Command = int (*)(const RunConfig&, const Flags&);
  const std::vector<std::tuple<const char*, const char*, Command>> commands{
      {"ingest", "Load CSVs, impute, average hourly, write per-pollutant series", cmd_ingest},
      {"train", "Fit models on each series and calibrate conformal scores", cmd_train},
      {"forecast", "Point forecasts with conformal intervals (JSON + SVG)", cmd_forecast},
      {"eval", "Rolling-origin MASE evaluation over the model grid", cmd_eval},
      {"mcb", "Multiple comparisons with the best over an eval report", cmd_mcb},
      {"run-all", "ingest, train, forecast, eval, mcb", cmd_run_all},
  };
  Command chosen = nullptr;
  for (const auto& [name, help, fn] : commands) {
    app.add_subcommand(name, help)->callback([&chosen, fn = fn] { chosen = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return report_error(kUsage, "usage", e.what());
  }

  try {
    return chosen(resolve_config(flags), flags);
  } catch (const SchemaError& e) {
    return report_error(kSchema, "schema", e.what());
  } catch (const EmptyDataError& e) {
    return report_error(kEmptyData, "empty_data", e.what());
  } catch (const MissingArtifactError& e) {
    return report_error(kMissingArtifact, "missing_artifact", e.what());
  } catch (const NumericError& e) {
    return report_error(kNumeric, "numeric", e.what(), e.component());
  } catch (const std::domain_error& e) {
    return report_error(kNumeric, "numeric", e.what());
  } catch (const Json::exception& e) {
    return report_error(kSchema, "schema", std::string("malformed artifact: ") + e.what());
  } catch (const std::invalid_argument& e) {
    return report_error(kUsage, "invalid_argument", e.what());
  } catch (const std::exception& e) {
    return report_error(kUsage, "error", e.what());
  }
}
