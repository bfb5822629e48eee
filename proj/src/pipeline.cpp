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

#include "wavecast/pipeline.hpp"

#include <cmath>
#include <stdexcept>

#include "wavecast/error.hpp"
#include "wavecast/hash.hpp"
#include "wavecast/json_io.hpp"

namespace wavecast {
namespace {

std::vector<std::vector<double>> tail_histories(const std::vector<std::vector<double>>& components,
                                                std::size_t lags) {
  std::vector<std::vector<double>> out;
  for (const auto& col : components) out.emplace_back(col.end() - static_cast<std::ptrdiff_t>(lags), col.end());
  return out;
}

}  // namespace

const char* to_string(ComponentDomain domain) {
  return domain == ComponentDomain::kCoefficients ? "coefficients" : "mra";
}

ComponentDomain component_domain_from_string(const std::string& name) {
  if (name == "coefficients") return ComponentDomain::kCoefficients;
  if (name == "mra") return ComponentDomain::kMra;
  throw std::invalid_argument("unknown component domain: " + name);
}

std::vector<std::vector<double>> decompose_components(std::span<const double> series, std::size_t levels,
                                                      ComponentDomain domain) {
  const FilterPair haar = haar_filters();
  if (domain == ComponentDomain::kMra) {
    WaveletDecomposition dec = decompose(series, levels, haar);
    auto out = std::move(dec.details);
    out.push_back(std::move(dec.smooth));
    return out;
  }
  WaveletCoefficients c = modwt(series, levels, haar);
  auto out = std::move(c.wavelet);
  out.push_back(std::move(c.scaling));
  return out;
}

std::string WaveCatBoostModel::component_name(std::size_t k) const {
  const bool coeff = domain == ComponentDomain::kCoefficients;
  return k < levels ? (coeff ? "W" : "D") + std::to_string(k + 1) : (coeff ? "V" : "S") + std::to_string(levels);
}

std::vector<double> recursive_forecast(const OrderedGbdtModel& model, std::span<const double> history,
                                       std::size_t horizon, const std::string& component) {
  const std::size_t p = model.lags;
  if (history.size() < p) throw std::invalid_argument("history shorter than lag count");
  std::vector<double> window(history.end() - static_cast<std::ptrdiff_t>(p), history.end());
  window.reserve(p + horizon);
  std::vector<double> out;
  out.reserve(horizon);
  for (std::size_t step = 0; step < horizon; ++step) {
    const double next = model.predict(std::span<const double>(window).last(p));
    if (!std::isfinite(next)) {
      throw NumericError(component, "non-finite prediction at step " + std::to_string(step + 1));
    }
    out.push_back(next);
    window.push_back(next);
  }
  return out;
}

WaveCatBoostModel fit_wavecatboost(const TimeSeries& series, const WaveCatBoostConfig& config) {
  const std::size_t n = series.size();
  if (config.lags == 0 || config.lags >= n) {
    throw std::invalid_argument("lag count " + std::to_string(config.lags) + " must be in [1, " +
                                std::to_string(n) + ")");
  }
  if (n <= config.lags + 8) {
    throw std::invalid_argument("series of length " + std::to_string(n) + " too short for " +
                                std::to_string(config.lags) + " lags");
  }

  WaveCatBoostModel m;
  m.pollutant = series.pollutant;
  m.unit = series.unit;
  m.start = series.start;
  m.lags = config.lags;
  m.domain = config.domain;
  m.filter = haar_filters();
  m.levels = config.levels.value_or(decomposition_levels(n));

  auto [normalized, norm] = minmax_normalize(series);
  m.norm = norm;
  m.normalized_history = std::move(normalized.values);
  const auto columns = decompose_components(m.normalized_history, m.levels, m.domain);

  auto models = std::make_shared<std::vector<OrderedGbdtModel>>();
  for (std::size_t k = 0; k < columns.size(); ++k) {
    GbdtParams params = config.gbdt;
    params.seed = derive_seed(config.gbdt.seed, m.component_name(k));
    try {
      models->push_back(fit(make_lag_matrix(columns[k], m.lags), params));
    } catch (const std::exception& e) {
      throw NumericError(m.component_name(k), e.what());
    }
  }
  m.components = std::move(models);
  m.histories = tail_histories(columns, m.lags);
  return m;
}

ForecastResult forecast(const WaveCatBoostModel& model, std::size_t horizon) {
  ForecastResult r;
  r.pollutant = model.pollutant;
  r.issued_at = model.issued_at();
  r.horizon = horizon;
  r.point.assign(horizon, 0.0);
  for (std::size_t k = 0; k < model.component_count(); ++k) {
    const std::string name = model.component_name(k);
    r.component_names.push_back(name);
    r.per_component.push_back(recursive_forecast((*model.components)[k], model.histories[k], horizon, name));
  }
  for (std::size_t t = 0; t < horizon; ++t) {
    double sum = 0.0;
    for (const auto& comp : r.per_component) sum += comp[t];
    try {
      r.point[t] = model.norm.invert(sum);
    } catch (const std::domain_error& e) {
      throw NumericError("", e.what());
    }
  }
  return r;
}

WaveCatBoostModel update_history(const WaveCatBoostModel& model, double value, HistoryUpdate mode) {
  if (!std::isfinite(value)) throw std::invalid_argument("update value must be finite");
  WaveCatBoostModel next = model;
  const double x = model.norm.apply(value);
  next.normalized_history.push_back(x);
  if (mode == HistoryUpdate::kRedecompose) {
    next.histories = tail_histories(decompose_components(next.normalized_history, next.levels, next.domain), next.lags);
    return next;
  }
  double innovation = x;
  std::vector<double> step(model.component_count());
  for (std::size_t k = 0; k < step.size(); ++k) {
    step[k] = recursive_forecast((*model.components)[k], model.histories[k], 1, model.component_name(k)).front();
    innovation -= step[k];
  }
  step.front() += innovation;
  for (std::size_t k = 0; k < step.size(); ++k) {
    auto& h = next.histories[k];
    h.erase(h.begin());
    h.push_back(step[k]);
  }
  return next;
}

std::string to_json(const WaveCatBoostModel& m) {
  Json j{{"version", kSnapshotVersion},
         {"kind", "wavecatboost"},
         {"pollutant", m.pollutant},
         {"unit", m.unit},
         {"start", format_timestamp(m.start)},
         {"levels", m.levels},
         {"lags", m.lags},
         {"domain", to_string(m.domain)},
         {"norm", m.norm},
         {"filter", m.filter},
         {"normalized_history", m.normalized_history},
         {"histories", m.histories},
         {"components", *m.components}};
  return j.dump();
}

WaveCatBoostModel wavecatboost_from_json(const std::string& text) {
  const Json j = parse_versioned(text, "wavecatboost");
  if (j.at("kind") != "wavecatboost") throw std::invalid_argument("snapshot is not a wavecatboost model");
  WaveCatBoostModel m;
  j.at("pollutant").get_to(m.pollutant);
  j.at("unit").get_to(m.unit);
  const auto start = parse_timestamp(j.at("start").get<std::string>());
  if (!start) throw std::invalid_argument("malformed start timestamp in snapshot");
  m.start = *start;
  j.at("levels").get_to(m.levels);
  j.at("lags").get_to(m.lags);
  m.domain = component_domain_from_string(j.at("domain").get<std::string>());
  j.at("norm").get_to(m.norm);
  j.at("filter").get_to(m.filter);
  if (!is_haar(m.filter)) throw std::invalid_argument("only the Haar filter is supported");
  j.at("normalized_history").get_to(m.normalized_history);
  j.at("histories").get_to(m.histories);
  m.components = std::make_shared<const std::vector<OrderedGbdtModel>>(
      j.at("components").get<std::vector<OrderedGbdtModel>>());
  if (m.components->size() != m.levels + 1 || m.histories.size() != m.levels + 1) {
    throw std::invalid_argument("component count does not match decomposition levels");
  }
  for (std::size_t k = 0; k <= m.levels; ++k) {
    if ((*m.components)[k].lags != m.lags || m.histories[k].size() != m.lags) {
      throw std::invalid_argument("component " + m.component_name(k) + " has inconsistent lag count");
    }
  }
  return m;
}

std::string to_json(const ForecastResult& r) {
  Json components = Json::object();
  for (std::size_t k = 0; k < r.per_component.size(); ++k) components[r.component_names[k]] = r.per_component[k];
  Json j{{"pollutant", r.pollutant},
         {"issued_at", r.issued_at},
         {"horizon", r.horizon},
         {"point", r.point},
         {"components", components}};
  return j.dump(2);
}

SeriesGbdtModel fit_series_gbdt(const TimeSeries& series, std::size_t lags, const GbdtParams& params) {
  auto [normalized, norm] = minmax_normalize(series);
  SeriesGbdtModel m;
  m.lags = lags;
  m.norm = norm;
  m.model = std::make_shared<const OrderedGbdtModel>(fit(make_lag_matrix(normalized.values, lags), params));
  m.history.assign(normalized.values.end() - static_cast<std::ptrdiff_t>(lags), normalized.values.end());
  return m;
}

std::vector<double> forecast(const SeriesGbdtModel& model, std::size_t horizon) {
  auto out = recursive_forecast(*model.model, model.history, horizon, "series");
  for (double& v : out) v = model.norm.invert(v);
  return out;
}

}  // namespace wavecast
