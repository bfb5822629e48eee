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
#include <numeric>
#include <set>
#include <stdexcept>

#include "wavecast/eval.hpp"
#include "wavecast/json_io.hpp"

namespace wavecast {
namespace {

// Upper quantiles of the range of M iid N(0, 1) variables, M = 2..20.
// Solved from P(R <= q) = M * int phi(z) [Phi(z + q) - Phi(z)]^(M-1) dz.
constexpr double kRangeQ01[] = {3.6427727354, 4.1203032065, 4.4028008614, 4.6028210422, 4.7570472494,
                                4.8821661950, 4.9871826891, 5.0775056811, 5.1566349601, 5.2269628834,
                                5.2901955791, 5.3475915402, 5.4001049882, 5.4484762119, 5.4932907701,
                                5.5350195915, 5.5740469083, 5.6106901940, 5.6452146980};
constexpr double kRangeQ05[] = {2.7718076487, 3.3144931554, 3.6331595749, 3.8576555104, 4.0300920532,
                                4.1695541550, 4.2863094093, 4.3865091155, 4.4741242217, 4.5518635841,
                                4.6216554719, 4.6849198473, 4.7427317077, 4.7959238604, 4.8451541840,
                                4.8909511256, 4.9337453581, 4.9738923487, 5.0116887941};
constexpr double kRangeQ10[] = {2.3261743074, 2.9023802134, 3.2404462209, 3.4782805507, 3.6607209417,
                                3.8080982570, 3.9313491005, 4.0370231302, 4.1293463982, 4.2112002465,
                                4.2846346037, 4.3511581986, 4.4119126222, 4.4677818159, 4.5194637048,
                                4.5675186363, 4.6124030718, 4.6544935987, 4.6941044095};

}  // namespace

double studentized_range_quantile(std::size_t models, double alpha) {
  if (models < 2 || models > 20) throw std::invalid_argument("MCB critical values are tabulated for 2..20 models");
  const std::size_t i = models - 2;
  if (std::abs(alpha - 0.01) < 1e-12) return kRangeQ01[i];
  if (std::abs(alpha - 0.05) < 1e-12) return kRangeQ05[i];
  if (std::abs(alpha - 0.10) < 1e-12) return kRangeQ10[i];
  throw std::invalid_argument("MCB alpha must be 0.01, 0.05 or 0.10");
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

McbResult mcb_test(const EvalReport& report, double alpha, const std::optional<std::string>& horizon) {
  std::set<std::string> model_set;
  std::set<std::pair<std::string, std::string>> keys;
  for (const auto& c : report.cells) {
    if (horizon && c.horizon != *horizon) continue;
    model_set.insert(c.model);
    keys.emplace(c.pollutant, c.horizon);
  }
  const std::vector<std::string> models(model_set.begin(), model_set.end());
  const std::size_t m = models.size();
  const std::size_t n = keys.size();
  if (m < 2) throw std::invalid_argument("MCB needs at least two models");
  if (n < 2) throw std::invalid_argument("MCB needs at least two cells");

  McbResult r;
  r.alpha = alpha;
  r.cells = n;
  r.models = models;
  r.mean_ranks.assign(m, 0.0);
  std::vector<double> row(m);
  for (const auto& [pollutant, hz] : keys) {
    for (std::size_t i = 0; i < m; ++i) {
      const EvalCell* c = report.find(models[i], pollutant, hz);
      if (!c) throw std::invalid_argument("incomplete grid: no " + models[i] + " result for " + pollutant + "/" + hz);
      row[i] = c->mase;
    }
    const auto ranks = average_ranks(row);
    for (std::size_t i = 0; i < m; ++i) r.mean_ranks[i] += ranks[i];
  }
  for (double& v : r.mean_ranks) v /= static_cast<double>(n);

  r.critical_value = studentized_range_quantile(m, alpha);
  const double md = static_cast<double>(m);
  r.half_width = r.critical_value * std::sqrt(md * (md + 1.0) / (12.0 * static_cast<double>(n)));
  const auto best = static_cast<std::size_t>(std::min_element(r.mean_ranks.begin(), r.mean_ranks.end()) -
                                             r.mean_ranks.begin());
  r.best = models[best];
  r.reference_lo = r.mean_ranks[best] - r.half_width;
  r.reference_hi = r.mean_ranks[best] + r.half_width;
  for (std::size_t i = 0; i < m; ++i) {
    if (r.mean_ranks[i] - r.half_width > r.reference_hi) r.significantly_worse.push_back(models[i]);
  }
  return r;
}

std::string McbResult::to_json() const {
  Json ranks = Json::object();
  for (std::size_t i = 0; i < models.size(); ++i) ranks[models[i]] = mean_ranks[i];
  Json j{{"alpha", alpha},
         {"cells", cells},
         {"mean_ranks", ranks},
         {"critical_value", critical_value},
         {"half_width", half_width},
         {"best", best},
         {"reference_interval", {reference_lo, reference_hi}},
         {"significantly_worse", significantly_worse}};
  return j.dump(2);
}

}  // namespace wavecast
