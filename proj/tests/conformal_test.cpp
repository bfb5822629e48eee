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
#include "wavecast/conformal.hpp"

using namespace wavecast;

namespace {

ConformalCalibrator with_scores(const std::vector<double>& scores, double alpha, std::size_t window = 1000) {
  ConformalCalibrator cal(alpha, window);
  for (std::size_t i = 0; i < scores.size(); ++i) cal.add_score(1, i, scores[i]);
  return cal;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("conformity scores") {
  CHECK(conformal_score(10, 8, 1) == 2);
  CHECK(conformal_score(5, 5, 1) == 0);
  CHECK(conformal_score(10, 6, 2) == 2);
  CHECK(conformal_score(1, 0, 0) == 1.0 / kUncertaintyFloor);  // floored scale
  CHECK_THROWS_AS(conformal_score(std::numeric_limits<double>::quiet_NaN(), 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(conformal_score(1, 1, std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST_CASE("conformal quantile order statistics") {
  CHECK(conformal_quantile(with_scores({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0.1), 10) == 10);
  CHECK(conformal_quantile(with_scores({4, 2, 1, 3}, 0.5), 4) == 3);
  CHECK(conformal_quantile(with_scores({5}, 0.5), 1) == 5);
  CHECK(conformal_rank(10, 0.1) == 10);
  CHECK(conformal_rank(4, 0.5) == 3);
  CHECK(conformal_rank(19, 0.05) == 19);  // 20 * 0.95 is exactly 19
  CHECK(std::isinf(conformal_quantile(with_scores({1, 2, 3, 4, 5}, 0.1), 5)));
}

TEST_CASE("quantile agrees with a sort-based order statistic") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 300;
    const double alpha = 0.01 + 0.5 * static_cast<double>(rng() % 1000) / 1000.0;
    auto scores = fixtures::random_vector(n, 50 + trial, 0, 10);
    const double q = conformal_quantile(with_scores(scores, alpha), n);
    std::sort(scores.begin(), scores.end());
    const double k = std::ceil(static_cast<double>(n + 1) * (1 - alpha) - 1e-9);
    if (k > static_cast<double>(n)) {
      CHECK(std::isinf(q));
    } else {
      CHECK(q == scores[static_cast<std::size_t>(std::max(k, 1.0)) - 1]);
    }
  }
}

TEST_CASE("window selects [t - window, t)") {
  ConformalCalibrator cal(0.5, 3);
  for (std::size_t t = 0; t < 10; ++t) cal.add_score(1, t, static_cast<double>(t));
  CHECK(cal.windowed(10) == std::vector<double>{7, 8, 9});
  CHECK(cal.windowed(9) == std::vector<double>{6, 7, 8});
  CHECK(cal.windowed(8) == std::vector<double>{6, 7});  // 5 already trimmed
  CHECK_THROWS_AS(conformal_quantile(cal, 100), std::invalid_argument);
}

TEST_CASE("calibrator input validation") {
  CHECK_THROWS_AS(ConformalCalibrator(0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(ConformalCalibrator(1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(ConformalCalibrator(0.1, 0), std::invalid_argument);
  CHECK_THROWS_AS(ConformalCalibrator(0.1, 10, 0), std::invalid_argument);
  ConformalCalibrator cal(0.1, 10, 2);
  cal.add_score(1, 5, 1.0);
  CHECK_THROWS_AS(cal.add_score(1, 4, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(cal.add_score(1, 6, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(cal.add_score(3, 6, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(cal.buffer(0), std::invalid_argument);
  cal.add_score(2, 5, 7.0);
  CHECK(cal.windowed(6, 1) == std::vector<double>{1.0});
  CHECK(cal.windowed(6, 2) == std::vector<double>{7.0});
  CHECK(cal.windowed(6, 9) == std::vector<double>{7.0});  // beyond the last buffer
}

TEST_CASE("quantile is monotone in alpha and scale-equivariant") {
  const auto scores = fixtures::random_vector(150, 8, 0, 5);
  double prev = std::numeric_limits<double>::infinity();
  for (double alpha : {0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 0.9}) {
    const double q = conformal_quantile(with_scores(scores, alpha), 150);
    CHECK(q <= prev);
    prev = q;
    std::vector<double> scaled = scores;
    for (double& s : scaled) s *= 3.5;
    CHECK(conformal_quantile(with_scores(scaled, alpha), 150) == doctest::Approx(3.5 * q).epsilon(1e-15));
  }
}

TEST_CASE("uncertainty models") {
  const UncertaintyModel constant = fit_uncertainty(LagMatrix{}, UncertaintyMode::kConstant);
  CHECK(constant.mode() == UncertaintyMode::kConstant);
  CHECK(constant(std::vector<double>{}) == 1.0);
  CHECK(constant(std::vector<double>{4, 5}) == 1.0);

  LagMatrix r = make_lag_matrix(fixtures::random_vector(100, 1), 4);
  std::fill(r.targets.begin(), r.targets.end(), 3.0);
  const UncertaintyModel flat = fit_uncertainty(r, UncertaintyMode::kLearned);
  CHECK(flat.mode() == UncertaintyMode::kLearned);
  CHECK(flat.lags() == 4);
  CHECK(flat.learned()->params.mode == BoostingMode::kPlain);
  for (std::size_t i = 0; i < r.rows(); ++i) CHECK(flat(r.row(i)) == 3.0);

  LagMatrix tiny = make_lag_matrix(fixtures::random_vector(20, 2), 2);
  CHECK_THROWS_AS(fit_uncertainty(tiny, UncertaintyMode::kLearned), std::invalid_argument);

  // Near-zero residual targets: the output is still floored.
  LagMatrix small = make_lag_matrix(fixtures::random_vector(200, 3), 3);
  for (std::size_t i = 0; i < small.rows(); ++i) small.targets[i] = i % 2 ? 0.0 : 1e-9;
  GbdtParams p;
  p.iterations = 50;
  const UncertaintyModel u = fit_uncertainty(small, UncertaintyMode::kLearned, p);
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> d(-10, 10);
  for (int i = 0; i < 1000; ++i) CHECK(u(std::vector<double>{d(rng), d(rng), d(rng)}) >= kUncertaintyFloor);
}

TEST_CASE("interval arithmetic and clipping") {
  const ConformalCalibrator cal = with_scores({2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2}, 0.1);
  const std::vector<double> point{5, 1};
  const IntervalForecast iv = make_interval(point, std::vector<double>{}, cal, 20);
  CHECK(iv.lower == std::vector<double>{3, 0});
  CHECK(iv.upper == std::vector<double>{7, 3});
  CHECK(iv.point == point);
  CHECK(iv.quantile == std::vector<double>{2, 2});
  CHECK(iv.scale == std::vector<double>{1, 1});
  CHECK_FALSE(iv.unbounded);

  const IntervalForecast zero = make_interval(point, std::vector<double>{}, with_scores({0, 0, 0, 0, 0}, 0.5), 5);
  CHECK(zero.lower == point);
  CHECK(zero.upper == point);

  const IntervalForecast inf = make_interval(point, std::vector<double>{}, with_scores({1, 2}, 0.05), 2);
  CHECK(inf.unbounded);
  CHECK(std::isinf(inf.upper[0]));
  const auto j = nlohmann::json::parse(to_json(inf));
  CHECK(j.at("unbounded_flag") == true);
  CHECK(j.at("upper")[0].is_null());
  CHECK(j.at("alpha") == 0.05);
}

TEST_CASE("intervals bracket non-negative points with width 2 CQ U") {
  const auto scores = fixtures::random_vector(200, 6, 0, 3);
  const ConformalCalibrator cal = with_scores(scores, 0.1);
  const auto point = fixtures::random_vector(30, 7, 5, 20);
  const IntervalForecast iv = make_interval(point, std::vector<double>{}, cal, 200);
  for (std::size_t i = 0; i < point.size(); ++i) {
    CHECK(iv.lower[i] <= point[i]);
    CHECK(point[i] <= iv.upper[i]);
    CHECK(iv.lower[i] >= 0.0);
    CHECK(iv.upper[i] - point[i] == doctest::Approx(iv.quantile[i] * iv.scale[i]));
  }
}

TEST_CASE("exchangeable scores give marginal coverage") {
  // i.i.d. data, constant predictor: coverage of each next point by the
  // windowed quantile of past absolute residuals.
  std::vector<double> coverage;
  for (std::uint64_t seed = 0; seed < 11; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> e(0, 1);
    ConformalCalibrator cal(0.1, 500);
    std::size_t hits = 0;
    const std::size_t warm = 500, test = 500;
    for (std::size_t t = 0; t < warm + test; ++t) {
      const double y = e(rng);
      if (t >= warm) hits += std::abs(y) <= conformal_quantile(cal, t) ? 1 : 0;
      cal.add_score(1, t, conformal_score(y, 0.0, 1.0));
    }
    coverage.push_back(static_cast<double>(hits) / static_cast<double>(test));
  }
  CHECK(median(coverage) >= 0.9 - 0.02);
}

TEST_CASE("residual collection and per-step calibration") {
  const auto values = fixtures::ar1(460, 3);
  const auto ts = fixtures::make_series({values.begin(), values.begin() + 400});
  WaveCatBoostConfig cfg;
  cfg.lags = 24;
  cfg.gbdt.iterations = 30;
  cfg.gbdt.depth = 3;
  cfg.gbdt.learning_rate = 0.1;
  const WaveCatBoostModel m = fit_wavecatboost(ts, cfg);
  const std::vector<double> actuals(values.begin() + 400, values.end());

  const ResidualCollection rc = collect_residuals(m, actuals, 3, 5);
  // 60 origins, each scoring min(3, remaining) steps.
  CHECK(rc.records.size() == 60 * 3 - 3);
  CHECK(rc.model.issued_at() == 460);
  for (const auto& r : rc.records) {
    CHECK(r.step >= 1);
    CHECK(r.step <= 3);
    CHECK(r.target >= 400);
    CHECK(r.target < 460);
    CHECK(r.lags.size() == 5);
    CHECK(r.abs_residual >= 0.0);
  }
  // Step-1 residual at origin 400 against a direct forecast.
  CHECK(rc.records[0].abs_residual == doctest::Approx(std::abs(actuals[0] - forecast(m, 1).point[0])));
  CHECK(rc.records[0].lags.back() == doctest::Approx(values[399]).epsilon(1e-12));

  const ConformalCalibrator cal = build_calibrator(rc.records, 0.1, 200, 3);
  CHECK(cal.steps() == 3);
  CHECK(cal.buffer(1).size() == 60);
  CHECK(cal.buffer(3).size() == 58);

  const IntervalForecast iv = predict_interval(rc.model, cal, 5);
  CHECK(iv.point.size() == 5);
  CHECK(iv.quantile[3] == iv.quantile[2]);  // steps past the last buffer share it

  const LagMatrix rm = residual_matrix(rc.records);
  CHECK(rm.rows() == rc.records.size());
  CHECK(rm.lags == 5);
  CHECK_THROWS_AS(collect_residuals(m, actuals, 0, 0), std::invalid_argument);
}

TEST_CASE("one-step intervals cover an AR(1) series") {
  std::vector<double> coverage;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto values = fixtures::ar1(1000, 100 + seed);
    const auto ts = fixtures::make_series({values.begin(), values.begin() + 300});
    WaveCatBoostConfig cfg;
    cfg.lags = 12;
    cfg.gbdt.iterations = 40;
    cfg.gbdt.depth = 3;
    cfg.gbdt.learning_rate = 0.1;
    cfg.gbdt.seed = seed;
    WaveCatBoostModel m = fit_wavecatboost(ts, cfg);
    const std::vector<double> calib(values.begin() + 300, values.begin() + 500);
    ResidualCollection rc = collect_residuals(m, calib, 1, 0);
    ConformalCalibrator cal = build_calibrator(rc.records, 0.05, 200, 1);
    m = rc.model;
    std::size_t hits = 0;
    for (std::size_t t = 500; t < 1000; ++t) {
      const IntervalForecast iv = predict_interval(m, cal, 1);
      const double y = values[t];
      hits += (y >= iv.lower[0] && y <= iv.upper[0]) ? 1 : 0;
      cal.add_score(1, t, conformal_score(y, iv.point[0], 1.0));
      m = update_history(m, y);
    }
    coverage.push_back(static_cast<double>(hits) / 500.0);
  }
  MESSAGE("median coverage " << median(coverage));
  CHECK(median(coverage) >= 0.93);
  CHECK(median(coverage) <= 0.99);
}

TEST_CASE("calibrator snapshots") {
  ConformalCalibrator cal(0.1, 50, 2);
  for (std::size_t t = 0; t < 80; ++t) {
    cal.add_score(1, t, 0.1 * static_cast<double>(t % 7));
    cal.add_score(2, t, 0.2 * static_cast<double>(t % 5));
  }
  const std::string text = to_json(cal);
  const ConformalCalibrator back = calibrator_from_json(text);
  CHECK(to_json(back) == text);
  CHECK(conformal_quantile(back, 80, 2) == conformal_quantile(cal, 80, 2));

  const ConformalCalibrator wide = with_alpha(cal, 0.01);
  CHECK(wide.alpha() == 0.01);
  CHECK(wide.windowed(80, 1) == cal.windowed(80, 1));
  CHECK(conformal_quantile(wide, 80, 1) >= conformal_quantile(cal, 80, 1));

  LagMatrix r = make_lag_matrix(fixtures::random_vector(100, 1, 0, 1), 3);
  GbdtParams p;
  p.iterations = 10;
  ConformalCalibrator learned(0.2, 10, 1, fit_uncertainty(r, UncertaintyMode::kLearned, p));
  learned.add_score(1, 0, 1.0);
  const ConformalCalibrator lb = calibrator_from_json(to_json(learned));
  CHECK(lb.uncertainty().mode() == UncertaintyMode::kLearned);
  CHECK(lb.uncertainty()(r.row(3)) == learned.uncertainty()(r.row(3)));
  CHECK_THROWS(calibrator_from_json("{\"version\":1,\"kind\":\"wavecatboost\"}"));
}

TEST_CASE("uncertainty mode names") {
  CHECK(uncertainty_mode_from_string("learned") == UncertaintyMode::kLearned);
  CHECK(std::string(to_string(UncertaintyMode::kConstant)) == "constant");
  CHECK_THROWS_AS(uncertainty_mode_from_string("other"), std::invalid_argument);
}
