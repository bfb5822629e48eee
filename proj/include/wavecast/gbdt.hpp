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

// Gradient boosting over oblivious (symmetric) regression trees with ordered
// boosting: each example's gradient comes from a supporting model that has
// only seen examples preceding it in a random permutation, which removes the
// prediction shift plain boosting suffers from when it reuses targets.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wavecast {

/// Row-major design matrix of lagged values. Row i holds the `lags` values
/// preceding targets[i], oldest first.
struct LagMatrix {
  std::size_t lags = 0;
  std::vector<double> features;
  std::vector<double> targets;
  std::vector<std::size_t> time_index;

  std::size_t rows() const noexcept { return targets.size(); }
  std::span<const double> row(std::size_t i) const { return {features.data() + i * lags, lags}; }
  double at(std::size_t i, std::size_t f) const { return features[i * lags + f]; }
};

/// Sliding windows of length p over `series`. Throws when p == 0 or p >= N.
LagMatrix make_lag_matrix(std::span<const double> series, std::size_t p);

/// Squared-error loss L(y, a) = (y - a)^2 / 2 and its derivative in a.
double squared_loss(double y, double a);
double gradient(double y, double a);

struct Split {
  std::uint32_t feature = 0;
  double threshold = 0.0;  // goes right when x[feature] > threshold
};

/// Every level shares one split. The first split is the most significant bit
/// of the leaf index.
struct ObliviousTree {
  std::vector<Split> splits;
  std::vector<double> leaf_values;  // 2^depth entries

  std::size_t depth() const noexcept { return splits.size(); }
  std::size_t leaf_index(std::span<const double> x) const;
  double value(std::span<const double> x) const { return leaf_values[leaf_index(x)]; }
};

enum class BoostingMode { kOrdered, kPlain };

const char* to_string(BoostingMode mode);
BoostingMode boosting_mode_from_string(const std::string& name);

struct GbdtParams {
  std::size_t iterations = 500;
  std::size_t depth = 6;
  double learning_rate = 0.05;
  std::size_t permutations = 3;
  std::uint64_t seed = 0;
  BoostingMode mode = BoostingMode::kOrdered;
  std::size_t bins = 32;
  double l2_reg = 3.0;

  void validate() const;
};

struct OrderedGbdtModel {
  std::vector<ObliviousTree> trees;
  double base_prediction = 0.0;
  std::size_t lags = 0;
  GbdtParams params;
  std::vector<double> training_log;
  std::vector<std::string> warnings;

  double learning_rate() const noexcept { return params.learning_rate; }
  /// base + eta * sum of tree outputs, accumulated tree by tree.
  double predict(std::span<const double> x) const;
};

/// Hooks into fit() for auditing which examples fed which statistic.
/// Positions are indices into the permutation chosen for the iteration.
class FitObserver {
 public:
  virtual ~FitObserver() = default;
  /// The gradient of the example at `position` was evaluated with a
  /// supporting model fitted on positions [0, prefix).
  virtual void on_gradient(std::size_t /*iteration*/, std::size_t /*perm*/, std::size_t /*position*/,
                           std::size_t /*prefix*/) {}
  /// Split scoring estimated the leaf value seen by `position` from the
  /// gradients of positions [0, body).
  virtual void on_leaf_estimate(std::size_t /*iteration*/, std::size_t /*perm*/, std::size_t /*position*/,
                                std::size_t /*body*/) {}
  /// Called once the tree of `iteration` is final. `order` maps position to
  /// row and `gradients` is indexed by position.
  virtual void on_tree(std::size_t /*iteration*/, std::size_t /*perm*/, std::span<const std::size_t> /*order*/,
                       std::span<const double> /*gradients*/, const ObliviousTree& /*tree*/) {}
};

/// Candidate thresholds for one feature: every midpoint between consecutive
/// distinct values when there are at most `max_bins` of them, otherwise
/// midpoints at `max_bins` evenly spaced quantiles.
std::vector<double> feature_borders(std::span<const double> column, std::size_t max_bins);

/// Mean computed as y0 + mean(y - y0), exact for constant input.
double stable_mean(std::span<const double> values);

OrderedGbdtModel fit(const LagMatrix& data, const GbdtParams& params, FitObserver* observer = nullptr);

/// Versioned JSON snapshot. Doubles round-trip bit-exactly.
std::string to_json(const OrderedGbdtModel& model);
OrderedGbdtModel gbdt_from_json(const std::string& text);

}  // namespace wavecast
