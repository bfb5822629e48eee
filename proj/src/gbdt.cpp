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

#include "wavecast/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace wavecast {
namespace {

// Position p >= 1 belongs to segment floor(log2 p) + 1, whose body is the
// prefix [0, 2^floor(log2 p)). Position 0 is segment 0 with an empty body.
std::size_t segment_of(std::size_t position) {
  if (position == 0) return 0;
  std::size_t s = 0;
  while ((position >> s) > 1) ++s;
  return s + 1;
}

std::size_t segment_body(std::size_t segment) { return segment == 0 ? 0 : std::size_t{1} << (segment - 1); }

std::size_t segment_end(std::size_t segment, std::size_t n) {
  return segment == 0 ? std::min<std::size_t>(1, n) : std::min(n, std::size_t{2} << (segment - 1));
}

// Fisher-Yates with an explicit index draw so results do not depend on the
// standard library's distribution implementations.
std::vector<std::size_t> shuffled(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

struct Quantized {
  std::size_t rows = 0;
  std::size_t features = 0;
  std::vector<std::vector<double>> borders;
  std::vector<std::uint8_t> bins;  // column-major: bins[f * rows + i]

  std::uint8_t bin(std::size_t f, std::size_t i) const { return bins[f * rows + i]; }
};

Quantized quantize(const LagMatrix& data, std::size_t max_bins) {
  Quantized q;
  q.rows = data.rows();
  q.features = data.lags;
  q.borders.resize(q.features);
  q.bins.resize(q.rows * q.features);
  std::vector<double> column(q.rows);
  for (std::size_t f = 0; f < q.features; ++f) {
    for (std::size_t i = 0; i < q.rows; ++i) column[i] = data.at(i, f);
    q.borders[f] = feature_borders(column, max_bins);
    const auto& b = q.borders[f];
    for (std::size_t i = 0; i < q.rows; ++i) {
      q.bins[f * q.rows + i] = static_cast<std::uint8_t>(std::lower_bound(b.begin(), b.end(), column[i]) - b.begin());
    }
  }
  return q;
}

struct Candidate {
  double score = std::numeric_limits<double>::infinity();
  std::size_t feature = 0;
  std::size_t border = 0;
};

// Greedy level-wise search for one oblivious tree. `order[pos]` is the row
// at position pos; `grad[pos]` its gradient. A candidate is scored by
//   sum_i (g_i - est_i)^2 - sum_i g_i^2 = sum_i est_i (est_i - 2 g_i),
// where est_i = G / (n + l2) over the examples it may see: in ordered mode
// the body of its segment within the same child leaf, in plain mode every
// example of that child leaf.
class TreeBuilder {
 public:
  TreeBuilder(const Quantized& q, std::size_t max_bins, double l2, bool ordered)
      : q_(q), stride_(max_bins + 1), ordered_(ordered), inverse_(q.rows + 1, 0.0) {
    for (std::size_t c = 1; c <= q.rows; ++c) inverse_[c] = 1.0 / (static_cast<double>(c) + l2);
  }

  std::vector<std::pair<std::size_t, std::size_t>> build(std::span<const std::size_t> order,
                                                         std::span<const double> grad, std::size_t depth) {
    const std::size_t n = order.size();
    const std::size_t segments = ordered_ ? segment_of(n - 1) + 1 : 1;
    std::vector<std::size_t> seg(n, 0);
    if (ordered_) {
      for (std::size_t pos = 0; pos < n; ++pos) seg[pos] = segment_of(pos);
    }
    // Bins in position order, so the per-level passes read contiguously.
    pos_bins_.resize(q_.features * n);
    for (std::size_t f = 0; f < q_.features; ++f) {
      for (std::size_t pos = 0; pos < n; ++pos) pos_bins_[f * n + pos] = q_.bin(f, order[pos]);
    }
    std::vector<std::uint32_t> leaf(n, 0);
    std::vector<std::size_t> slot(n);
    std::vector<std::pair<std::size_t, std::size_t>> chosen;

    for (std::size_t level = 0; level < depth; ++level) {
      const std::size_t leaves = std::size_t{1} << level;
      for (std::size_t pos = 0; pos < n; ++pos) slot[pos] = (seg[pos] * leaves + leaf[pos]) * stride_;
      Candidate best;
      for (std::size_t f = 0; f < q_.features; ++f) {
        const std::size_t nb = q_.borders[f].size();
        if (nb == 0) continue;
        hist_g_.assign(segments * leaves * stride_, 0.0);
        hist_n_.assign(segments * leaves * stride_, 0.0);
        const std::uint8_t* bins = &pos_bins_[f * n];
        for (std::size_t pos = 0; pos < n; ++pos) {
          const std::size_t cell = slot[pos] + bins[pos];
          hist_g_[cell] += grad[pos];
          hist_n_[cell] += 1.0;
        }
        score_feature(segments, leaves, nb);
        for (std::size_t k = 0; k < nb; ++k) {
          if (scores_[k] < best.score) best = Candidate{scores_[k], f, k};
        }
      }
      if (!std::isfinite(best.score)) break;
      chosen.emplace_back(best.feature, best.border);
      const std::uint8_t* bins = &pos_bins_[best.feature * n];
      for (std::size_t pos = 0; pos < n; ++pos) {
        leaf[pos] = (leaf[pos] << 1) | (bins[pos] > best.border ? 1u : 0u);
      }
    }
    return chosen;
  }

 private:
  void score_feature(std::size_t segments, std::size_t leaves, std::size_t nb) {
    scores_.assign(nb, 0.0);
    for (auto* v : {&left_g_, &left_n_, &body_lg_, &body_ln_, &body_rg_, &body_rn_}) v->resize(nb);
    double* score = scores_.data();
    double* lg = left_g_.data();
    double* ln = left_n_.data();
    double* blg = body_lg_.data();
    double* bln = body_ln_.data();
    double* brg = body_rg_.data();
    double* brn = body_rn_.data();

    for (std::size_t lf = 0; lf < leaves; ++lf) {
      std::fill_n(blg, nb, 0.0);
      std::fill_n(bln, nb, 0.0);
      std::fill_n(brg, nb, 0.0);
      std::fill_n(brn, nb, 0.0);
      for (std::size_t s = 0; s < segments; ++s) {
        const double* hg = &hist_g_[(s * leaves + lf) * stride_];
        const double* hn = &hist_n_[(s * leaves + lf) * stride_];
        double cg = 0.0, cn = 0.0;
        for (std::size_t k = 0; k < nb; ++k) {
          cg += hg[k];
          cn += hn[k];
          lg[k] = cg;
          ln[k] = cn;
        }
        const double tg = cg + hg[nb];
        const double tn = cn + hn[nb];
        // An empty tail neither scores nor feeds later bodies.
        if (tn == 0.0) continue;
        if (ordered_) {
          for (std::size_t k = 0; k < nb; ++k) {
            const double rg = tg - lg[k];
            const double rn = tn - ln[k];
            const double el = blg[k] * inv(bln[k]);
            const double er = brg[k] * inv(brn[k]);
            score[k] += el * (el * ln[k] - 2.0 * lg[k]) + er * (er * rn - 2.0 * rg);
            blg[k] += lg[k];
            bln[k] += ln[k];
            brg[k] += rg;
            brn[k] += rn;
          }
        } else {
          for (std::size_t k = 0; k < nb; ++k) {
            const double rg = tg - lg[k];
            const double rn = tn - ln[k];
            const double el = lg[k] * inv(ln[k]);
            const double er = rg * inv(rn);
            score[k] += el * (el * ln[k] - 2.0 * lg[k]) + er * (er * rn - 2.0 * rg);
          }
        }
      }
    }
  }

  // 1 / (count + l2), and 0 for an empty set.
  double inv(double count) const { return inverse_[static_cast<std::size_t>(count)]; }

  const Quantized& q_;
  std::size_t stride_;
  bool ordered_;
  std::vector<std::uint8_t> pos_bins_;
  std::vector<double> hist_g_, hist_n_;
  std::vector<double> scores_;
  std::vector<double> left_g_, left_n_, body_lg_, body_ln_, body_rg_, body_rn_;
  std::vector<double> inverse_;
};

std::size_t leaf_of_row(const Quantized& q, std::span<const std::pair<std::size_t, std::size_t>> splits,
                        std::size_t row) {
  std::size_t leaf = 0;
  for (const auto& [f, k] : splits) leaf = (leaf << 1) | (q.bin(f, row) > k ? 1u : 0u);
  return leaf;
}

// Supporting predictions for one structure permutation: for every segment
// s >= 1, the model fitted on positions [0, body(s)) evaluated on positions
// [0, end(s)).
struct SupportSet {
  std::vector<std::size_t> order;
  std::vector<std::vector<double>> approx;  // approx[s][pos]
};

}  // namespace

LagMatrix make_lag_matrix(std::span<const double> series, std::size_t p) {
  if (p == 0) throw std::invalid_argument("lag count must be at least 1");
  if (p >= series.size()) {
    throw std::invalid_argument("lag count " + std::to_string(p) + " must be smaller than series length " +
                                std::to_string(series.size()));
  }
  LagMatrix m;
  m.lags = p;
  const std::size_t rows = series.size() - p;
  m.features.reserve(rows * p);
  m.targets.reserve(rows);
  m.time_index.reserve(rows);
  for (std::size_t t = p; t < series.size(); ++t) {
    m.features.insert(m.features.end(), series.begin() + static_cast<std::ptrdiff_t>(t - p),
                      series.begin() + static_cast<std::ptrdiff_t>(t));
    m.targets.push_back(series[t]);
    m.time_index.push_back(t);
  }
  return m;
}

double squared_loss(double y, double a) { return 0.5 * (y - a) * (y - a); }

double gradient(double y, double a) {
  if (!std::isfinite(y) || !std::isfinite(a)) throw std::invalid_argument("gradient of non-finite input");
  return a - y;
}

std::size_t ObliviousTree::leaf_index(std::span<const double> x) const {
  std::size_t leaf = 0;
  for (const Split& s : splits) leaf = (leaf << 1) | (x[s.feature] > s.threshold ? 1u : 0u);
  return leaf;
}

const char* to_string(BoostingMode mode) { return mode == BoostingMode::kOrdered ? "ordered" : "plain"; }

BoostingMode boosting_mode_from_string(const std::string& name) {
  if (name == "ordered") return BoostingMode::kOrdered;
  if (name == "plain") return BoostingMode::kPlain;
  throw std::invalid_argument("unknown boosting mode: " + name);
}

void GbdtParams::validate() const {
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw std::invalid_argument("learning rate must be in (0, 1]");
  if (permutations < 1) throw std::invalid_argument("permutation count must be >= 1");
  if (bins < 1 || bins > 255) throw std::invalid_argument("bin count must be in [1, 255]");
  if (!(l2_reg >= 0.0)) throw std::invalid_argument("l2 regularisation must be non-negative");
  if (depth > 16) throw std::invalid_argument("tree depth must be <= 16");
}

double OrderedGbdtModel::predict(std::span<const double> x) const {
  if (x.size() != lags) {
    throw std::invalid_argument("expected " + std::to_string(lags) + " features, got " + std::to_string(x.size()));
  }
  double acc = base_prediction;
  for (const auto& tree : trees) acc += params.learning_rate * tree.value(x);
  return acc;
}

double stable_mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double pivot = values.front();
  double acc = 0.0;
  for (double v : values) acc += v - pivot;
  return pivot + acc / static_cast<double>(values.size());
}

std::vector<double> feature_borders(std::span<const double> column, std::size_t max_bins) {
  std::vector<double> sorted(column.begin(), column.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct = sorted;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<double> borders;
  if (distinct.size() <= 1) return borders;
  if (distinct.size() - 1 <= max_bins) {
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i) borders.push_back(0.5 * (distinct[i] + distinct[i + 1]));
    return borders;
  }
  const std::size_t n = sorted.size();
  for (std::size_t k = 1; k <= max_bins; ++k) {
    const double v = sorted[k * n / (max_bins + 1)];
    const auto j = static_cast<std::size_t>(std::lower_bound(distinct.begin(), distinct.end(), v) - distinct.begin());
    if (j == 0) continue;
    const double border = 0.5 * (distinct[j - 1] + distinct[j]);
    if (borders.empty() || borders.back() < border) borders.push_back(border);
  }
  return borders;
}

OrderedGbdtModel fit(const LagMatrix& data, const GbdtParams& params, FitObserver* observer) {
  params.validate();
  const std::size_t n = data.rows();
  if (n == 0) throw std::invalid_argument("cannot fit on an empty lag matrix");
  for (double y : data.targets) {
    if (!std::isfinite(y)) throw std::invalid_argument("non-finite training target");
  }

  OrderedGbdtModel model;
  model.lags = data.lags;
  model.params = params;
  std::size_t depth = params.depth;
  std::size_t max_depth = 0;
  while ((std::size_t{2} << max_depth) <= n) ++max_depth;
  if (depth > max_depth) {
    model.warnings.push_back("depth " + std::to_string(depth) + " exceeds log2(rows); clamped to " +
                             std::to_string(max_depth));
    depth = max_depth;
    model.params.depth = depth;
  }

  const Quantized q = quantize(data, params.bins);
  const bool ordered = params.mode == BoostingMode::kOrdered;
  const double l2 = params.l2_reg;
  const double eta = params.learning_rate;
  const auto& y = data.targets;

  model.base_prediction = stable_mean(y);
  std::vector<double> full(n, model.base_prediction);

  std::mt19937_64 rng(params.seed);
  std::vector<SupportSet> supports;
  std::vector<std::size_t> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  if (ordered) {
    const std::size_t segments = segment_of(n - 1) + 1;
    supports.resize(params.permutations);
    for (auto& set : supports) {
      set.order = shuffled(n, rng);
      set.approx.resize(segments);
      // Each supporting model starts from the mean of its own prefix.
      std::vector<double> prefix_targets;
      for (std::size_t s = 1; s < segments; ++s) {
        prefix_targets.clear();
        for (std::size_t pos = 0; pos < segment_body(s); ++pos) prefix_targets.push_back(y[set.order[pos]]);
        set.approx[s].assign(segment_end(s, n), stable_mean(prefix_targets));
      }
    }
  }

  TreeBuilder builder(q, params.bins, l2, ordered);
  std::vector<double> grad(n);
  std::vector<std::size_t> row_leaf(n);
  model.trees.reserve(params.iterations);
  model.training_log.reserve(params.iterations);

  for (std::size_t it = 0; it < params.iterations; ++it) {
    std::size_t perm = 0;
    std::span<const std::size_t> order = identity;
    if (ordered) {
      perm = static_cast<std::size_t>(rng() % supports.size());
      const SupportSet& set = supports[perm];
      order = set.order;
      for (std::size_t pos = 0; pos < n; ++pos) {
        const std::size_t s = segment_of(pos);
        const double a = s == 0 ? 0.0 : set.approx[s][pos];
        grad[pos] = a - y[order[pos]];
        if (observer) {
          observer->on_gradient(it, perm + 1, pos, segment_body(s));
          observer->on_leaf_estimate(it, perm + 1, pos, segment_body(s));
        }
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) grad[i] = full[i] - y[i];
    }

    const auto splits = builder.build(order, grad, depth);
    const std::size_t leaves = std::size_t{1} << splits.size();
    for (std::size_t i = 0; i < n; ++i) row_leaf[i] = leaf_of_row(q, splits, i);

    // Boost every supporting model with the new structure, each with leaf
    // values drawn from its own prefix.
    std::vector<double> g_sum(leaves), count(leaves), value(leaves);
    for (auto& set : supports) {
      for (std::size_t s = 1; s < set.approx.size(); ++s) {
        auto& approx = set.approx[s];
        const std::size_t body = segment_body(s);
        std::fill(g_sum.begin(), g_sum.end(), 0.0);
        std::fill(count.begin(), count.end(), 0.0);
        for (std::size_t pos = 0; pos < body; ++pos) {
          const std::size_t row = set.order[pos];
          g_sum[row_leaf[row]] += approx[pos] - y[row];
          count[row_leaf[row]] += 1.0;
        }
        for (std::size_t l = 0; l < leaves; ++l) value[l] = count[l] > 0.0 ? -g_sum[l] / (count[l] + l2) : 0.0;
        for (std::size_t pos = 0; pos < approx.size(); ++pos) approx[pos] += eta * value[row_leaf[set.order[pos]]];
      }
    }

    // Final leaf values: standard boosting step on the full model, which is
    // the prefix model over every example in temporal order.
    std::fill(g_sum.begin(), g_sum.end(), 0.0);
    std::fill(count.begin(), count.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      g_sum[row_leaf[i]] += full[i] - y[i];
      count[row_leaf[i]] += 1.0;
    }
    ObliviousTree tree;
    tree.leaf_values.resize(leaves);
    for (std::size_t l = 0; l < leaves; ++l) tree.leaf_values[l] = count[l] > 0.0 ? -g_sum[l] / (count[l] + l2) : 0.0;
    for (const auto& [f, k] : splits) tree.splits.push_back(Split{static_cast<std::uint32_t>(f), q.borders[f][k]});

    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      full[i] += eta * tree.leaf_values[row_leaf[i]];
      loss += squared_loss(y[i], full[i]);
    }
    model.training_log.push_back(loss / static_cast<double>(n));
    if (observer) observer->on_tree(it, ordered ? perm + 1 : 0, order, grad, tree);
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace wavecast
