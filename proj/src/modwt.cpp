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

#include "wavecast/modwt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace wavecast {
namespace {

// One analysis step of the pyramid: filters v_{j-1} with taps spaced 2^{j-1}
// apart, circularly. out[t] = sum_m taps[m] * v[(t - stride*m) mod n].
void analysis_step(std::span<const double> v, const std::vector<double>& taps, std::size_t stride,
                   std::vector<double>& out) {
  const std::size_t n = v.size();
  out.assign(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double acc = 0.0;
    std::size_t idx = t;
    const std::size_t step = stride % n;
    for (double tap : taps) {
      acc += tap * v[idx];
      idx = idx >= step ? idx - step : idx + n - step;
    }
    out[t] = acc;
  }
}

// Adjoint of analysis_step: out[t] += sum_m taps[m] * w[(t + stride*m) mod n].
void synthesis_accumulate(std::span<const double> w, const std::vector<double>& taps, std::size_t stride,
                          std::vector<double>& out) {
  const std::size_t n = w.size();
  const std::size_t step = stride % n;
  for (std::size_t t = 0; t < n; ++t) {
    double acc = 0.0;
    std::size_t idx = t;
    for (double tap : taps) {
      acc += tap * w[idx];
      idx += step;
      if (idx >= n) idx -= n;
    }
    out[t] += acc;
  }
}

std::size_t stride_for(std::size_t level) { return std::size_t{1} << (level - 1); }

void check_levels(std::size_t n, std::size_t levels) {
  if (n < 2) throw std::invalid_argument("MODWT needs at least 2 samples");
  if (levels < 1 || levels > max_levels(n)) {
    throw std::invalid_argument("decomposition level " + std::to_string(levels) + " outside [1, " +
                                std::to_string(max_levels(n)) + "]");
  }
}

// Runs the inverse pyramid from `level` down to 1 with the given wavelet and
// scaling inputs at that level and zero wavelet input below it.
std::vector<double> synthesize_from(std::size_t level, std::span<const double> wavelet_in,
                                    std::span<const double> scaling_in, const FilterPair& filter) {
  const std::size_t n = scaling_in.empty() ? wavelet_in.size() : scaling_in.size();
  std::vector<double> current(n, 0.0);
  if (!wavelet_in.empty()) synthesis_accumulate(wavelet_in, filter.wavelet, stride_for(level), current);
  if (!scaling_in.empty()) synthesis_accumulate(scaling_in, filter.scaling, stride_for(level), current);
  std::vector<double> next;
  for (std::size_t j = level - 1; j >= 1; --j) {
    next.assign(n, 0.0);
    synthesis_accumulate(current, filter.scaling, stride_for(j), next);
    current.swap(next);
  }
  return current;
}

}  // namespace

FilterPair haar_filters() { return FilterPair{{0.5, -0.5}, {0.5, 0.5}}; }

bool is_valid_filter(const FilterPair& f, double tol) {
  const std::size_t m = f.length();
  if (m == 0 || m % 2 != 0 || f.scaling.size() != m) return false;
  double sw = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sw += f.wavelet[i];
    ss += f.scaling[i];
  }
  if (std::abs(sw) > tol || std::abs(ss - 1.0) > tol) return false;
  for (std::size_t shift = 2; shift < m; shift += 2) {
    double aw = 0.0, as = 0.0;
    for (std::size_t i = 0; i + shift < m; ++i) {
      aw += f.wavelet[i] * f.wavelet[i + shift];
      as += f.scaling[i] * f.scaling[i + shift];
    }
    if (std::abs(aw) > tol || std::abs(as) > tol) return false;
  }
  return true;
}

bool is_haar(const FilterPair& f) {
  const FilterPair h = haar_filters();
  return f.wavelet == h.wavelet && f.scaling == h.scaling;
}

std::size_t max_levels(std::size_t n) {
  std::size_t k = 0;
  while ((std::size_t{2} << k) <= n) ++k;
  return k;
}

std::size_t decomposition_levels(std::size_t n) {
  if (n < 4) throw std::invalid_argument("decomposition_levels requires n >= 4");
  const auto k = static_cast<std::size_t>(std::floor(std::log(static_cast<double>(n))));
  return std::clamp<std::size_t>(k, 1, max_levels(n));
}

WaveletCoefficients modwt(std::span<const double> series, std::size_t levels, const FilterPair& filter) {
  check_levels(series.size(), levels);
  if (filter.wavelet.size() != filter.scaling.size()) throw std::invalid_argument("filter lengths differ");

  WaveletCoefficients c;
  c.levels = levels;
  c.filter = filter;
  c.wavelet.resize(levels);
  std::vector<double> v(series.begin(), series.end());
  std::vector<double> next;
  for (std::size_t j = 1; j <= levels; ++j) {
    analysis_step(v, filter.wavelet, stride_for(j), c.wavelet[j - 1]);
    analysis_step(v, filter.scaling, stride_for(j), next);
    v.swap(next);
  }
  c.scaling = std::move(v);
  return c;
}

std::vector<double> imodwt(const WaveletCoefficients& c) {
  const std::size_t n = c.length();
  std::vector<double> v = c.scaling;
  std::vector<double> prev;
  for (std::size_t j = c.levels; j >= 1; --j) {
    prev.assign(n, 0.0);
    synthesis_accumulate(c.wavelet[j - 1], c.filter.wavelet, stride_for(j), prev);
    synthesis_accumulate(v, c.filter.scaling, stride_for(j), prev);
    v.swap(prev);
  }
  return v;
}

WaveletDecomposition mra(const WaveletCoefficients& c) {
  if (c.levels == 0 || c.wavelet.size() != c.levels) throw std::invalid_argument("malformed wavelet coefficients");
  for (const auto& w : c.wavelet) {
    if (w.size() != c.length()) throw std::invalid_argument("coefficient series lengths differ");
  }
  WaveletDecomposition d;
  d.levels = c.levels;
  d.details.reserve(c.levels);
  for (std::size_t j = 1; j <= c.levels; ++j) {
    d.details.push_back(synthesize_from(j, c.wavelet[j - 1], {}, c.filter));
  }
  d.smooth = synthesize_from(c.levels, {}, c.scaling, c.filter);
  return d;
}

WaveletDecomposition decompose(std::span<const double> series, std::size_t levels, const FilterPair& filter) {
  return mra(modwt(series, levels, filter));
}

double WaveletDecomposition::reconstruct(std::size_t t) const {
  double acc = 0.0;
  for (const auto& d : details) acc += d[t];
  return acc + smooth[t];
}

std::vector<double> WaveletDecomposition::reconstruct() const {
  std::vector<double> out(length());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = reconstruct(t);
  return out;
}

std::vector<std::span<const double>> WaveletDecomposition::components() const {
  std::vector<std::span<const double>> out;
  for (const auto& d : details) out.emplace_back(d);
  out.emplace_back(smooth);
  return out;
}

void write_decomposition_csv(std::ostream& out, const WaveletDecomposition& dec) {
  out << "t";
  for (std::size_t k = 1; k <= dec.levels; ++k) out << ",D" << k;
  out << ",S" << dec.levels << '\n';
  char buf[32];
  for (std::size_t t = 0; t < dec.length(); ++t) {
    out << t;
    for (const auto& col : dec.components()) {
      std::snprintf(buf, sizeof buf, "%.17g", col[t]);
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace wavecast
