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

// Maximal-overlap discrete wavelet transform (pyramid algorithm, periodic
// boundary), its inverse, and the additive multiresolution analysis.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace wavecast {

/// MODWT-scaled analysis filters. Taps are indexed m = 0..M-1.
struct FilterPair {
  std::vector<double> wavelet;
  std::vector<double> scaling;

  std::size_t length() const noexcept { return wavelet.size(); }
};

/// Haar pair rescaled by 1/sqrt(2): wavelet (1/2, -1/2), scaling (1/2, 1/2).
FilterPair haar_filters();

/// True when the pair satisfies the MODWT conditions: equal even length,
/// scaling taps summing to 1, wavelet taps summing to 0, and vanishing
/// even-shift autocorrelation (the orthonormal conditions rescaled by 1/2).
bool is_valid_filter(const FilterPair& filter, double tol = 1e-12);

/// floor(ln n), clamped to [1, floor(log2 n)]. Requires n >= 4.
std::size_t decomposition_levels(std::size_t n);
/// floor(log2 n): the deepest level whose upsampled Haar filter fits in n.
std::size_t max_levels(std::size_t n);

struct WaveletCoefficients {
  std::size_t levels = 0;
  std::vector<std::vector<double>> wavelet;  // W_1..W_K
  std::vector<double> scaling;               // V_K
  FilterPair filter;

  std::size_t length() const noexcept { return scaling.size(); }
};

struct WaveletDecomposition {
  std::size_t levels = 0;
  std::vector<std::vector<double>> details;  // D_1..D_K
  std::vector<double> smooth;                // S_K

  std::size_t length() const noexcept { return smooth.size(); }
  /// Sum of all components at index t.
  double reconstruct(std::size_t t) const;
  std::vector<double> reconstruct() const;
  /// Columns in order D_1..D_K, S_K.
  std::vector<std::span<const double>> components() const;
};

WaveletCoefficients modwt(std::span<const double> series, std::size_t levels, const FilterPair& filter = haar_filters());
WaveletDecomposition mra(const WaveletCoefficients& coeffs);
std::vector<double> imodwt(const WaveletCoefficients& coeffs);

/// Convenience: modwt followed by mra.
WaveletDecomposition decompose(std::span<const double> series, std::size_t levels,
                               const FilterPair& filter = haar_filters());

/// True for the MODWT Haar pair. For it V_{j-1,t} = W_{j,t} + V_{j,t}, so
/// W_1 + ... + W_K + V_K reproduces the series and every coefficient depends
/// only on present and past samples (apart from the wrap at the start).
bool is_haar(const FilterPair& filter);

/// Columnar CSV: t, D1..DK, SK.
void write_decomposition_csv(std::ostream& out, const WaveletDecomposition& dec);

}  // namespace wavecast
