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

#include <span>
#include <string>

#include "wavecast/eval.hpp"

namespace wavecast {

/// Line chart of the recent history, the point forecast and its conformal
/// band. `actual` may be empty when the future is unknown.
std::string forecast_svg(const std::string& title, std::span<const double> history, std::span<const double> point,
                         std::span<const double> lower, std::span<const double> upper,
                         std::span<const double> actual = {});

/// Mean rank dots with interval bars and the best model's band shaded.
std::string mcb_svg(const McbResult& result, const std::string& title = "MCB");

}  // namespace wavecast
