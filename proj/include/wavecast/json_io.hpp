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

// nlohmann::json converters shared by the snapshot and report writers.

#include "json.hpp"
#include "wavecast/gbdt.hpp"
#include "wavecast/modwt.hpp"
#include "wavecast/series.hpp"

namespace wavecast {

using Json = nlohmann::ordered_json;

inline constexpr int kSnapshotVersion = 1;

void to_json(Json& j, const GbdtParams& p);
void from_json(const Json& j, GbdtParams& p);
void to_json(Json& j, const ObliviousTree& t);
void from_json(const Json& j, ObliviousTree& t);
void to_json(Json& j, const OrderedGbdtModel& m);
void from_json(const Json& j, OrderedGbdtModel& m);
void to_json(Json& j, const NormParams& p);
void from_json(const Json& j, NormParams& p);
void to_json(Json& j, const FilterPair& f);
void from_json(const Json& j, FilterPair& f);

/// Parses a document and checks its "version" field.
Json parse_versioned(const std::string& text, const char* what);

}  // namespace wavecast
