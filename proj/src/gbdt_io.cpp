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

#include <stdexcept>

#include "wavecast/json_io.hpp"

namespace wavecast {

void to_json(Json& j, const GbdtParams& p) {
  j = Json{{"iterations", p.iterations},       {"depth", p.depth},       {"learning_rate", p.learning_rate},
           {"permutations", p.permutations},   {"seed", p.seed},         {"mode", to_string(p.mode)},
           {"bins", p.bins},                   {"l2_reg", p.l2_reg}};
}

void from_json(const Json& j, GbdtParams& p) {
  j.at("iterations").get_to(p.iterations);
  j.at("depth").get_to(p.depth);
  j.at("learning_rate").get_to(p.learning_rate);
  j.at("permutations").get_to(p.permutations);
  j.at("seed").get_to(p.seed);
  p.mode = boosting_mode_from_string(j.at("mode").get<std::string>());
  j.at("bins").get_to(p.bins);
  j.at("l2_reg").get_to(p.l2_reg);
}

void to_json(Json& j, const ObliviousTree& t) {
  Json features = Json::array();
  Json thresholds = Json::array();
  for (const auto& s : t.splits) {
    features.push_back(s.feature);
    thresholds.push_back(s.threshold);
  }
  j = Json{{"features", features}, {"thresholds", thresholds}, {"leaves", t.leaf_values}};
}

void from_json(const Json& j, ObliviousTree& t) {
  const auto features = j.at("features").get<std::vector<std::uint32_t>>();
  const auto thresholds = j.at("thresholds").get<std::vector<double>>();
  if (features.size() != thresholds.size()) throw std::invalid_argument("tree split arrays differ in length");
  t.splits.clear();
  for (std::size_t i = 0; i < features.size(); ++i) t.splits.push_back(Split{features[i], thresholds[i]});
  j.at("leaves").get_to(t.leaf_values);
  if (t.leaf_values.size() != (std::size_t{1} << t.splits.size())) {
    throw std::invalid_argument("tree leaf count does not match depth");
  }
}

void to_json(Json& j, const OrderedGbdtModel& m) {
  j = Json{{"version", kSnapshotVersion},
           {"kind", "ordered_gbdt"},
           {"params", m.params},
           {"lags", m.lags},
           {"base_prediction", m.base_prediction},
           {"training_log", m.training_log},
           {"warnings", m.warnings},
           {"trees", m.trees}};
}

void from_json(const Json& j, OrderedGbdtModel& m) {
  j.at("params").get_to(m.params);
  j.at("lags").get_to(m.lags);
  j.at("base_prediction").get_to(m.base_prediction);
  j.at("training_log").get_to(m.training_log);
  j.at("warnings").get_to(m.warnings);
  j.at("trees").get_to(m.trees);
  for (const auto& t : m.trees) {
    for (const auto& s : t.splits) {
      if (s.feature >= m.lags) throw std::invalid_argument("split feature index out of range");
    }
  }
}

void to_json(Json& j, const NormParams& p) {
  j = Json{{"min", p.min}, {"max", p.max}, {"degenerate", p.degenerate}};
}

void from_json(const Json& j, NormParams& p) {
  j.at("min").get_to(p.min);
  j.at("max").get_to(p.max);
  j.at("degenerate").get_to(p.degenerate);
}

void to_json(Json& j, const FilterPair& f) { j = Json{{"wavelet", f.wavelet}, {"scaling", f.scaling}}; }

void from_json(const Json& j, FilterPair& f) {
  j.at("wavelet").get_to(f.wavelet);
  j.at("scaling").get_to(f.scaling);
}

Json parse_versioned(const std::string& text, const char* what) {
  Json j = Json::parse(text);
  const int version = j.at("version").get<int>();
  if (version != kSnapshotVersion) {
    throw std::invalid_argument(std::string(what) + " snapshot version " + std::to_string(version) +
                                " is not supported");
  }
  return j;
}

std::string to_json(const OrderedGbdtModel& model) { return Json(model).dump(); }

OrderedGbdtModel gbdt_from_json(const std::string& text) {
  return parse_versioned(text, "gbdt").get<OrderedGbdtModel>();
}

}  // namespace wavecast
