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

#include "wavecast/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <type_traits>

#include "wavecast/error.hpp"
#include "wavecast/eval.hpp"
#include "wavecast/hash.hpp"

namespace wavecast {
namespace {

namespace pt = boost::property_tree;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"data", {"paths", "pollutants", "impute"}},
      {"model", {"lags", "levels", "domain"}},
      {"gbdt", {"iterations", "depth", "learning_rate", "permutations", "mode", "bins", "l2_reg"}},
      {"conformal", {"alpha", "window", "uncertainty", "calibration", "steps"}},
      {"eval", {"models", "horizons", "seasonality"}},
      {"run", {"seed", "out"}},
  };
  return keys;
}

// ptree's defaulted get() swallows conversion failures, so convert here.
template <typename T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
  const auto raw = tree.get_optional<std::string>(key);
  if (!raw) return fallback;
  if constexpr (std::is_same_v<T, std::string>) {
    return *raw;
  } else {
    const auto v = tree.get_optional<T>(key);
    if (!v || (std::is_unsigned_v<T> && raw->find('-') != std::string::npos)) {
      throw SchemaError("config key " + key + ": cannot parse '" + *raw + "'");
    }
    return *v;
  }
}

}  // namespace

void RunConfig::validate() const {
  model.gbdt.validate();
  if (model.lags < 1) throw std::invalid_argument("model.lags must be >= 1");
  if (!(conformal.alpha > 0.0 && conformal.alpha < 1.0)) throw std::invalid_argument("conformal.alpha must be in (0, 1)");
  if (conformal.window < 1 || conformal.steps < 1) throw std::invalid_argument("conformal window and steps must be >= 1");
  if (seasonality < 1) throw std::invalid_argument("eval.seasonality must be >= 1");
  for (const auto& h : horizons) horizon_from_label(h);
  for (const auto& m : models) model_spec_from_name(m, model);
}

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv;
  std::vector<std::string> paths;
  for (const auto& p : data_paths) paths.push_back(p.generic_string());
  kv["data.paths"] = join(paths);
  kv["data.pollutants"] = join(pollutants);
  kv["data.impute"] = impute == ImputePolicy::kLinear ? "linear" : "locf";
  kv["model.lags"] = std::to_string(model.lags);
  kv["model.levels"] = std::to_string(model.levels.value_or(0));
  kv["model.domain"] = to_string(model.domain);
  kv["gbdt.iterations"] = std::to_string(model.gbdt.iterations);
  kv["gbdt.depth"] = std::to_string(model.gbdt.depth);
  kv["gbdt.learning_rate"] = fmt_double(model.gbdt.learning_rate);
  kv["gbdt.permutations"] = std::to_string(model.gbdt.permutations);
  kv["gbdt.mode"] = to_string(model.gbdt.mode);
  kv["gbdt.bins"] = std::to_string(model.gbdt.bins);
  kv["gbdt.l2_reg"] = fmt_double(model.gbdt.l2_reg);
  kv["conformal.alpha"] = fmt_double(conformal.alpha);
  kv["conformal.window"] = std::to_string(conformal.window);
  kv["conformal.uncertainty"] = to_string(conformal.uncertainty);
  kv["conformal.calibration"] = std::to_string(conformal.calibration);
  kv["conformal.steps"] = std::to_string(conformal.steps);
  kv["eval.models"] = join(models);
  kv["eval.horizons"] = join(horizons);
  kv["eval.seasonality"] = std::to_string(seasonality);
  kv["run.seed"] = std::to_string(seed);
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string RunConfig::hash() const { return hex64(fnv1a64(canonical())); }

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw SchemaError(std::string("malformed config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    const auto it = allowed_keys().find(section);
    if (it == allowed_keys().end()) throw SchemaError("unknown config section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw SchemaError("unknown config key " + section + "." + key);
    }
  }

  auto resolve = [&](const std::filesystem::path& p) { return p.is_absolute() || base_dir.empty() ? p : base_dir / p; };

  RunConfig c;
  for (const auto& p : split_list(get<std::string>(tree, "data.paths", ""))) c.data_paths.push_back(resolve(p));
  c.pollutants = split_list(get<std::string>(tree, "data.pollutants", ""));
  const auto impute = get<std::string>(tree, "data.impute", "linear");
  if (impute == "linear") {
    c.impute = ImputePolicy::kLinear;
  } else if (impute == "locf") {
    c.impute = ImputePolicy::kCarryForward;
  } else {
    throw SchemaError("data.impute must be linear or locf");
  }

  c.model.lags = get<std::size_t>(tree, "model.lags", c.model.lags);
  if (const auto levels = get<std::size_t>(tree, "model.levels", 0); levels > 0) c.model.levels = levels;
  c.model.domain = component_domain_from_string(get<std::string>(tree, "model.domain", to_string(c.model.domain)));
  auto& g = c.model.gbdt;
  g.iterations = get<std::size_t>(tree, "gbdt.iterations", g.iterations);
  g.depth = get<std::size_t>(tree, "gbdt.depth", g.depth);
  g.learning_rate = get<double>(tree, "gbdt.learning_rate", g.learning_rate);
  g.permutations = get<std::size_t>(tree, "gbdt.permutations", g.permutations);
  g.mode = boosting_mode_from_string(get<std::string>(tree, "gbdt.mode", to_string(g.mode)));
  g.bins = get<std::size_t>(tree, "gbdt.bins", g.bins);
  g.l2_reg = get<double>(tree, "gbdt.l2_reg", g.l2_reg);

  auto& cf = c.conformal;
  cf.alpha = get<double>(tree, "conformal.alpha", cf.alpha);
  cf.window = get<std::size_t>(tree, "conformal.window", cf.window);
  cf.uncertainty = uncertainty_mode_from_string(get<std::string>(tree, "conformal.uncertainty", to_string(cf.uncertainty)));
  cf.calibration = get<std::size_t>(tree, "conformal.calibration", cf.calibration);
  cf.steps = get<std::size_t>(tree, "conformal.steps", cf.steps);

  if (const auto models = get<std::string>(tree, "eval.models", ""); !models.empty()) c.models = split_list(models);
  if (const auto hz = get<std::string>(tree, "eval.horizons", ""); !hz.empty()) c.horizons = split_list(hz);
  c.seasonality = get<std::size_t>(tree, "eval.seasonality", c.seasonality);
  c.seed = get<std::uint64_t>(tree, "run.seed", c.seed);
  c.out_dir = resolve(get<std::string>(tree, "run.out", c.out_dir.string()));

  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("invalid config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("config file not found: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

}  // namespace wavecast
