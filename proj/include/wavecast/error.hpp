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

#include <stdexcept>
#include <string>

namespace wavecast {

// Exception hierarchy. The CLI maps each category onto a stable exit code.

/// Input file or column layout does not match what the loader expects.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input parsed but contained nothing usable.
class EmptyDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An upstream artifact (series file, model snapshot, report) is absent.
class MissingArtifactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric routine failed. `component` names the model part at fault,
/// e.g. "D3" or "S7", or is empty when not attributable.
class NumericError : public std::runtime_error {
 public:
  NumericError(std::string component, const std::string& what)
      : std::runtime_error(component.empty() ? what : component + ": " + what),
        component_(std::move(component)) {}

  const std::string& component() const noexcept { return component_; }

 private:
  std::string component_;
};

}  // namespace wavecast
