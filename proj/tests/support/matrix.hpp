// Copyright 2026 The edgecc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

#include "edgecc/codegen.hpp"

namespace edgecc::testing {

inline const std::vector<std::string> kSampleModels = {"tree.json",     "linear.json",   "linear_binary.json",
                                                       "mlp.json",      "mlp_binary.json", "svm_poly.json",
                                                       "svm_rbf.json"};

ModelIR load_sample(const std::string& name);

struct MatrixEntry {
  std::string key;  // e.g. "mlp.json/fxp16/pwl2/hook"
  ModelIR model;
  GenOptions opts;
};

/// Every accepted option combination for the sample models: all numeric
/// modes, sigmoid variants, tree styles and the test hook on and off.
std::vector<MatrixEntry> options_matrix();

}  // namespace edgecc::testing
