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

#include <span>
#include <vector>

#include "edgecc/model_ir.hpp"

// Naive evaluators written independently of the inference engine: long
// double arithmetic, recursion instead of tables, fresh buffers per layer.
namespace edgecc::testing {

struct OracleResult {
  int class_index = 0;
  std::vector<long double> scores;
  /// Distance of the decision from flipping: top-two score gap, smallest
  /// |x - threshold| along the tree path, or smallest |s| over SVM machines.
  long double margin = 0.0L;
  /// Magnitude the margin is measured against.
  long double scale = 1.0L;
};

OracleResult oracle_tree(const ModelIR& model, std::span<const double> x);
OracleResult oracle_linear(const ModelIR& model, std::span<const double> x);
OracleResult oracle_mlp(const ModelIR& model, std::span<const double> x);
OracleResult oracle_svm(const ModelIR& model, std::span<const double> x);
OracleResult oracle(const ModelIR& model, std::span<const double> x);

/// True when the decision is clear of numeric noise: margin > rel * max(scale, 1).
inline bool clear_margin(const OracleResult& r, long double rel) {
  return r.margin > rel * (r.scale > 1.0L ? r.scale : 1.0L);
}

/// Single-precision MLP forward pass allocating a new vector per layer, with
/// the exact sigmoid. Same op order as the engine, so results are bit-exact.
std::vector<float> naive_mlp_flt(const ModelIR& model, std::span<const double> x);

}  // namespace edgecc::testing
