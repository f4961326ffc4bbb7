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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edgecc/fixedpoint.hpp"
#include "edgecc/inference.hpp"
#include "edgecc/model_ir.hpp"

namespace edgecc {

/// Choices controlling code emission. `sigmoid` applies to MLP models only
/// and `tree_style` to trees only; leaving them unset selects exact and
/// iterative respectively.
struct GenOptions {
  NumericMode mode = NumericMode::flt();
  std::optional<SigmoidVariant> sigmoid;
  std::optional<TreeStyle> tree_style;
  std::string symbol_prefix = "model";
  bool emit_test_hook = false;

  friend bool operator==(const GenOptions&, const GenOptions&) = default;
};

/// Read-only (flash) and working (SRAM) bytes of an emitted classifier.
/// flash_const_bytes = param_bytes + structural_bytes.
struct MemoryEstimate {
  std::int64_t flash_const_bytes = 0;
  std::int64_t sram_bytes = 0;
  int elem_bytes = 4;
  std::int64_t param_bytes = 0;
  std::int64_t structural_bytes = 0;

  friend bool operator==(const MemoryEstimate&, const MemoryEstimate&) = default;
};

struct GeneratedSource {
  std::string text;
  MemoryEstimate memory;
  GenOptions options_echo;
  std::string model_fingerprint;  // hash of the canonical interchange text
  std::string text_hash;          // hash of `text`
  std::vector<std::string> warnings;
};

/// Throws Unsupported when `opts` names an option outside the model's
/// family (or an 8-bit format with the exact/rational sigmoid), or when the
/// prefix is not an identifier.
void check_options(const ModelIR& model, const GenOptions& opts);

/// Emits one self-contained source file. Entry points:
///
///   int32_t <prefix>_classify(const T* x);
///   int32_t <prefix>_scores(const T* x, T* scores);   // emit_test_hook only
///   T <prefix>_to_fixed(float v);                     // FXP modes only
///
/// with T = float (FLT) or the raw storage integer (FXP).
GeneratedSource generate(const ModelIR& model, const GenOptions& opts);

MemoryEstimate estimate_memory(const ModelIR& model, const GenOptions& opts);

std::string model_fingerprint(const ModelIR& model);

// Family fragments. Each defines `static int32_t <prefix>_eval(const T* x,
// T* scores)` except gen_tree, which defines `<prefix>_tree(const T* x)`.
std::string gen_tree(const ModelIR& model, const GenOptions& opts);
std::string gen_linear(const ModelIR& model, const GenOptions& opts);
std::string gen_mlp(const ModelIR& model, const GenOptions& opts);
std::string gen_svm(const ModelIR& model, const GenOptions& opts);

/// Saturating Qn.m runtime (add/sub/neg/mul/div/exp/sqrt/pow plus
/// conversions), bit-identical to FixedArith.
std::string gen_fixedpoint_runtime(const QFormat& fmt, const std::string& prefix);

/// Narrowest unsigned type name ("uint8_t", ...) holding max_value.
std::string narrowest_unsigned(std::uint64_t max_value);

}  // namespace edgecc
