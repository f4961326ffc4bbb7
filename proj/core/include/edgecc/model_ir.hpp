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

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "edgecc/errors.hpp"

namespace edgecc {

/// Dense row-major matrix of reals.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

// ---------------------------------------------------------------------------
// Decision tree. Internal nodes send x to `left` iff x[feature] <= threshold.
// Children always carry a larger index than their parent.

struct TreeSplit {
  int feature = 0;
  double threshold = 0.0;
  int left = 0;
  int right = 0;
  friend bool operator==(const TreeSplit&, const TreeSplit&) = default;
};

struct TreeLeaf {
  int class_index = 0;
  friend bool operator==(const TreeLeaf&, const TreeLeaf&) = default;
};

using TreeNode = std::variant<TreeSplit, TreeLeaf>;

struct TreeModel {
  std::vector<TreeNode> nodes;  // root at index 0
  friend bool operator==(const TreeModel&, const TreeModel&) = default;
};

// ---------------------------------------------------------------------------

enum class ScoreRule { argmax_linear, binary_sign };

/// One score row per class (argmax_linear) or a single row whose positive
/// score selects class 1 (binary_sign).
struct LinearModel {
  Matrix weights;  // rows x n_features
  std::vector<double> bias;
  ScoreRule score_rule = ScoreRule::argmax_linear;
  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

// ---------------------------------------------------------------------------

enum class Activation { sigmoid, relu, identity };

struct DenseLayer {
  Matrix weights;  // out x in
  std::vector<double> bias;
  Activation activation = Activation::sigmoid;
  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Feed-forward network; the class is the argmax of the last layer. A single
/// output unit means a binary model thresholded at 0.5 (sigmoid output) or 0.
struct MLPModel {
  std::vector<DenseLayer> layers;
  friend bool operator==(const MLPModel&, const MLPModel&) = default;
};

// ---------------------------------------------------------------------------

enum class KernelType { poly, rbf };

struct Kernel {
  KernelType type = KernelType::rbf;
  double gamma = 1.0;
  double coef0 = 0.0;  // poly only
  int degree = 3;      // poly only
  friend bool operator==(const Kernel&, const Kernel&) = default;
};

/// One pairwise machine: decision s = sum_i dual[i] * k(sv_i, x) + intercept;
/// s > 0 votes class_a, otherwise class_b.
struct BinaryMachine {
  int class_a = 0;
  int class_b = 1;
  Matrix support_vectors;  // m x n_features
  std::vector<double> dual_coefs;
  double intercept = 0.0;
  friend bool operator==(const BinaryMachine&, const BinaryMachine&) = default;
};

struct KernelSVMModel {
  Kernel kernel;
  std::vector<BinaryMachine> machines;
  friend bool operator==(const KernelSVMModel&, const KernelSVMModel&) = default;
};

// ---------------------------------------------------------------------------

enum class Family { tree, linear, mlp, kernel_svm };

using ModelPayload = std::variant<TreeModel, LinearModel, MLPModel, KernelSVMModel>;

struct ModelIR {
  int n_features = 0;
  std::vector<std::string> class_labels;
  std::map<std::string, std::string> metadata;
  ModelPayload payload;

  Family family() const noexcept { return static_cast<Family>(payload.index()); }
  int n_classes() const noexcept { return static_cast<int>(class_labels.size()); }

  template <class T>
  const T& as() const {
    return std::get<T>(payload);
  }

  friend bool operator==(const ModelIR&, const ModelIR&) = default;
};

struct ModelStats {
  std::int64_t param_count = 0;
  std::int64_t node_count = 0;
  std::int64_t max_layer_width = 0;
  std::int64_t support_vector_total = 0;
  friend bool operator==(const ModelStats&, const ModelStats&) = default;
};

inline constexpr int kSchemaVersion = 1;

std::string_view family_name(Family f) noexcept;
std::string_view activation_name(Activation a) noexcept;

/// Parses and validates an interchange document.
/// Throws SchemaError on a missing or ill-typed field and StructureError when
/// the decoded model breaks an invariant.
ModelIR parse_model(std::string_view text);

/// Reads and parses a document from disk. Throws IoError if unreadable.
ModelIR load_model(const std::string& path);

/// Canonical interchange text: keys sorted, reals in shortest round-trip form.
std::string serialize(const ModelIR& model);

std::vector<Violation> validate(const ModelIR& model);

ModelStats model_stats(const ModelIR& model);

/// Depth of the deepest leaf (root depth 0).
int tree_depth(const TreeModel& tree);

}  // namespace edgecc
