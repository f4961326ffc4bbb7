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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edgecc/fixedpoint.hpp"
#include "edgecc/model_ir.hpp"

namespace edgecc {

/// FLT (IEEE single precision) or FXP in a given Q-format.
class NumericMode {
 public:
  static NumericMode flt() { return NumericMode(); }
  static NumericMode fxp(QFormat fmt) { return NumericMode(fmt); }
  static NumericMode fxp32() { return fxp(QFormat::q22_10()); }
  static NumericMode fxp16() { return fxp(QFormat::q12_4()); }

  bool is_fixed() const noexcept { return fmt_.has_value(); }
  const QFormat& format() const { return fmt_.value(); }
  int elem_bytes() const noexcept { return fmt_ ? fmt_->storage_bytes() : 4; }

  /// "flt", "fxp32", "fxp16" or "fxp8".
  std::string name() const;
  /// name() plus the Q-format for fixed modes, e.g. "fxp32 (Q22.10)".
  std::string describe() const;

  friend bool operator==(const NumericMode&, const NumericMode&) = default;

 private:
  NumericMode() = default;
  explicit NumericMode(QFormat fmt) : fmt_(fmt) {}
  std::optional<QFormat> fmt_;
};

enum class SigmoidVariant { exact, rational, pwl2, pwl4 };
enum class TreeStyle { iterative, if_else };

std::string sigmoid_name(SigmoidVariant v);
std::string tree_style_name(TreeStyle s);

struct Prediction {
  int class_index = 0;
  std::vector<double> scores;            // decision values, K entries
  std::vector<std::int32_t> raw_scores;  // FXP modes only: scores as raw integers
  OpCounters counters;
};

/// A model prepared for repeated prediction under one numeric mode:
/// parameters are converted to the mode's representation once.
///
/// Inputs are narrowed to 32-bit floats at the entry point (the element type
/// the generated code receives) and, in FXP modes, converted to fixed point
/// once per prediction. Ties in any argmax go to the lowest class index.
class Predictor {
 public:
  Predictor(const ModelIR& model, NumericMode mode, SigmoidVariant sigmoid = SigmoidVariant::exact,
            TreeStyle tree_style = TreeStyle::iterative);
  ~Predictor();
  Predictor(Predictor&&) noexcept;
  Predictor& operator=(Predictor&&) noexcept;

  /// Throws DimensionMismatch when x.size() != n_features.
  Prediction predict(std::span<const double> x) const;

  const NumericMode& mode() const noexcept { return mode_; }
  int n_features() const noexcept { return n_features_; }
  int n_classes() const noexcept { return n_classes_; }

 private:
  struct Impl;
  NumericMode mode_;
  int n_features_;
  int n_classes_;
  std::unique_ptr<Impl> impl_;
};

Prediction predict_tree(const ModelIR& model, std::span<const double> x, NumericMode mode,
                        TreeStyle style = TreeStyle::iterative);
Prediction predict_linear(const ModelIR& model, std::span<const double> x, NumericMode mode);
Prediction predict_mlp(const ModelIR& model, std::span<const double> x, NumericMode mode,
                       SigmoidVariant variant);
Prediction predict_svm_kernel(const ModelIR& model, std::span<const double> x, NumericMode mode);

/// Sigmoid variants evaluated in single precision.
float sigmoid_eval(float x, SigmoidVariant variant);
/// Sigmoid variants evaluated in fixed point; arithmetic is counted in ctx.
FixedValue sigmoid_eval(FixedValue x, SigmoidVariant variant, FixedContext& ctx);

/// Knots of the 4-point piecewise-linear sigmoid: exact sigmoid values at
/// x = +-1 and +-4, constant beyond +-4.
struct Pwl4Knots {
  static constexpr double inner_x = 1.0;
  static constexpr double outer_x = 4.0;
  static double inner_y();  // sigmoid(1)
  static double outer_y();  // sigmoid(4)
};

}  // namespace edgecc
