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
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "edgecc/codegen.hpp"
#include "edgecc/fixedpoint.hpp"
#include "edgecc/inference.hpp"
#include "edgecc/model_ir.hpp"

namespace edgecc {

/// Labeled feature vectors. labels[i] indexes class_labels.
struct Dataset {
  Matrix features;
  std::vector<int> labels;
  std::vector<std::string> class_labels;
  std::string source_name;

  std::size_t size() const noexcept { return labels.size(); }
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct CsvOptions {
  /// Label column by header name or zero-based index. Defaults to the last column.
  std::variant<std::monostate, std::string, std::size_t> label_column;
  bool header = true;
  /// When set, labels map onto this ordering instead of first appearance.
  std::optional<std::vector<std::string>> class_labels;
};

/// Throws IoError, ParseError (row/column) and MissingLabelColumn.
Dataset load_csv(const std::string& path, const CsvOptions& opts = {});
Dataset parse_csv(std::string_view text, const CsvOptions& opts = {}, std::string source_name = "<memory>");

/// Hash over class labels, labels and feature bits.
std::string dataset_fingerprint(const Dataset& ds);

struct Split {
  Dataset train;
  Dataset test;
};

/// Stratified holdout. Each class contributes round(train_fraction * size)
/// rows to train (at least one row to each side); rows keep their original
/// order within each part. Throws DegenerateClass for a class with fewer than
/// two rows.
Split holdout_split(const Dataset& ds, double train_fraction, std::uint64_t seed);

struct EvalConfig {
  NumericMode mode = NumericMode::flt();
  SigmoidVariant sigmoid = SigmoidVariant::exact;
  TreeStyle tree_style = TreeStyle::iterative;
  int timing_reps = 10;
};

struct EvalReport {
  std::string model_fingerprint;
  std::string dataset_fingerprint;
  std::string dataset_name;
  std::string family;
  std::string mode;     // NumericMode::name()
  std::string qformat;  // empty for flt
  std::string sigmoid;     // MLP only
  std::string tree_style;  // trees only
  double accuracy = 0.0;
  std::int64_t n_correct = 0;
  std::int64_t n_total = 0;
  OpCounters counters;
  double underflow_rate = 0.0;
  double overflow_rate = 0.0;
  /// Host wall time per instance. Only meaningful relative to other runs on
  /// the same machine.
  double mean_host_time_us = 0.0;
  MemoryEstimate memory;
  std::vector<std::vector<std::int64_t>> confusion;  // [true][predicted]
};

/// GenOptions equivalent to an evaluation configuration.
GenOptions gen_options_for(const ModelIR& model, const EvalConfig& cfg);

/// Runs the model over every row of `test`. Dataset labels are matched to the
/// model's classes by name. Throws DimensionMismatch on a feature-count
/// mismatch and Error on a label the model does not know.
EvalReport evaluate(const ModelIR& model, const Dataset& test, const EvalConfig& cfg = {});

/// One report per configuration, in order.
std::vector<EvalReport> evaluate_matrix(const ModelIR& model, const Dataset& test,
                                        std::span<const EvalConfig> configs);

std::string report_to_json(const EvalReport& r);
EvalReport report_from_json(std::string_view text);

struct MetricDelta {
  std::string metric;
  double a = 0.0;
  double b = 0.0;
  double delta = 0.0;                // b - a
  std::optional<double> ratio;       // b / a, unset when a == 0
};

struct Comparison {
  std::string label_a;
  std::string label_b;
  std::vector<MetricDelta> rows;
  double regression_threshold = 0.01;
  bool accuracy_regression = false;  // b below a by more than the threshold
};

/// Throws MismatchedRuns unless both reports share model and dataset fingerprints.
Comparison compare_reports(const EvalReport& a, const EvalReport& b, double regression_threshold = 0.01);

std::string format_comparison(const Comparison& c);
/// One row per report.
std::string format_report_table(std::span<const EvalReport> reports);

/// "flt", "fxp32 (Q22.10)" style label of a report's configuration.
std::string config_label(const EvalReport& r);

}  // namespace edgecc
