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
#include <string>

#include "edgecc/errors.hpp"

namespace edgecc {

/// Qn.m fixed-point format: n integer bits (sign included), m fractional bits,
/// stored in n + m in {8, 16, 32} bits. Value = raw * 2^-m.
class QFormat {
 public:
  /// Throws Error unless total_bits is 8, 16 or 32 and 1 <= int_bits <= total_bits.
  QFormat(int total_bits, int int_bits);

  static QFormat q22_10() { return QFormat(32, 22); }
  static QFormat q12_4() { return QFormat(16, 12); }
  static QFormat q4_4() { return QFormat(8, 4); }

  /// Parses "22.10" style specifications.
  static QFormat parse(const std::string& text);

  int total_bits() const noexcept { return total_; }
  int int_bits() const noexcept { return int_; }
  int frac_bits() const noexcept { return total_ - int_; }

  std::int64_t raw_max() const noexcept { return (std::int64_t{1} << (total_ - 1)) - 1; }
  std::int64_t raw_min() const noexcept { return -(std::int64_t{1} << (total_ - 1)); }
  double resolution() const noexcept;
  double max_value() const noexcept;
  double min_value() const noexcept;
  int storage_bytes() const noexcept { return total_ / 8; }

  std::string str() const;  // "Q22.10"

  friend bool operator==(const QFormat&, const QFormat&) = default;

 private:
  int total_;
  int int_;
};

/// Arithmetic event counts for one evaluation context.
///
/// Underflow follows the "non-zero rounds to zero" definition: an operation
/// with at least one non-zero operand whose exact result is non-zero but whose
/// rounded raw result is 0.
struct OpCounters {
  std::uint64_t overflow_count = 0;
  std::uint64_t underflow_count = 0;
  std::uint64_t op_count = 0;

  OpCounters& operator+=(const OpCounters& o) noexcept {
    overflow_count += o.overflow_count;
    underflow_count += o.underflow_count;
    op_count += o.op_count;
    return *this;
  }
  friend bool operator==(const OpCounters&, const OpCounters&) = default;
};

/// Raw-level saturating arithmetic in one format. Every operation bumps
/// op_count; results are clamped to [raw_min, raw_max] and rounding is
/// half-away-from-zero throughout. The same algorithms are emitted verbatim
/// into generated sources.
class FixedArith {
 public:
  FixedArith(QFormat fmt, OpCounters& counters) : fmt_(fmt), c_(&counters) {}

  const QFormat& format() const noexcept { return fmt_; }
  OpCounters& counters() const noexcept { return *c_; }

  std::int32_t one() const noexcept;

  std::int32_t quantize(double x) const;
  std::int32_t add(std::int32_t a, std::int32_t b) const;
  std::int32_t sub(std::int32_t a, std::int32_t b) const;
  std::int32_t neg(std::int32_t a) const;
  std::int32_t abs(std::int32_t a) const { return a < 0 ? neg(a) : a; }
  std::int32_t mul(std::int32_t a, std::int32_t b) const;
  /// Throws DivisionByZero when b == 0.
  std::int32_t div(std::int32_t a, std::int32_t b) const;
  std::int32_t exp(std::int32_t x) const;
  /// Throws NegativeInput when x < 0.
  std::int32_t sqrt(std::int32_t x) const;
  std::int32_t pow_int(std::int32_t x, unsigned k) const;

 private:
  std::int32_t saturate(std::int64_t v) const;

  QFormat fmt_;
  OpCounters* c_;
};

/// Uncounted conversion used for model constants baked in at generation time.
std::int32_t quantize_constant(double x, QFormat fmt);

struct FixedValue {
  std::int32_t raw = 0;
  QFormat format = QFormat::q22_10();

  double value() const noexcept;
  friend bool operator==(const FixedValue&, const FixedValue&) = default;
};

/// Evaluation context owning the counters of one run.
struct FixedContext {
  OpCounters counters;
};

FixedValue to_fixed(double x, QFormat fmt, FixedContext& ctx);
double from_fixed(FixedValue v) noexcept;

// Binary operations throw FormatMismatch when operand formats differ.
FixedValue fxp_add(FixedValue a, FixedValue b, FixedContext& ctx);
FixedValue fxp_sub(FixedValue a, FixedValue b, FixedContext& ctx);
FixedValue fxp_neg(FixedValue a, FixedContext& ctx);
FixedValue fxp_mul(FixedValue a, FixedValue b, FixedContext& ctx);
FixedValue fxp_div(FixedValue a, FixedValue b, FixedContext& ctx);
FixedValue fxp_exp(FixedValue x, FixedContext& ctx);
FixedValue fxp_sqrt(FixedValue x, FixedContext& ctx);
FixedValue fxp_pow_int(FixedValue x, unsigned k, FixedContext& ctx);

}  // namespace edgecc
