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

#include "edgecc/fixedpoint.hpp"

#include <cmath>
#include <cstdlib>

namespace edgecc {

namespace {

// Internal precision of the exponential: Q(.)30 in 64-bit words.
constexpr int kExpFrac = 30;
constexpr std::int64_t kExpOne = std::int64_t{1} << kExpFrac;
constexpr std::int64_t kLn2Q30 = 744261118;  // round(ln 2 * 2^30)
constexpr int kExpTerms = 11;

// Arithmetic shift right by `shift` bits, rounding half away from zero.
std::int64_t round_shift(std::int64_t v, int shift) {
  if (shift <= 0) return v;
  const std::uint64_t mag = v < 0 ? std::uint64_t(0) - std::uint64_t(v) : std::uint64_t(v);
  const std::uint64_t r = (mag + (std::uint64_t{1} << (shift - 1))) >> shift;
  return v < 0 ? -std::int64_t(r) : std::int64_t(r);
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::uint64_t isqrt(std::uint64_t n) {
  std::uint64_t res = 0;
  std::uint64_t bit = std::uint64_t{1} << 62;
  while (bit > n) bit >>= 2;
  while (bit != 0) {
    if (n >= res + bit) {
      n -= res + bit;
      res = (res >> 1) + bit;
    } else {
      res >>= 1;
    }
    bit >>= 2;
  }
  return res;
}

std::int32_t quantize_impl(double x, const QFormat& fmt, OpCounters* c) {
  if (c) ++c->op_count;
  if (std::isnan(x)) return 0;
  const double t = std::ldexp(x, fmt.frac_bits());
  if (t >= double(fmt.raw_max()) + 0.5) {
    if (c) ++c->overflow_count;
    return static_cast<std::int32_t>(fmt.raw_max());
  }
  if (t <= double(fmt.raw_min()) - 0.5) {
    if (c) ++c->overflow_count;
    return static_cast<std::int32_t>(fmt.raw_min());
  }
  const double whole = std::trunc(t);
  const double frac = t - whole;
  auto r = static_cast<std::int64_t>(whole);
  if (frac >= 0.5) {
    ++r;
  } else if (frac <= -0.5) {
    --r;
  }
  if (c && r == 0 && x != 0.0) ++c->underflow_count;
  return static_cast<std::int32_t>(r);
}

}  // namespace

QFormat::QFormat(int total_bits, int int_bits) : total_(total_bits), int_(int_bits) {
  if (total_bits != 8 && total_bits != 16 && total_bits != 32) {
    throw Error("fixed-point storage must be 8, 16 or 32 bits, got " + std::to_string(total_bits));
  }
  if (int_bits < 1 || int_bits > total_bits) {
    throw Error("integer bits must be in [1, " + std::to_string(total_bits) + "], got " +
                std::to_string(int_bits));
  }
}

QFormat QFormat::parse(const std::string& text) {
  std::string s = text;
  if (!s.empty() && (s[0] == 'Q' || s[0] == 'q')) s.erase(0, 1);
  const auto dot = s.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == s.size()) {
    throw Error("Q-format must look like n.m, got \"" + text + "\"");
  }
  auto to_int = [&](const std::string& part) {
    for (char ch : part) {
      if (ch < '0' || ch > '9') throw Error("Q-format must look like n.m, got \"" + text + "\"");
    }
    return std::stoi(part);
  };
  const int n = to_int(s.substr(0, dot));
  const int m = to_int(s.substr(dot + 1));
  return QFormat(n + m, n);
}

double QFormat::resolution() const noexcept { return std::ldexp(1.0, -frac_bits()); }
double QFormat::max_value() const noexcept { return std::ldexp(double(raw_max()), -frac_bits()); }
double QFormat::min_value() const noexcept { return std::ldexp(double(raw_min()), -frac_bits()); }

std::string QFormat::str() const {
  return "Q" + std::to_string(int_bits()) + "." + std::to_string(frac_bits());
}

std::int32_t FixedArith::saturate(std::int64_t v) const {
  if (v > fmt_.raw_max()) {
    ++c_->overflow_count;
    return static_cast<std::int32_t>(fmt_.raw_max());
  }
  if (v < fmt_.raw_min()) {
    ++c_->overflow_count;
    return static_cast<std::int32_t>(fmt_.raw_min());
  }
  return static_cast<std::int32_t>(v);
}

std::int32_t FixedArith::one() const noexcept {
  const std::int64_t v = std::int64_t{1} << fmt_.frac_bits();
  return static_cast<std::int32_t>(v > fmt_.raw_max() ? fmt_.raw_max() : v);
}

std::int32_t FixedArith::quantize(double x) const { return quantize_impl(x, fmt_, c_); }

std::int32_t FixedArith::add(std::int32_t a, std::int32_t b) const {
  ++c_->op_count;
  return saturate(std::int64_t{a} + b);
}

std::int32_t FixedArith::sub(std::int32_t a, std::int32_t b) const {
  ++c_->op_count;
  return saturate(std::int64_t{a} - b);
}

std::int32_t FixedArith::neg(std::int32_t a) const {
  ++c_->op_count;
  return saturate(-std::int64_t{a});
}

std::int32_t FixedArith::mul(std::int32_t a, std::int32_t b) const {
  ++c_->op_count;
  const std::int64_t p = std::int64_t{a} * b;
  const std::int64_t r = round_shift(p, fmt_.frac_bits());
  if (r == 0 && p != 0) ++c_->underflow_count;
  return saturate(r);
}

std::int32_t FixedArith::div(std::int32_t a, std::int32_t b) const {
  if (b == 0) throw DivisionByZero("fixed-point division by zero");
  ++c_->op_count;
  const std::uint64_t num = std::uint64_t(std::llabs(a)) << fmt_.frac_bits();
  const std::uint64_t den = std::uint64_t(std::llabs(b));
  const std::uint64_t q = (2 * num + den) / (2 * den);
  const std::int64_t r = ((a < 0) != (b < 0)) ? -std::int64_t(q) : std::int64_t(q);
  if (r == 0 && a != 0) ++c_->underflow_count;
  return saturate(r);
}

std::int32_t FixedArith::exp(std::int32_t x) const {
  ++c_->op_count;
  const int m = fmt_.frac_bits();
  if (x == 0) return saturate(std::int64_t{1} << m);

  // x = k ln2 + r with r in [0, ln2), so e^x = 2^k e^r.
  const std::int64_t xq = m <= kExpFrac ? std::int64_t{x} * (std::int64_t{1} << (kExpFrac - m))
                                        : round_shift(x, m - kExpFrac);
  const std::int64_t k = floor_div(xq, kLn2Q30);
  const std::int64_t r = xq - k * kLn2Q30;

  std::int64_t e = kExpOne;
  for (int i = kExpTerms; i >= 1; --i) {
    const std::int64_t prod = (r * e + (kExpOne >> 1)) >> kExpFrac;
    e = kExpOne + (prod + i / 2) / i;
  }

  if (k + m >= fmt_.total_bits() - 1) return saturate(fmt_.raw_max() + std::int64_t{1});
  const std::int64_t shift = kExpFrac - m - k;
  std::int64_t out = 0;
  if (shift < 62) out = round_shift(e, static_cast<int>(shift));
  if (out == 0) ++c_->underflow_count;
  return saturate(out);
}

std::int32_t FixedArith::sqrt(std::int32_t x) const {
  if (x < 0) throw NegativeInput("fixed-point square root of a negative value");
  ++c_->op_count;
  const std::uint64_t n = std::uint64_t(x) << fmt_.frac_bits();
  std::uint64_t s = isqrt(n);
  if (n - s * s > s) ++s;
  return saturate(std::int64_t(s));
}

std::int32_t FixedArith::pow_int(std::int32_t x, unsigned k) const {
  std::int32_t result = one();
  bool have = false;
  std::int32_t base = x;
  while (k != 0) {
    if (k & 1u) {
      result = have ? mul(result, base) : base;
      have = true;
    }
    k >>= 1;
    if (k != 0) base = mul(base, base);
  }
  return result;
}

std::int32_t quantize_constant(double x, QFormat fmt) { return quantize_impl(x, fmt, nullptr); }

double FixedValue::value() const noexcept { return from_fixed(*this); }

double from_fixed(FixedValue v) noexcept { return std::ldexp(double(v.raw), -v.format.frac_bits()); }

FixedValue to_fixed(double x, QFormat fmt, FixedContext& ctx) {
  return {FixedArith(fmt, ctx.counters).quantize(x), fmt};
}

namespace {

void require_same(const FixedValue& a, const FixedValue& b) {
  if (!(a.format == b.format)) {
    throw FormatMismatch("operand formats differ: " + a.format.str() + " vs " + b.format.str());
  }
}

}  // namespace

FixedValue fxp_add(FixedValue a, FixedValue b, FixedContext& ctx) {
  require_same(a, b);
  return {FixedArith(a.format, ctx.counters).add(a.raw, b.raw), a.format};
}

FixedValue fxp_sub(FixedValue a, FixedValue b, FixedContext& ctx) {
  require_same(a, b);
  return {FixedArith(a.format, ctx.counters).sub(a.raw, b.raw), a.format};
}

FixedValue fxp_neg(FixedValue a, FixedContext& ctx) {
  return {FixedArith(a.format, ctx.counters).neg(a.raw), a.format};
}

FixedValue fxp_mul(FixedValue a, FixedValue b, FixedContext& ctx) {
  require_same(a, b);
  return {FixedArith(a.format, ctx.counters).mul(a.raw, b.raw), a.format};
}

FixedValue fxp_div(FixedValue a, FixedValue b, FixedContext& ctx) {
  require_same(a, b);
  return {FixedArith(a.format, ctx.counters).div(a.raw, b.raw), a.format};
}

FixedValue fxp_exp(FixedValue x, FixedContext& ctx) {
  return {FixedArith(x.format, ctx.counters).exp(x.raw), x.format};
}

FixedValue fxp_sqrt(FixedValue x, FixedContext& ctx) {
  return {FixedArith(x.format, ctx.counters).sqrt(x.raw), x.format};
}

FixedValue fxp_pow_int(FixedValue x, unsigned k, FixedContext& ctx) {
  return {FixedArith(x.format, ctx.counters).pow_int(x.raw, k), x.format};
}

}  // namespace edgecc
