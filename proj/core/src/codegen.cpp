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

#include "edgecc/codegen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "edgecc/hash.hpp"
#include "edgecc/tree_lowering.hpp"

namespace edgecc {

std::string narrowest_unsigned(std::uint64_t max_value) {
  if (max_value <= 0xffu) return "uint8_t";
  if (max_value <= 0xffffu) return "uint16_t";
  return "uint32_t";
}

namespace {

int unsigned_bytes(std::uint64_t max_value) {
  if (max_value <= 0xffu) return 1;
  if (max_value <= 0xffffu) return 2;
  return 4;
}

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  const auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  const auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(s[0])) return false;
  return std::all_of(s.begin(), s.end(), [&](char c) { return alpha(c) || digit(c); });
}

std::string upper(std::string s) {
  for (auto& c : s) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return s;
}

std::string float_literal(float v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s + "f";
}

std::string int_literal(std::int64_t v) {
  if (v == std::int64_t{-2147483647} - 1) return "(-2147483647 - 1)";
  return std::to_string(v);
}

bool uses_sigmoid(const MLPModel& mlp) {
  return std::any_of(mlp.layers.begin(), mlp.layers.end(),
                     [](const DenseLayer& l) { return l.activation == Activation::sigmoid; });
}

bool if_else_fallback(const ModelIR& model, const GenOptions& opts) {
  return model.family() == Family::tree && opts.tree_style == TreeStyle::if_else &&
         tree_depth(model.as<TreeModel>()) > kMaxIfElseDepth;
}

// Expression builder for the active numeric mode. FLT expressions are plain
// operators; FXP expressions call the embedded runtime.
class Emitter {
 public:
  Emitter(const ModelIR& model, const GenOptions& opts) : model_(model), opts_(opts), p_(opts.symbol_prefix) {
    if (opts.mode.is_fixed()) {
      fmt_ = opts.mode.format();
      et_ = fmt_->total_bits() == 32 ? "int32_t" : fmt_->total_bits() == 16 ? "int16_t" : "int8_t";
    } else {
      et_ = "float";
    }
  }

  const std::string& p() const { return p_; }
  const std::string& et() const { return et_; }
  bool fixed() const { return fmt_.has_value(); }
  const ModelIR& model() const { return model_; }
  const GenOptions& opts() const { return opts_; }

  std::string add(const std::string& a, const std::string& b) const {
    return fixed() ? p_ + "_fx_add(" + a + ", " + b + ")" : "(" + a + " + " + b + ")";
  }
  std::string sub(const std::string& a, const std::string& b) const {
    return fixed() ? p_ + "_fx_sub(" + a + ", " + b + ")" : "(" + a + " - " + b + ")";
  }
  std::string mul(const std::string& a, const std::string& b) const {
    return fixed() ? p_ + "_fx_mul(" + a + ", " + b + ")" : "(" + a + " * " + b + ")";
  }
  std::string div(const std::string& a, const std::string& b) const {
    return fixed() ? p_ + "_fx_div(" + a + ", " + b + ")" : "(" + a + " / " + b + ")";
  }
  std::string neg(const std::string& a) const { return fixed() ? p_ + "_fx_neg(" + a + ")" : "(-" + a + ")"; }
  std::string abs(const std::string& a) const {
    return fixed() ? p_ + "_fx_abs(" + a + ")" : "(" + a + " < 0.0f ? -" + a + " : " + a + ")";
  }
  std::string exp(const std::string& a) const { return p_ + (fixed() ? "_fx_exp(" : "_expf(") + a + ")"; }
  std::string pow(const std::string& a, int k) const {
    return p_ + (fixed() ? "_fx_pow(" : "_powf(") + a + ", " + std::to_string(k) + "u)";
  }

  /// A model constant in the mode's representation.
  std::string lit(double v) const {
    if (fixed()) return int_literal(quantize_constant(v, *fmt_));
    return float_literal(static_cast<float>(v));
  }
  /// Literal of an already-converted value (float or raw integer).
  std::string lit_value(float v) const { return float_literal(v); }
  std::string lit_raw(std::int64_t v) const { return int_literal(v); }
  std::string zero() const { return fixed() ? "0" : "0.0f"; }

  std::string array(const std::string& type, const std::string& name, const std::vector<std::string>& values) const {
    std::string out = "static const " + type + " " + p_ + "_" + name + "[" + std::to_string(values.size()) + "] = {";
    for (std::size_t i = 0; i < values.size(); ++i) {
      out += (i % 8 == 0) ? "\n  " : " ";
      out += values[i];
      if (i + 1 < values.size()) out += ",";
    }
    out += "\n};\n";
    return out;
  }

  std::vector<std::string> lits(std::span<const double> values) const {
    std::vector<std::string> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(lit(v));
    return out;
  }

 private:
  const ModelIR& model_;
  const GenOptions& opts_;
  std::string p_;
  std::optional<QFormat> fmt_;
  std::string et_;
};

std::string float_runtime(const std::string& p, bool need_exp, bool need_pow) {
  std::string out;
  if (need_exp) {
    out += "static float " + p + R"(_expf(float x) {
  if (x > 88.0f) return 3.40282347e+38f;
  if (x < -87.0f) return 0.0f;
  const float kf = x * 1.44269504f;
  const int k = (int)(kf + (kf >= 0.0f ? 0.5f : -0.5f));
  const float kk = (float)k;
  const float r = (x - kk * 0.693145751953125f) - kk * 1.42860677e-06f;
  const float p = 1.0f + r * (1.0f + r * (0.5f + r * (0.166666672f + r * (0.0416666679f +
                  r * (0.00833333377f + r * 0.00138888892f)))));
  float s = 1.0f;
  float b = k >= 0 ? 2.0f : 0.5f;
  unsigned n = (unsigned)(k >= 0 ? k : -k);
  while (n != 0u) {
    if (n & 1u) s *= b;
    n >>= 1;
    if (n != 0u) b *= b;
  }
  return p * s;
}

)";
  }
  if (need_pow) {
    out += "static float " + p + R"(_powf(float x, unsigned k) {
  float result = 1.0f;
  int have = 0;
  float base = x;
  while (k != 0u) {
    if (k & 1u) {
      result = have ? result * base : base;
      have = 1;
    }
    k >>= 1;
    if (k != 0u) base = base * base;
  }
  return result;
}

)";
  }
  return out;
}

// Sigmoid constants in the mode's representation, derived exactly as the
// reference engine derives them.
struct SigmoidLits {
  std::string one, half, quarter, s_inner, s_outer, x_in, x_out, x_in_neg, x_out_neg, y_in, y_in_neg, y_out,
      y_out_neg;
};

SigmoidLits sigmoid_lits(const Emitter& e, const GenOptions& opts) {
  const double yi = Pwl4Knots::inner_y();
  const double yo = Pwl4Knots::outer_y();
  const double s_in = yi - 0.5;
  const double s_out = (yo - yi) / (Pwl4Knots::outer_x - Pwl4Knots::inner_x);
  SigmoidLits l;
  l.one = e.lit(1.0);
  l.half = e.lit(0.5);
  l.quarter = e.lit(0.25);
  l.s_inner = e.lit(s_in);
  l.s_outer = e.lit(s_out);
  l.x_in = e.lit(Pwl4Knots::inner_x);
  l.x_out = e.lit(Pwl4Knots::outer_x);
  l.x_in_neg = e.lit(-Pwl4Knots::inner_x);
  l.x_out_neg = e.lit(-Pwl4Knots::outer_x);
  l.y_out = e.lit(yo);
  l.y_out_neg = e.lit(1.0 - yo);
  if (opts.mode.is_fixed()) {
    const QFormat& f = opts.mode.format();
    OpCounters scratch;
    FixedArith ar(f, scratch);
    const auto half = quantize_constant(0.5, f);
    const auto si = quantize_constant(s_in, f);
    l.y_in = e.lit_raw(ar.add(half, si));
    l.y_in_neg = e.lit_raw(ar.sub(half, si));
  } else {
    const float half = 0.5f;
    const float si = static_cast<float>(s_in);
    l.y_in = e.lit_value(half + si);
    l.y_in_neg = e.lit_value(half - si);
  }
  return l;
}

std::string gen_sigmoid(const Emitter& e, SigmoidVariant v) {
  const std::string& T = e.et();
  const SigmoidLits c = sigmoid_lits(e, e.opts());
  std::string body;
  switch (v) {
    case SigmoidVariant::exact:
      body = "  return " + e.div(c.one, e.add(c.one, e.exp(e.neg("x")))) + ";\n";
      break;
    case SigmoidVariant::rational:
      body = "  const " + T + " ax = " + e.abs("x") + ";\n" + "  return " +
             e.add(c.half, e.mul(c.half, e.div("x", e.add(c.one, "ax")))) + ";\n";
      break;
    case SigmoidVariant::pwl2:
      body = "  const " + T + " y = " + e.add(e.mul(c.quarter, "x"), c.half) + ";\n" +
             "  if (y < " + e.zero() + ") return " + e.zero() + ";\n" +
             "  if (y > " + c.one + ") return " + c.one + ";\n" +
             "  return y;\n";
      break;
    case SigmoidVariant::pwl4:
      body = "  if (x <= " + c.x_out_neg + ") return " + c.y_out_neg + ";\n" +
             "  if (x < " + c.x_in_neg + ") {\n" +
             "    const " + T + " y = " + e.add(c.y_in_neg, e.mul(c.s_outer, e.add("x", c.one))) + ";\n" +
             "    return y < " + c.y_out_neg + " ? " + c.y_out_neg + " : y;\n" +
             "  }\n" +
             "  if (x <= " + c.x_in + ") return " + e.add(c.half, e.mul(c.s_inner, "x")) + ";\n" +
             "  if (x < " + c.x_out + ") {\n" +
             "    const " + T + " y = " + e.add(c.y_in, e.mul(c.s_outer, e.sub("x", c.one))) + ";\n" +
             "    return y > " + c.y_out + " ? " + c.y_out + " : y;\n" +
             "  }\n" +
             "  return " + c.y_out + ";\n";
      break;
  }
  return "/* sigmoid: " + sigmoid_name(v) + " */\nstatic " + T + " " + e.p() + "_sigmoid(" + T + " x) {\n" + body +
         "}\n\n";
}

std::string emit_if_else(const Emitter& e, const TreeProgram& prog, int stmt, int indent) {
  const auto& s = prog.stmts[stmt];
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  if (s.is_return) return pad + "return " + std::to_string(s.class_index) + ";\n";
  std::string out = pad + "if (x[" + std::to_string(s.feature) + "] <= " + e.p() + "_threshold[" +
                    std::to_string(s.slot) + "]) {\n";
  out += emit_if_else(e, prog, s.then_stmt, indent + 1);
  out += pad + "} else {\n";
  out += emit_if_else(e, prog, s.else_stmt, indent + 1);
  out += pad + "}\n";
  return out;
}

std::string scores_argmax(const std::string& src, int k) {
  return "  if (scores) {\n    for (int32_t k = 0; k < " + std::to_string(k) + "; ++k) scores[k] = " + src +
         "[k];\n  }\n" + "  int32_t best = 0;\n" + "  for (int32_t k = 1; k < " + std::to_string(k) +
         "; ++k) {\n" + "    if (" + src + "[k] > " + src + "[best]) best = k;\n  }\n  return best;\n";
}

}  // namespace

void check_options(const ModelIR& model, const GenOptions& opts) {
  if (!is_identifier(opts.symbol_prefix)) {
    throw Unsupported("symbol prefix \"" + opts.symbol_prefix + "\" is not a valid identifier");
  }
  if (opts.tree_style && model.family() != Family::tree) {
    throw Unsupported("tree style applies to tree models only (model family: " +
                      std::string(family_name(model.family())) + ")");
  }
  if (opts.sigmoid && model.family() != Family::mlp) {
    throw Unsupported("sigmoid variant applies to MLP models only (model family: " +
                      std::string(family_name(model.family())) + ")");
  }
  if (model.family() == Family::mlp && opts.mode.is_fixed() && opts.mode.format().total_bits() == 8 &&
      uses_sigmoid(model.as<MLPModel>())) {
    const auto v = opts.sigmoid.value_or(SigmoidVariant::exact);
    if (v == SigmoidVariant::exact || v == SigmoidVariant::rational) {
      throw Unsupported("the " + sigmoid_name(v) + " sigmoid is not emitted for 8-bit formats");
    }
  }
}

std::string model_fingerprint(const ModelIR& model) { return hash_hex(serialize(model)); }

std::string gen_fixedpoint_runtime(const QFormat& fmt, const std::string& p) {
  const int total = fmt.total_bits();
  const int m = fmt.frac_bits();
  const std::string et = total == 32 ? "int32_t" : total == 16 ? "int16_t" : "int8_t";
  const std::string wt = total == 32 ? "int64_t" : "int32_t";
  const std::string uwt = total == 32 ? "uint64_t" : "uint32_t";
  const std::string P = upper(p);
  const std::string max = int_literal(fmt.raw_max());
  const std::string min = int_literal(fmt.raw_min());
  const std::int64_t one = std::min<std::int64_t>(std::int64_t{1} << m, fmt.raw_max());

  std::string o;
  o += "/* " + fmt.str() + " fixed-point runtime: " + std::to_string(total) + "-bit storage, " + wt +
       " intermediates, saturating, round half away from zero. */\n";
  o += "#define " + P + "_FRAC_BITS " + std::to_string(m) + "\n";
  o += "#define " + P + "_RAW_MAX ((" + wt + ")" + max + ")\n";
  o += "#define " + P + "_RAW_MIN ((" + wt + ")" + min + ")\n";
  o += "#define " + P + "_FX_ONE ((" + et + ")" + std::to_string(one) + ")\n\n";
  o += "#ifdef " + P + "_FX_COUNTERS\n";
  o += "typedef struct {\n  uint32_t ops;\n  uint32_t overflow;\n  uint32_t underflow;\n} " + p + "_fx_counters_t;\n";
  o += p + "_fx_counters_t " + p + "_fx_counters;\n";
  o += "#define " + P + "_FX_COUNT(field) (++" + p + "_fx_counters.field)\n";
  o += "#else\n#define " + P + "_FX_COUNT(field) ((void)0)\n#endif\n\n";

  o += "static inline " + et + " " + p + "_fx_sat(" + wt + " v) {\n";
  o += "  if (v > " + P + "_RAW_MAX) {\n    " + P + "_FX_COUNT(overflow);\n    return (" + et + ")" + P + "_RAW_MAX;\n  }\n";
  o += "  if (v < " + P + "_RAW_MIN) {\n    " + P + "_FX_COUNT(overflow);\n    return (" + et + ")" + P + "_RAW_MIN;\n  }\n";
  o += "  return (" + et + ")v;\n}\n\n";

  o += "static inline " + wt + " " + p + "_fx_rsh(" + wt + " v, int s) {\n";
  o += "  if (s <= 0) return v;\n";
  o += "  const " + uwt + " mag = v < 0 ? (" + uwt + ")0 - (" + uwt + ")v : (" + uwt + ")v;\n";
  o += "  const " + uwt + " r = (mag + ((" + uwt + ")1 << (s - 1))) >> s;\n";
  o += "  return v < 0 ? -(" + wt + ")r : (" + wt + ")r;\n}\n\n";

  o += "static inline int64_t " + p + "_fx_rsh64(int64_t v, int s) {\n";
  o += "  if (s <= 0) return v;\n";
  o += "  const uint64_t mag = v < 0 ? (uint64_t)0 - (uint64_t)v : (uint64_t)v;\n";
  o += "  const uint64_t r = (mag + ((uint64_t)1 << (s - 1))) >> s;\n";
  o += "  return v < 0 ? -(int64_t)r : (int64_t)r;\n}\n\n";

  o += "static inline " + et + " " + p + "_fx_add(" + et + " a, " + et + " b) {\n";
  o += "  " + P + "_FX_COUNT(ops);\n  return " + p + "_fx_sat((" + wt + ")a + (" + wt + ")b);\n}\n\n";
  o += "static inline " + et + " " + p + "_fx_sub(" + et + " a, " + et + " b) {\n";
  o += "  " + P + "_FX_COUNT(ops);\n  return " + p + "_fx_sat((" + wt + ")a - (" + wt + ")b);\n}\n\n";
  o += "static inline " + et + " " + p + "_fx_neg(" + et + " a) {\n";
  o += "  " + P + "_FX_COUNT(ops);\n  return " + p + "_fx_sat(-(" + wt + ")a);\n}\n\n";
  o += "static inline " + et + " " + p + "_fx_abs(" + et + " a) { return a < 0 ? " + p + "_fx_neg(a) : a; }\n\n";

  o += "static inline " + et + " " + p + "_fx_mul(" + et + " a, " + et + " b) {\n";
  o += "  " + P + "_FX_COUNT(ops);\n";
  o += "  const " + wt + " prod = (" + wt + ")a * (" + wt + ")b;\n";
  o += "  const " + wt + " r = " + p + "_fx_rsh(prod, " + P + "_FRAC_BITS);\n";
  o += "  if (r == 0 && prod != 0) " + P + "_FX_COUNT(underflow);\n";
  o += "  return " + p + "_fx_sat(r);\n}\n\n";

  o += "static inline " + et + " " + p + "_fx_div(" + et + " a, " + et + " b) {\n";
  o += "  if (b == 0) return a < 0 ? (" + et + ")" + P + "_RAW_MIN : (" + et + ")" + P + "_RAW_MAX;\n";
  o += "  " + P + "_FX_COUNT(ops);\n";
  o += "  const " + uwt + " num = (" + uwt + ")(a < 0 ? -(" + wt + ")a : (" + wt + ")a) << " + P + "_FRAC_BITS;\n";
  o += "  const " + uwt + " den = (" + uwt + ")(b < 0 ? -(" + wt + ")b : (" + wt + ")b);\n";
  o += "  const " + uwt + " q = (2u * num + den) / (2u * den);\n";
  o += "  const " + wt + " r = ((a < 0) != (b < 0)) ? -(" + wt + ")q : (" + wt + ")q;\n";
  o += "  if (r == 0 && a != 0) " + P + "_FX_COUNT(underflow);\n";
  o += "  return " + p + "_fx_sat(r);\n}\n\n";

  // exp: x = k ln2 + r, e^r by an 11-term Horner series in Q.30.
  o += "static inline " + et + " " + p + "_fx_exp(" + et + " x) {\n";
  o += "  " + P + "_FX_COUNT(ops);\n";
  o += "  if (x == 0) return " + p + "_fx_sat((" + wt + ")1 << " + P + "_FRAC_BITS);\n";
  if (m <= 30) {
    o += "  const int64_t xq = (int64_t)x * ((int64_t)1 << " + std::to_string(30 - m) + ");\n";
  } else {
    o += "  const int64_t xq = " + p + "_fx_rsh64((int64_t)x, " + std::to_string(m - 30) + ");\n";
  }
  o += "  const int64_t ln2 = 744261118;\n";
  o += "  const int64_t one = (int64_t)1 << 30;\n";
  o += "  int64_t k = xq / ln2;\n";
  o += "  if ((xq % ln2 != 0) && (xq < 0)) --k;\n";
  o += "  const int64_t r = xq - k * ln2;\n";
  o += "  int64_t e = one;\n";
  o += "  for (int i = 11; i >= 1; --i) {\n";
  o += "    const int64_t prod = (r * e + (one >> 1)) >> 30;\n";
  o += "    e = one + (prod + i / 2) / i;\n  }\n";
  o += "  if (k + " + P + "_FRAC_BITS >= " + std::to_string(total - 1) + ") {\n";
  o += "    " + P + "_FX_COUNT(overflow);\n    return (" + et + ")" + P + "_RAW_MAX;\n  }\n";
  o += "  const int64_t shift = 30 - " + P + "_FRAC_BITS - k;\n";
  o += "  int64_t out = 0;\n";
  o += "  if (shift < 62) out = " + p + "_fx_rsh64(e, (int)shift);\n";
  o += "  if (out == 0) " + P + "_FX_COUNT(underflow);\n";
  o += "  return " + p + "_fx_sat((" + wt + ")out);\n}\n\n";

  o += "static inline " + et + " " + p + "_fx_sqrt(" + et + " x) {\n";
  o += "  if (x < 0) return 0;\n";
  o += "  " + P + "_FX_COUNT(ops);\n";
  o += "  const uint64_t n = (uint64_t)x << " + P + "_FRAC_BITS;\n";
  o += "  uint64_t rem = n;\n  uint64_t res = 0;\n  uint64_t bit = (uint64_t)1 << 62;\n";
  o += "  while (bit > rem) bit >>= 2;\n";
  o += "  while (bit != 0) {\n    if (rem >= res + bit) {\n      rem -= res + bit;\n      res = (res >> 1) + bit;\n";
  o += "    } else {\n      res >>= 1;\n    }\n    bit >>= 2;\n  }\n";
  o += "  if (n - res * res > res) ++res;\n";
  o += "  return " + p + "_fx_sat((" + wt + ")res);\n}\n\n";

  o += "static inline " + et + " " + p + "_fx_pow(" + et + " x, unsigned k) {\n";
  o += "  " + et + " result = " + P + "_FX_ONE;\n  int have = 0;\n  " + et + " base = x;\n";
  o += "  while (k != 0u) {\n    if (k & 1u) {\n      result = have ? " + p + "_fx_mul(result, base) : base;\n";
  o += "      have = 1;\n    }\n    k >>= 1;\n    if (k != 0u) base = " + p + "_fx_mul(base, base);\n  }\n";
  o += "  return result;\n}\n\n";

  // Integer counts (vote totals) to raw, saturating and uncounted.
  o += "static inline " + et + " " + p + "_fx_from_int(int32_t n) {\n";
  o += "  const " + wt + " v = (" + wt + ")n * ((" + wt + ")1 << " + P + "_FRAC_BITS);\n";
  o += "  if (v > " + P + "_RAW_MAX) return (" + et + ")" + P + "_RAW_MAX;\n";
  o += "  if (v < " + P + "_RAW_MIN) return (" + et + ")" + P + "_RAW_MIN;\n";
  o += "  return (" + et + ")v;\n}\n\n";

  // Input conversion; v * 2^m is exact in single precision.
  o += et + " " + p + "_to_fixed(float v) {\n";
  o += "  " + P + "_FX_COUNT(ops);\n";
  o += "  if (v != v) return 0;\n";
  o += "  const float t = v * " + float_literal(std::ldexp(1.0f, m)) + ";\n";
  o += "  if ((double)t >= " + std::to_string(fmt.raw_max()) + ".5) {\n    " + P + "_FX_COUNT(overflow);\n    return (" +
       et + ")" + P + "_RAW_MAX;\n  }\n";
  o += "  if ((double)t <= " + std::to_string(fmt.raw_min()) + ".5) {\n    " + P + "_FX_COUNT(overflow);\n    return (" +
       et + ")" + P + "_RAW_MIN;\n  }\n";
  o += "  const int64_t whole = (int64_t)t;\n";
  o += "  const float frac = t - (float)whole;\n";
  o += "  int64_t r = whole;\n";
  o += "  if (frac >= 0.5f) {\n    ++r;\n  } else if (frac <= -0.5f) {\n    --r;\n  }\n";
  o += "  if (r == 0 && v != 0.0f) " + P + "_FX_COUNT(underflow);\n";
  o += "  return (" + et + ")r;\n}\n\n";
  return o;
}

std::string gen_tree(const ModelIR& model, const GenOptions& opts) {
  const Emitter e(model, opts);
  const auto& tree = model.as<TreeModel>();
  const TreeTables t = flatten_tree(tree);
  const std::string sig = "static int32_t " + e.p() + "_tree(const " + e.et() + "* x) {\n";
  if (t.internal_count == 0) {
    return sig + "  (void)x;\n  return " + std::to_string(t.root_class) + ";\n}\n\n";
  }
  std::string out = e.array(e.et(), "threshold", e.lits(t.threshold));
  const bool iterative = opts.tree_style.value_or(TreeStyle::iterative) == TreeStyle::iterative ||
                         if_else_fallback(model, opts);
  if (!iterative) {
    return out + "\n" + sig + emit_if_else(e, lower_tree(tree), 0, 1) + "}\n\n";
  }

  const std::string ft = narrowest_unsigned(static_cast<std::uint64_t>(model.n_features - 1));
  const std::string ct = narrowest_unsigned(static_cast<std::uint64_t>(t.internal_count + model.n_classes() - 1));
  std::vector<std::string> feat, left, right;
  for (int i = 0; i < t.internal_count; ++i) {
    feat.push_back(std::to_string(t.feature[i]));
    left.push_back(std::to_string(t.left[i]));
    right.push_back(std::to_string(t.right[i]));
  }
  out += e.array(ft, "feature", feat);
  // Child codes below the internal-node count continue the walk; code c >= count is class c - count.
  out += e.array(ct, "left", left);
  out += e.array(ct, "right", right);
  const std::string n = std::to_string(t.internal_count);
  out += "\n" + sig;
  out += "  uint32_t node = 0;\n  for (;;) {\n";
  out += "    const uint32_t next = (x[" + e.p() + "_feature[node]] <= " + e.p() + "_threshold[node]) ? " + e.p() +
         "_left[node] : " + e.p() + "_right[node];\n";
  out += "    if (next >= " + n + "u) return (int32_t)(next - " + n + "u);\n";
  out += "    node = next;\n  }\n}\n\n";
  return out;
}

std::string gen_linear(const ModelIR& model, const GenOptions& opts) {
  const Emitter e(model, opts);
  const auto& lin = model.as<LinearModel>();
  const std::size_t d = lin.weights.cols;
  std::vector<double> coef;
  for (std::size_t r = 0; r < lin.weights.rows; ++r) {
    coef.push_back(lin.bias[r]);
    const auto row = lin.weights.row(r);
    coef.insert(coef.end(), row.begin(), row.end());
  }
  const std::string T = e.et();
  const std::string stride = std::to_string(d + 1);
  std::string out = "/* row r: bias, then " + std::to_string(d) + " weights */\n";
  out += e.array(T, "coef", e.lits(coef)) + "\n";
  out += "static int32_t " + e.p() + "_eval(const " + T + "* x, " + T + "* scores) {\n";
  const std::string dot = "    acc = " + e.add("acc", e.mul("row[1 + j]", "x[j]")) + ";\n";
  if (lin.score_rule == ScoreRule::binary_sign) {
    out += "  const " + T + "* row = " + e.p() + "_coef;\n";
    out += "  " + T + " acc = row[0];\n";
    out += "  for (int32_t j = 0; j < " + std::to_string(d) + "; ++j) {\n" + dot + "  }\n";
    out += "  if (scores) {\n    scores[0] = " + e.zero() + ";\n    scores[1] = acc;\n  }\n";
    out += "  return acc > " + e.zero() + " ? 1 : 0;\n}\n\n";
    return out;
  }
  out += "  int32_t best = 0;\n  " + T + " best_score = " + e.zero() + ";\n";
  out += "  for (int32_t k = 0; k < " + std::to_string(lin.weights.rows) + "; ++k) {\n";
  out += "    const " + T + "* row = " + e.p() + "_coef + k * " + stride + ";\n";
  out += "    " + T + " acc = row[0];\n";
  out += "    for (int32_t j = 0; j < " + std::to_string(d) + "; ++j) {\n  " + dot + "    }\n";
  out += "    if (scores) scores[k] = acc;\n";
  out += "    if (k == 0 || acc > best_score) {\n      best = k;\n      best_score = acc;\n    }\n  }\n";
  out += "  return best;\n}\n\n";
  return out;
}

std::string gen_mlp(const ModelIR& model, const GenOptions& opts) {
  const Emitter e(model, opts);
  const auto& mlp = model.as<MLPModel>();
  const std::string T = e.et();
  const SigmoidVariant variant = opts.sigmoid.value_or(SigmoidVariant::exact);
  const bool need_sigmoid = uses_sigmoid(mlp);
  const bool need_relu = std::any_of(mlp.layers.begin(), mlp.layers.end(),
                                     [](const DenseLayer& l) { return l.activation == Activation::relu; });
  std::string out;
  std::size_t width = 0;
  for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
    const auto& l = mlp.layers[i];
    out += e.array(T, "w" + std::to_string(i), e.lits(l.weights.data));
    out += e.array(T, "b" + std::to_string(i), e.lits(l.bias));
    width = std::max(width, l.weights.rows);
  }
  out += "\n";
  if (need_sigmoid) out += gen_sigmoid(e, variant);

  // act: 0 identity, 1 sigmoid, 2 relu
  out += "static void " + e.p() + "_dense(const " + T + "* w, const " + T + "* b, const " + T + "* in, " + T +
         "* out, int32_t n_in, int32_t n_out, int32_t act) {\n";
  out += "  for (int32_t i = 0; i < n_out; ++i) {\n";
  out += "    " + T + " acc = b[i];\n";
  out += "    const " + T + "* row = w + i * n_in;\n";
  out += "    for (int32_t j = 0; j < n_in; ++j) {\n      acc = " + e.add("acc", e.mul("row[j]", "in[j]")) + ";\n    }\n";
  if (need_sigmoid) out += "    if (act == 1) acc = " + e.p() + "_sigmoid(acc);\n";
  if (need_relu) out += "    if (act == 2) acc = acc > " + e.zero() + " ? acc : " + e.zero() + ";\n";
  if (!need_sigmoid && !need_relu) out += "    (void)act;\n";
  out += "    out[i] = acc;\n  }\n}\n\n";

  out += "static int32_t " + e.p() + "_eval(const " + T + "* x, " + T + "* scores) {\n";
  out += "  " + T + " buf_a[" + std::to_string(width) + "];\n";
  out += "  " + T + " buf_b[" + std::to_string(width) + "];\n";
  std::string in = "x";
  for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
    const auto& l = mlp.layers[i];
    const std::string dst = i % 2 == 0 ? "buf_a" : "buf_b";
    const int act = l.activation == Activation::identity ? 0 : l.activation == Activation::sigmoid ? 1 : 2;
    out += "  " + e.p() + "_dense(" + e.p() + "_w" + std::to_string(i) + ", " + e.p() + "_b" + std::to_string(i) +
           ", " + in + ", " + dst + ", " + std::to_string(l.weights.cols) + ", " + std::to_string(l.weights.rows) +
           ", " + std::to_string(act) + ");\n";
    in = dst;
  }
  const auto& last = mlp.layers.back();
  if (last.weights.rows == 1) {
    const std::string thr = last.activation == Activation::sigmoid ? e.lit(0.5) : e.zero();
    out += "  if (scores) {\n    scores[0] = " + thr + ";\n    scores[1] = " + in + "[0];\n  }\n";
    out += "  return " + in + "[0] > " + thr + " ? 1 : 0;\n}\n\n";
  } else {
    out += scores_argmax(in, static_cast<int>(last.weights.rows)) + "}\n\n";
  }
  return out;
}

std::string gen_svm(const ModelIR& model, const GenOptions& opts) {
  const Emitter e(model, opts);
  const auto& svm = model.as<KernelSVMModel>();
  const std::string T = e.et();
  const std::string d = std::to_string(model.n_features);
  std::vector<double> sv, dual, intercept;
  for (const auto& m : svm.machines) {
    sv.insert(sv.end(), m.support_vectors.data.begin(), m.support_vectors.data.end());
    dual.insert(dual.end(), m.dual_coefs.begin(), m.dual_coefs.end());
    intercept.push_back(m.intercept);
  }
  std::string out;
  out += e.array(T, "sv", e.lits(sv));
  out += e.array(T, "dual", e.lits(dual));
  out += e.array(T, "intercept", e.lits(intercept)) + "\n";

  const std::string gamma = e.lit(svm.kernel.gamma);
  out += "static " + T + " " + e.p() + "_kernel(const " + T + "* sv, const " + T + "* x) {\n";
  out += "  " + T + " acc = " + e.zero() + ";\n";
  if (svm.kernel.type == KernelType::poly) {
    out += "  for (int32_t j = 0; j < " + d + "; ++j) {\n    acc = " + e.add("acc", e.mul("sv[j]", "x[j]")) + ";\n  }\n";
    out += "  return " + e.pow(e.add(e.mul(gamma, "acc"), e.lit(svm.kernel.coef0)), svm.kernel.degree) + ";\n}\n\n";
  } else {
    out += "  for (int32_t j = 0; j < " + d + "; ++j) {\n";
    out += "    const " + T + " diff = " + e.sub("sv[j]", "x[j]") + ";\n";
    out += "    acc = " + e.add("acc", e.mul("diff", "diff")) + ";\n  }\n";
    out += "  return " + e.exp(e.neg(e.mul(gamma, "acc"))) + ";\n}\n\n";
  }

  out += "static " + T + " " + e.p() + "_machine(const " + T + "* sv, const " + T + "* dual, " + T +
         " intercept, int32_t count, const " + T + "* x) {\n";
  out += "  " + T + " s = intercept;\n";
  out += "  for (int32_t i = 0; i < count; ++i) {\n";
  out += "    s = " + e.add("s", e.mul("dual[i]", e.p() + "_kernel(sv + i * " + d + ", x)")) + ";\n  }\n";
  out += "  return s;\n}\n\n";

  const int k = model.n_classes();
  out += "static int32_t " + e.p() + "_eval(const " + T + "* x, " + T + "* scores) {\n";
  out += "  int32_t votes[" + std::to_string(k) + "] = {0};\n";
  std::size_t offset = 0;
  for (std::size_t i = 0; i < svm.machines.size(); ++i) {
    const auto& m = svm.machines[i];
    out += "  if (" + e.p() + "_machine(" + e.p() + "_sv + " + std::to_string(offset * model.n_features) + ", " +
           e.p() + "_dual + " + std::to_string(offset) + ", " + e.p() + "_intercept[" + std::to_string(i) + "], " +
           std::to_string(m.support_vectors.rows) + ", x) > " + e.zero() + ") {\n";
    out += "    ++votes[" + std::to_string(m.class_a) + "];\n  } else {\n    ++votes[" + std::to_string(m.class_b) +
           "];\n  }\n";
    offset += m.support_vectors.rows;
  }
  out += "  if (scores) {\n    for (int32_t k = 0; k < " + std::to_string(k) + "; ++k) scores[k] = " +
         (e.fixed() ? e.p() + "_fx_from_int(votes[k])" : "(float)votes[k]") + ";\n  }\n";
  out += "  int32_t best = 0;\n  for (int32_t k = 1; k < " + std::to_string(k) + "; ++k) {\n";
  out += "    if (votes[k] > votes[best]) best = k;\n  }\n  return best;\n}\n\n";
  return out;
}

MemoryEstimate estimate_memory(const ModelIR& model, const GenOptions& opts) {
  MemoryEstimate est;
  est.elem_bytes = opts.mode.elem_bytes();
  const ModelStats stats = model_stats(model);
  est.param_bytes = stats.param_count * est.elem_bytes;
  switch (model.family()) {
    case Family::tree: {
      const bool iterative = opts.tree_style.value_or(TreeStyle::iterative) == TreeStyle::iterative ||
                             if_else_fallback(model, opts);
      const std::int64_t internal = stats.param_count;
      if (iterative && internal > 0) {
        const int fb = unsigned_bytes(static_cast<std::uint64_t>(model.n_features - 1));
        const int cb = unsigned_bytes(static_cast<std::uint64_t>(internal + model.n_classes() - 1));
        est.structural_bytes = internal * (fb + 2 * cb);
      }
      break;
    }
    case Family::mlp:
      est.sram_bytes = 2 * stats.max_layer_width * est.elem_bytes;
      break;
    case Family::kernel_svm:
      est.sram_bytes = static_cast<std::int64_t>(model.n_classes()) * 4;  // vote counters
      break;
    case Family::linear:
      break;
  }
  est.flash_const_bytes = est.param_bytes + est.structural_bytes;
  return est;
}

GeneratedSource generate(const ModelIR& model, const GenOptions& opts) {
  if (auto violations = validate(model); !violations.empty()) throw StructureError(std::move(violations));
  check_options(model, opts);

  GeneratedSource gs;
  gs.options_echo = opts;
  gs.model_fingerprint = model_fingerprint(model);
  gs.memory = estimate_memory(model, opts);
  if (if_else_fallback(model, opts)) {
    gs.warnings.push_back("tree depth " + std::to_string(tree_depth(model.as<TreeModel>())) + " exceeds " +
                          std::to_string(kMaxIfElseDepth) + "; emitted the iterative form instead of if-else");
  }

  const Emitter e(model, opts);
  const std::string& p = opts.symbol_prefix;
  const std::string T = e.et();
  const int k = model.n_classes();

  std::string text;
  text += "/*\n * Classifier generated by edgecc. Do not edit.\n";
  text += " * family: " + std::string(family_name(model.family())) + "\n";
  text += " * classes: " + std::to_string(k) + " (";
  for (int i = 0; i < k; ++i) {
    std::string label = model.class_labels[i];
    for (auto& c : label) {
      if (c == '*' || c == '\n' || c == '\r') c = '_';
    }
    text += (i ? ", " : "") + std::to_string(i) + "=" + label;
  }
  text += ")\n * features: " + std::to_string(model.n_features) + "\n";
  text += " * numeric mode: " + opts.mode.describe() + "\n";
  if (model.family() == Family::mlp) text += " * sigmoid: " + sigmoid_name(opts.sigmoid.value_or(SigmoidVariant::exact)) + "\n";
  if (model.family() == Family::tree) {
    const bool fallback = if_else_fallback(model, opts);
    text += " * tree style: " + tree_style_name(fallback ? TreeStyle::iterative : opts.tree_style.value_or(TreeStyle::iterative)) + "\n";
  }
  text += " * model fingerprint: " + gs.model_fingerprint + "\n";
  text += " * const data: " + std::to_string(gs.memory.flash_const_bytes) + " bytes, work buffers: " +
          std::to_string(gs.memory.sram_bytes) + " bytes\n */\n";
  text += "#include <stdint.h>\n\n";

  text += "int32_t " + p + "_classify(const " + T + "* x);\n";
  if (opts.emit_test_hook) text += "int32_t " + p + "_scores(const " + T + "* x, " + T + "* scores);\n";
  if (e.fixed()) text += T + " " + p + "_to_fixed(float v);\n";
  text += "\n";

  if (e.fixed()) {
    text += gen_fixedpoint_runtime(opts.mode.format(), p);
  } else {
    bool need_exp = false;
    bool need_pow = false;
    if (model.family() == Family::mlp) {
      need_exp = uses_sigmoid(model.as<MLPModel>()) && opts.sigmoid.value_or(SigmoidVariant::exact) == SigmoidVariant::exact;
    } else if (model.family() == Family::kernel_svm) {
      need_exp = model.as<KernelSVMModel>().kernel.type == KernelType::rbf;
      need_pow = !need_exp;
    }
    text += float_runtime(p, need_exp, need_pow);
  }

  switch (model.family()) {
    case Family::tree: {
      text += gen_tree(model, opts);
      const std::string one = e.lit(1.0);
      text += "static int32_t " + p + "_eval(const " + T + "* x, " + T + "* scores) {\n";
      text += "  const int32_t cls = " + p + "_tree(x);\n";
      text += "  if (scores) {\n    for (int32_t k = 0; k < " + std::to_string(k) + "; ++k) scores[k] = " + e.zero() +
              ";\n    scores[cls] = " + one + ";\n  }\n  return cls;\n}\n\n";
      break;
    }
    case Family::linear: text += gen_linear(model, opts); break;
    case Family::mlp: text += gen_mlp(model, opts); break;
    case Family::kernel_svm: text += gen_svm(model, opts); break;
  }

  text += "int32_t " + p + "_classify(const " + T + "* x) { return " + p + "_eval(x, 0); }\n";
  if (opts.emit_test_hook) {
    text += "\nint32_t " + p + "_scores(const " + T + "* x, " + T + "* scores) { return " + p + "_eval(x, scores); }\n";
  }

  gs.text = std::move(text);
  gs.text_hash = hash_hex(gs.text);
  return gs;
}

}  // namespace edgecc
