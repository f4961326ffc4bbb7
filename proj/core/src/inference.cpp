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

#include "edgecc/inference.hpp"

#include <cmath>
#include <variant>

#include "edgecc/float_kernels.hpp"
#include "edgecc/tree_lowering.hpp"

namespace edgecc {

std::string NumericMode::name() const {
  if (!fmt_) return "flt";
  return "fxp" + std::to_string(fmt_->total_bits());
}

std::string NumericMode::describe() const {
  if (!fmt_) return "flt";
  return name() + " (" + fmt_->str() + ")";
}

std::string sigmoid_name(SigmoidVariant v) {
  switch (v) {
    case SigmoidVariant::exact: return "exact";
    case SigmoidVariant::rational: return "rational";
    case SigmoidVariant::pwl2: return "pwl2";
    case SigmoidVariant::pwl4: return "pwl4";
  }
  return "?";
}

std::string tree_style_name(TreeStyle s) { return s == TreeStyle::iterative ? "iterative" : "if-else"; }

double Pwl4Knots::inner_y() { return 1.0 / (1.0 + std::exp(-inner_x)); }
double Pwl4Knots::outer_y() { return 1.0 / (1.0 + std::exp(-outer_x)); }

namespace {

// Numeric policies. Both expose the same operation set so every model family
// is written once; op order here is the contract the emitters reproduce.

struct FloatOps {
  using T = float;

  T constant(double v) const { return static_cast<float>(v); }
  T input(float v) const { return v; }
  T from_count(int n) const { return static_cast<float>(n); }
  double to_real(T v) const { return v; }

  T add(T a, T b) const { return a + b; }
  T sub(T a, T b) const { return a - b; }
  T neg(T a) const { return -a; }
  T abs(T a) const { return a < 0.0f ? -a : a; }
  T mul(T a, T b) const { return a * b; }
  T div(T a, T b) const { return a / b; }
  T exp(T a) const { return flt::exp(a); }
  T pow_int(T a, unsigned k) const { return flt::pow_int(a, k); }
};

struct FixedOps {
  using T = std::int32_t;

  FixedArith ar;

  FixedOps(QFormat fmt, OpCounters& c) : ar(fmt, c) {}

  T constant(double v) const { return quantize_constant(v, ar.format()); }
  T input(float v) const { return ar.quantize(v); }
  T from_count(int n) const { return quantize_constant(n, ar.format()); }
  double to_real(T v) const { return std::ldexp(double(v), -ar.format().frac_bits()); }

  T add(T a, T b) const { return ar.add(a, b); }
  T sub(T a, T b) const { return ar.sub(a, b); }
  T neg(T a) const { return ar.neg(a); }
  T abs(T a) const { return ar.abs(a); }
  T mul(T a, T b) const { return ar.mul(a, b); }
  T div(T a, T b) const { return ar.div(a, b); }
  T exp(T a) const { return ar.exp(a); }
  T pow_int(T a, unsigned k) const { return ar.pow_int(a, k); }
};

template <class T>
struct Consts {
  T zero{}, one{}, half{}, quarter{};
  // 4-point PWL: slopes, knot abscissae and knot values
  T s_inner{}, s_outer{};
  T x_in{}, x_out{}, x_in_neg{}, x_out_neg{};
  T y_in{}, y_in_neg{}, y_out{}, y_out_neg{};
};

template <class Ops>
Consts<typename Ops::T> make_consts(const Ops& ops) {
  Consts<typename Ops::T> c;
  c.zero = ops.constant(0.0);
  c.one = ops.constant(1.0);
  c.half = ops.constant(0.5);
  c.quarter = ops.constant(0.25);
  const double yi = Pwl4Knots::inner_y();
  const double yo = Pwl4Knots::outer_y();
  c.s_inner = ops.constant(yi - 0.5);
  c.s_outer = ops.constant((yo - yi) / (Pwl4Knots::outer_x - Pwl4Knots::inner_x));
  c.x_in = ops.constant(Pwl4Knots::inner_x);
  c.x_out = ops.constant(Pwl4Knots::outer_x);
  c.x_in_neg = ops.constant(-Pwl4Knots::inner_x);
  c.x_out_neg = ops.constant(-Pwl4Knots::outer_x);
  c.y_in = ops.add(c.half, c.s_inner);
  c.y_in_neg = ops.sub(c.half, c.s_inner);
  c.y_out = ops.constant(yo);
  c.y_out_neg = ops.constant(1.0 - yo);
  return c;
}

template <class Ops, class T = typename Ops::T>
T sigmoid(const Ops& ops, const Consts<T>& c, T x, SigmoidVariant v) {
  switch (v) {
    case SigmoidVariant::exact:
      return ops.div(c.one, ops.add(c.one, ops.exp(ops.neg(x))));
    case SigmoidVariant::rational:
      return ops.add(c.half, ops.mul(c.half, ops.div(x, ops.add(c.one, ops.abs(x)))));
    case SigmoidVariant::pwl2: {
      const T y = ops.add(ops.mul(c.quarter, x), c.half);
      if (y < c.zero) return c.zero;
      if (y > c.one) return c.one;
      return y;
    }
    case SigmoidVariant::pwl4: {
      if (x <= c.x_out_neg) return c.y_out_neg;
      if (x < c.x_in_neg) {
        const T y = ops.add(c.y_in_neg, ops.mul(c.s_outer, ops.add(x, c.one)));
        return y < c.y_out_neg ? c.y_out_neg : y;
      }
      if (x <= c.x_in) return ops.add(c.half, ops.mul(c.s_inner, x));
      if (x < c.x_out) {
        const T y = ops.add(c.y_in, ops.mul(c.s_outer, ops.sub(x, c.one)));
        return y > c.y_out ? c.y_out : y;
      }
      return c.y_out;
    }
  }
  return c.half;
}

template <class T>
int argmax(const std::vector<T>& v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

template <class T>
struct TreeData {
  std::vector<TreeNode> nodes;
  std::vector<T> node_threshold;  // per original node (unused for leaves)
  TreeProgram program;
  std::vector<T> slot_threshold;
};

template <class T>
struct LinearData {
  int rows = 0;
  ScoreRule rule = ScoreRule::argmax_linear;
  std::vector<T> weights;
  std::vector<T> bias;
};

template <class T>
struct LayerData {
  int in = 0;
  int out = 0;
  Activation act = Activation::identity;
  std::vector<T> weights;
  std::vector<T> bias;
};

template <class T>
struct MlpData {
  std::vector<LayerData<T>> layers;
  int max_width = 0;
};

template <class T>
struct MachineData {
  int class_a = 0;
  int class_b = 1;
  int count = 0;
  std::vector<T> sv;
  std::vector<T> dual;
  T intercept{};
};

template <class T>
struct SvmData {
  KernelType kernel = KernelType::rbf;
  T gamma{};
  T coef0{};
  unsigned degree = 1;
  std::vector<MachineData<T>> machines;
};

template <class T>
using FamilyData = std::variant<TreeData<T>, LinearData<T>, MlpData<T>, SvmData<T>>;

template <class Ops>
FamilyData<typename Ops::T> prepare(const ModelIR& model, const Ops& ops) {
  using T = typename Ops::T;
  auto convert = [&](std::span<const double> src) {
    std::vector<T> out;
    out.reserve(src.size());
    for (double v : src) out.push_back(ops.constant(v));
    return out;
  };

  switch (model.family()) {
    case Family::tree: {
      const auto& tree = model.as<TreeModel>();
      TreeData<T> d;
      d.nodes = tree.nodes;
      d.node_threshold.resize(tree.nodes.size(), T{});
      for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        if (const auto* s = std::get_if<TreeSplit>(&tree.nodes[i])) d.node_threshold[i] = ops.constant(s->threshold);
      }
      d.program = lower_tree(tree);
      d.slot_threshold = convert(flatten_tree(tree).threshold);
      return d;
    }
    case Family::linear: {
      const auto& lin = model.as<LinearModel>();
      LinearData<T> d;
      d.rows = static_cast<int>(lin.weights.rows);
      d.rule = lin.score_rule;
      d.weights = convert(lin.weights.data);
      d.bias = convert(lin.bias);
      return d;
    }
    case Family::mlp: {
      const auto& mlp = model.as<MLPModel>();
      MlpData<T> d;
      for (const auto& layer : mlp.layers) {
        LayerData<T> l;
        l.in = static_cast<int>(layer.weights.cols);
        l.out = static_cast<int>(layer.weights.rows);
        l.act = layer.activation;
        l.weights = convert(layer.weights.data);
        l.bias = convert(layer.bias);
        d.max_width = std::max(d.max_width, l.out);
        d.layers.push_back(std::move(l));
      }
      return d;
    }
    case Family::kernel_svm: {
      const auto& svm = model.as<KernelSVMModel>();
      SvmData<T> d;
      d.kernel = svm.kernel.type;
      d.gamma = ops.constant(svm.kernel.gamma);
      d.coef0 = ops.constant(svm.kernel.coef0);
      d.degree = static_cast<unsigned>(svm.kernel.degree);
      for (const auto& m : svm.machines) {
        MachineData<T> md;
        md.class_a = m.class_a;
        md.class_b = m.class_b;
        md.count = static_cast<int>(m.support_vectors.rows);
        md.sv = convert(m.support_vectors.data);
        md.dual = convert(m.dual_coefs);
        md.intercept = ops.constant(m.intercept);
        d.machines.push_back(std::move(md));
      }
      return d;
    }
  }
  throw Error("unknown model family");
}

template <class T>
int run_program(const TreeData<T>& d, std::span<const T> x, int stmt) {
  const auto& s = d.program.stmts[stmt];
  if (s.is_return) return s.class_index;
  return run_program(d, x, x[s.feature] <= d.slot_threshold[s.slot] ? s.then_stmt : s.else_stmt);
}

template <class Ops, class T = typename Ops::T>
int run_family(const TreeData<T>& d, const Ops& ops, const Consts<T>& c, std::span<const T> x, int k_classes,
               TreeStyle style, SigmoidVariant, std::vector<T>& scores) {
  (void)ops;
  int cls = 0;
  if (style == TreeStyle::if_else && d.program.depth <= kMaxIfElseDepth) {
    cls = run_program(d, x, 0);
  } else {
    int node = 0;
    while (const auto* split = std::get_if<TreeSplit>(&d.nodes[node])) {
      node = x[split->feature] <= d.node_threshold[node] ? split->left : split->right;
    }
    cls = std::get<TreeLeaf>(d.nodes[node]).class_index;
  }
  scores.assign(k_classes, c.zero);
  scores[cls] = c.one;
  return cls;
}

template <class Ops, class T = typename Ops::T>
int run_family(const LinearData<T>& d, const Ops& ops, const Consts<T>& c, std::span<const T> x, int k_classes,
               TreeStyle, SigmoidVariant, std::vector<T>& scores) {
  const std::size_t n = x.size();
  std::vector<T> acc(d.rows);
  for (int k = 0; k < d.rows; ++k) {
    T a = d.bias[k];
    for (std::size_t j = 0; j < n; ++j) a = ops.add(a, ops.mul(d.weights[k * n + j], x[j]));
    acc[k] = a;
  }
  if (d.rule == ScoreRule::binary_sign) {
    scores = {c.zero, acc[0]};
    return acc[0] > c.zero ? 1 : 0;
  }
  (void)k_classes;
  scores = std::move(acc);
  return argmax(scores);
}

template <class Ops, class T = typename Ops::T>
int run_family(const MlpData<T>& d, const Ops& ops, const Consts<T>& c, std::span<const T> x, int,
               TreeStyle, SigmoidVariant variant, std::vector<T>& scores) {
  // Two ping-pong buffers sized to the widest layer output.
  std::vector<T> buf[2] = {std::vector<T>(d.max_width), std::vector<T>(d.max_width)};
  std::span<const T> in = x;
  int which = 0;
  for (const auto& layer : d.layers) {
    T* out = buf[which].data();
    for (int i = 0; i < layer.out; ++i) {
      T a = layer.bias[i];
      const T* w = layer.weights.data() + static_cast<std::size_t>(i) * layer.in;
      for (int j = 0; j < layer.in; ++j) a = ops.add(a, ops.mul(w[j], in[j]));
      switch (layer.act) {
        case Activation::sigmoid: a = sigmoid(ops, c, a, variant); break;
        case Activation::relu: a = a > c.zero ? a : c.zero; break;
        case Activation::identity: break;
      }
      out[i] = a;
    }
    in = std::span<const T>(out, layer.out);
    which ^= 1;
  }
  if (in.size() == 1) {
    const T threshold = d.layers.back().act == Activation::sigmoid ? c.half : c.zero;
    scores = {threshold, in[0]};
    return in[0] > threshold ? 1 : 0;
  }
  scores.assign(in.begin(), in.end());
  return argmax(scores);
}

template <class Ops, class T = typename Ops::T>
T kernel_value(const SvmData<T>& d, const Ops& ops, const T* sv, std::span<const T> x) {
  T acc{};
  if (d.kernel == KernelType::poly) {
    for (std::size_t j = 0; j < x.size(); ++j) acc = ops.add(acc, ops.mul(sv[j], x[j]));
    return ops.pow_int(ops.add(ops.mul(d.gamma, acc), d.coef0), d.degree);
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    const T diff = ops.sub(sv[j], x[j]);
    acc = ops.add(acc, ops.mul(diff, diff));
  }
  return ops.exp(ops.neg(ops.mul(d.gamma, acc)));
}

template <class Ops, class T = typename Ops::T>
int run_family(const SvmData<T>& d, const Ops& ops, const Consts<T>& c, std::span<const T> x, int k_classes,
               TreeStyle, SigmoidVariant, std::vector<T>& scores) {
  std::vector<int> votes(k_classes, 0);
  for (const auto& m : d.machines) {
    T s = m.intercept;
    for (int i = 0; i < m.count; ++i) {
      const T kv = kernel_value(d, ops, m.sv.data() + static_cast<std::size_t>(i) * x.size(), x);
      s = ops.add(s, ops.mul(m.dual[i], kv));
    }
    ++votes[s > c.zero ? m.class_a : m.class_b];
  }
  scores.clear();
  for (int v : votes) scores.push_back(ops.from_count(v));
  return argmax(votes);
}

}  // namespace

struct Predictor::Impl {
  ModelIR model;
  SigmoidVariant sigmoid;
  TreeStyle style;
  std::variant<FamilyData<float>, FamilyData<std::int32_t>> data;
  std::variant<Consts<float>, Consts<std::int32_t>> consts;
};

Predictor::Predictor(const ModelIR& model, NumericMode mode, SigmoidVariant sigmoid, TreeStyle tree_style)
    : mode_(mode),
      n_features_(model.n_features),
      n_classes_(model.n_classes()),
      impl_(std::make_unique<Impl>()) {
  impl_->model = model;
  impl_->sigmoid = sigmoid;
  impl_->style = tree_style;
  if (mode.is_fixed()) {
    OpCounters scratch;
    FixedOps ops(mode.format(), scratch);
    impl_->data = prepare(model, ops);
    impl_->consts = make_consts(ops);
  } else {
    FloatOps ops;
    impl_->data = prepare(model, ops);
    impl_->consts = make_consts(ops);
  }
}

Predictor::~Predictor() = default;
Predictor::Predictor(Predictor&&) noexcept = default;
Predictor& Predictor::operator=(Predictor&&) noexcept = default;

namespace {

template <class Ops>
Prediction run(const Ops& ops, const FamilyData<typename Ops::T>& data, const Consts<typename Ops::T>& c,
               std::span<const double> x, int k_classes, TreeStyle style, SigmoidVariant variant) {
  using T = typename Ops::T;
  std::vector<T> xin;
  xin.reserve(x.size());
  for (double v : x) xin.push_back(ops.input(static_cast<float>(v)));

  std::vector<T> scores;
  Prediction p;
  p.class_index = std::visit(
      [&](const auto& d) { return run_family(d, ops, c, std::span<const T>(xin), k_classes, style, variant, scores); },
      data);
  for (T s : scores) {
    p.scores.push_back(ops.to_real(s));
    if constexpr (std::is_same_v<T, std::int32_t>) p.raw_scores.push_back(s);
  }
  return p;
}

}  // namespace

Prediction Predictor::predict(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_features_) {
    throw DimensionMismatch("expected " + std::to_string(n_features_) + " features, got " +
                            std::to_string(x.size()));
  }
  if (mode_.is_fixed()) {
    OpCounters counters;
    FixedOps ops(mode_.format(), counters);
    Prediction p = run(ops, std::get<1>(impl_->data), std::get<1>(impl_->consts), x, n_classes_, impl_->style,
                       impl_->sigmoid);
    p.counters = counters;
    return p;
  }
  return run(FloatOps{}, std::get<0>(impl_->data), std::get<0>(impl_->consts), x, n_classes_, impl_->style,
             impl_->sigmoid);
}

namespace {

void require_family(const ModelIR& model, Family f) {
  if (model.family() != f) {
    throw Unsupported("expected a " + std::string(family_name(f)) + " model, got " +
                      std::string(family_name(model.family())));
  }
}

}  // namespace

Prediction predict_tree(const ModelIR& model, std::span<const double> x, NumericMode mode, TreeStyle style) {
  require_family(model, Family::tree);
  return Predictor(model, mode, SigmoidVariant::exact, style).predict(x);
}

Prediction predict_linear(const ModelIR& model, std::span<const double> x, NumericMode mode) {
  require_family(model, Family::linear);
  return Predictor(model, mode).predict(x);
}

Prediction predict_mlp(const ModelIR& model, std::span<const double> x, NumericMode mode, SigmoidVariant variant) {
  require_family(model, Family::mlp);
  return Predictor(model, mode, variant).predict(x);
}

Prediction predict_svm_kernel(const ModelIR& model, std::span<const double> x, NumericMode mode) {
  require_family(model, Family::kernel_svm);
  return Predictor(model, mode).predict(x);
}

float sigmoid_eval(float x, SigmoidVariant variant) {
  static const Consts<float> c = make_consts(FloatOps{});
  return sigmoid(FloatOps{}, c, x, variant);
}

FixedValue sigmoid_eval(FixedValue x, SigmoidVariant variant, FixedContext& ctx) {
  OpCounters scratch;
  const Consts<std::int32_t> c = make_consts(FixedOps(x.format, scratch));
  FixedOps ops(x.format, ctx.counters);
  return {sigmoid(ops, c, x.raw, variant), x.format};
}

}  // namespace edgecc
