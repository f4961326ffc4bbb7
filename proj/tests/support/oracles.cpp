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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>

#include "edgecc/float_kernels.hpp"

namespace edgecc::testing {

namespace {

OracleResult from_scores(std::vector<long double> scores) {
  OracleResult r;
  int best = 0;
  for (int i = 1; i < static_cast<int>(scores.size()); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  long double second = -INFINITY;
  long double mag = 0.0L;
  for (int i = 0; i < static_cast<int>(scores.size()); ++i) {
    if (i != best) second = std::max(second, scores[i]);
    mag = std::max(mag, std::fabs(scores[i]));
  }
  r.class_index = best;
  r.margin = scores[best] - second;
  r.scale = mag;
  r.scores = std::move(scores);
  return r;
}

int walk(const TreeModel& t, int node, std::span<const double> x, long double& margin) {
  if (const auto* leaf = std::get_if<TreeLeaf>(&t.nodes[node])) return leaf->class_index;
  const auto& s = std::get<TreeSplit>(t.nodes[node]);
  const long double diff = static_cast<long double>(x[s.feature]) - s.threshold;
  margin = std::min(margin, std::fabs(diff));
  return walk(t, diff <= 0 ? s.left : s.right, x, margin);
}

long double sigmoid(long double v) { return 1.0L / (1.0L + std::exp(-v)); }

}  // namespace

OracleResult oracle_tree(const ModelIR& model, std::span<const double> x) {
  OracleResult r;
  r.margin = INFINITY;
  r.class_index = walk(model.as<TreeModel>(), 0, x, r.margin);
  r.scores.assign(model.n_classes(), 0.0L);
  r.scores[r.class_index] = 1.0L;
  r.scale = 1.0L;
  return r;
}

OracleResult oracle_linear(const ModelIR& model, std::span<const double> x) {
  const auto& l = model.as<LinearModel>();
  std::vector<long double> s;
  for (std::size_t k = 0; k < l.weights.rows; ++k) {
    long double acc = l.bias[k];
    for (std::size_t j = 0; j < x.size(); ++j) acc += static_cast<long double>(l.weights(k, j)) * x[j];
    s.push_back(acc);
  }
  if (l.score_rule == ScoreRule::binary_sign) {
    OracleResult r;
    r.class_index = s[0] > 0 ? 1 : 0;
    r.scores = {0.0L, s[0]};
    r.margin = std::fabs(s[0]);
    r.scale = std::fabs(s[0]);
    return r;
  }
  return from_scores(std::move(s));
}

OracleResult oracle_mlp(const ModelIR& model, std::span<const double> x) {
  const auto& mlp = model.as<MLPModel>();
  std::vector<long double> a(x.begin(), x.end());
  for (const auto& layer : mlp.layers) {
    std::vector<long double> next(layer.weights.rows);
    for (std::size_t i = 0; i < layer.weights.rows; ++i) {
      long double acc = layer.bias[i];
      for (std::size_t j = 0; j < layer.weights.cols; ++j) acc += static_cast<long double>(layer.weights(i, j)) * a[j];
      if (layer.activation == Activation::sigmoid) acc = sigmoid(acc);
      if (layer.activation == Activation::relu) acc = std::max(acc, 0.0L);
      next[i] = acc;
    }
    a = std::move(next);
  }
  if (a.size() == 1) {
    const long double thr = mlp.layers.back().activation == Activation::sigmoid ? 0.5L : 0.0L;
    OracleResult r;
    r.class_index = a[0] > thr ? 1 : 0;
    r.scores = {thr, a[0]};
    r.margin = std::fabs(a[0] - thr);
    r.scale = std::fabs(a[0]);
    return r;
  }
  return from_scores(std::move(a));
}

OracleResult oracle_svm(const ModelIR& model, std::span<const double> x) {
  const auto& svm = model.as<KernelSVMModel>();
  std::vector<int> votes(model.n_classes(), 0);
  OracleResult r;
  r.margin = INFINITY;
  r.scale = 0.0L;
  for (const auto& m : svm.machines) {
    long double s = m.intercept;
    long double mag = std::fabs(s);
    for (std::size_t i = 0; i < m.support_vectors.rows; ++i) {
      long double k = 0.0L;
      if (svm.kernel.type == KernelType::poly) {
        long double dot = 0.0L;
        for (std::size_t j = 0; j < x.size(); ++j) dot += static_cast<long double>(m.support_vectors(i, j)) * x[j];
        k = std::pow(svm.kernel.gamma * dot + svm.kernel.coef0, static_cast<long double>(svm.kernel.degree));
      } else {
        long double d2 = 0.0L;
        for (std::size_t j = 0; j < x.size(); ++j) {
          const long double diff = static_cast<long double>(m.support_vectors(i, j)) - x[j];
          d2 += diff * diff;
        }
        k = std::exp(-svm.kernel.gamma * d2);
      }
      s += m.dual_coefs[i] * k;
      mag += std::fabs(m.dual_coefs[i] * k);
    }
    ++votes[s > 0 ? m.class_a : m.class_b];
    // Relative to the machine's own magnitude.
    r.margin = std::min(r.margin, std::fabs(s) / std::max(mag, 1.0L));
  }
  r.scale = 1.0L;
  int best = 0;
  for (int i = 1; i < model.n_classes(); ++i) {
    if (votes[i] > votes[best]) best = i;
  }
  r.class_index = best;
  for (int v : votes) r.scores.push_back(v);
  return r;
}

OracleResult oracle(const ModelIR& model, std::span<const double> x) {
  switch (model.family()) {
    case Family::tree: return oracle_tree(model, x);
    case Family::linear: return oracle_linear(model, x);
    case Family::mlp: return oracle_mlp(model, x);
    case Family::kernel_svm: return oracle_svm(model, x);
  }
  return {};
}

std::vector<float> naive_mlp_flt(const ModelIR& model, std::span<const double> x) {
  std::vector<float> a;
  for (double v : x) a.push_back(static_cast<float>(v));
  for (const auto& layer : model.as<MLPModel>().layers) {
    std::vector<float> next;
    for (std::size_t i = 0; i < layer.weights.rows; ++i) {
      float acc = static_cast<float>(layer.bias[i]);
      for (std::size_t j = 0; j < layer.weights.cols; ++j) acc = acc + static_cast<float>(layer.weights(i, j)) * a[j];
      if (layer.activation == Activation::sigmoid) acc = 1.0f / (1.0f + flt::exp(-acc));
      if (layer.activation == Activation::relu) acc = acc > 0.0f ? acc : 0.0f;
      next.push_back(acc);
    }
    a = std::move(next);
  }
  return a;
}

}  // namespace edgecc::testing
