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

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "edgecc/codegen.hpp"
#include "edgecc/fixedpoint.hpp"
#include "edgecc/inference.hpp"

namespace {

using namespace edgecc;

ModelIR sample(const std::string& name) { return load_model(std::string(EDGECC_SAMPLES_DIR) + "/" + name); }

const char* kNames[] = {"tree.json", "linear.json", "mlp.json", "svm_rbf.json"};

NumericMode mode_of(int i) {
  return i == 0 ? NumericMode::flt() : i == 1 ? NumericMode::fxp32() : NumericMode::fxp16();
}

std::vector<std::vector<double>> inputs(int d, int n) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 7.0);
  std::vector<std::vector<double>> out(n, std::vector<double>(d));
  for (auto& x : out) {
    for (auto& v : x) v = u(rng);
  }
  return out;
}

void BM_Predict(benchmark::State& state) {
  const ModelIR m = sample(kNames[state.range(0)]);
  const NumericMode mode = mode_of(static_cast<int>(state.range(1)));
  const Predictor p(m, mode);
  const auto xs = inputs(m.n_features, 256);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(p.predict(xs[i++ & 255]).class_index);
  }
  state.SetLabel(std::string(kNames[state.range(0)]) + "/" + mode.name());
}
BENCHMARK(BM_Predict)->ArgsProduct({{0, 1, 2, 3}, {0, 1, 2}});

void BM_TreeStyle(benchmark::State& state) {
  const ModelIR m = sample("tree.json");
  const TreeStyle style = state.range(0) == 0 ? TreeStyle::iterative : TreeStyle::if_else;
  const Predictor p(m, NumericMode::fxp32(), SigmoidVariant::exact, style);
  const auto xs = inputs(m.n_features, 256);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(p.predict(xs[i++ & 255]).class_index);
  state.SetLabel(tree_style_name(style));
}
BENCHMARK(BM_TreeStyle)->Arg(0)->Arg(1);

void BM_Sigmoid(benchmark::State& state) {
  const auto v = static_cast<SigmoidVariant>(state.range(0));
  FixedContext ctx;
  std::int32_t raw = -8192;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sigmoid_eval(FixedValue{raw, QFormat::q22_10()}, v, ctx).raw);
    raw = raw >= 8192 ? -8192 : raw + 7;
  }
  state.SetLabel(sigmoid_name(v));
}
BENCHMARK(BM_Sigmoid)->DenseRange(0, 3);

void BM_FixedExp(benchmark::State& state) {
  OpCounters c;
  const FixedArith ar(QFormat::q22_10(), c);
  std::int32_t x = -10240;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ar.exp(x));
    x = x >= 10240 ? -10240 : x + 13;
  }
}
BENCHMARK(BM_FixedExp);

void BM_Generate(benchmark::State& state) {
  const ModelIR m = sample(kNames[state.range(0)]);
  GenOptions o;
  o.mode = NumericMode::fxp16();
  for (auto _ : state) benchmark::DoNotOptimize(generate(m, o).text.size());
  state.SetLabel(kNames[state.range(0)]);
}
BENCHMARK(BM_Generate)->DenseRange(0, 3);

}  // namespace

BENCHMARK_MAIN();
