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

// Single-precision kernels shared by the reference engine and the emitted
// FLT sources. Only +, -, *, / and comparisons are used so that host and
// generated code produce bit-identical results without <math.h>.

namespace edgecc::flt {

inline float exp(float x) {
  if (x > 88.0f) return 3.40282347e+38f;
  if (x < -87.0f) return 0.0f;
  const float kf = x * 1.44269504f;
  const int k = static_cast<int>(kf + (kf >= 0.0f ? 0.5f : -0.5f));
  const float kk = static_cast<float>(k);
  // Cody-Waite split of ln 2 keeps r exact for |k| <= 127.
  const float r = (x - kk * 0.693145751953125f) - kk * 1.42860677e-06f;
  const float p =
      1.0f + r * (1.0f + r * (0.5f + r * (0.166666672f + r * (0.0416666679f +
                                                               r * (0.00833333377f + r * 0.00138888892f)))));
  float s = 1.0f;
  float b = k >= 0 ? 2.0f : 0.5f;
  unsigned n = static_cast<unsigned>(k >= 0 ? k : -k);
  while (n != 0u) {
    if (n & 1u) s *= b;
    n >>= 1;
    if (n != 0u) b *= b;
  }
  return p * s;
}

inline float pow_int(float x, unsigned k) {
  float result = 1.0f;
  bool have = false;
  float base = x;
  while (k != 0u) {
    if (k & 1u) {
      result = have ? result * base : base;
      have = true;
    }
    k >>= 1;
    if (k != 0u) base = base * base;
  }
  return result;
}

}  // namespace edgecc::flt
