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

#include "trainers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "edgecc/inference.hpp"
#include "rng.hpp"

namespace edgecc::testing {

namespace {

struct Scaling {
  std::vector<double> mean;
  std::vector<double> scale;
};

Scaling fit_scaling(const Dataset& ds) {
  const std::size_t d = ds.features.cols;
  Scaling s{std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
  const double n = double(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += ds.features(i, j) / n;
  }
  for (std::size_t j = 0; j < d; ++j) {
    double var = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) var += std::pow(ds.features(i, j) - s.mean[j], 2) / n;
    s.scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return s;
}

Matrix standardize(const Dataset& ds, const Scaling& s) {
  Matrix z = ds.features;
  for (std::size_t i = 0; i < z.rows; ++i) {
    for (std::size_t j = 0; j < z.cols; ++j) z(i, j) = (z(i, j) - s.mean[j]) / s.scale[j];
  }
  return z;
}

/// Rewrites weights/bias trained on standardized inputs to consume raw inputs.
void fold(Matrix& w, std::vector<double>& b, const Scaling& s) {
  for (std::size_t r = 0; r < w.rows; ++r) {
    for (std::size_t j = 0; j < w.cols; ++j) {
      w(r, j) /= s.scale[j];
      b[r] -= w(r, j) * s.mean[j];
    }
  }
}

void softmax_inplace(std::vector<double>& v) {
  const double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (auto& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (auto& x : v) x /= sum;
}

double gini(const std::vector<int>& counts, int total) {
  if (total == 0) return 0.0;
  double g = 1.0;
  for (int c : counts) {
    const double p = double(c) / total;
    g -= p * p;
  }
  return g;
}

struct TreeBuilder {
  const Dataset& ds;
  TreeParams p;
  int k;
  std::vector<TreeNode> nodes;

  int majority(const std::vector<std::size_t>& rows) const {
    std::vector<int> counts(k, 0);
    for (auto r : rows) ++counts[ds.labels[r]];
    return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  }

  int build(std::vector<std::size_t> rows, int depth) {
    const int index = static_cast<int>(nodes.size());
    std::vector<int> counts(k, 0);
    for (auto r : rows) ++counts[ds.labels[r]];
    const int n = static_cast<int>(rows.size());
    const double parent = gini(counts, n);
    int best_f = -1;
    double best_thr = 0.0;
    double best_score = parent - 1e-12;
    if (depth < p.max_depth && parent > 0.0 && n >= 2 * p.min_samples_leaf) {
      std::vector<std::size_t> order = rows;
      for (std::size_t f = 0; f < ds.features.cols; ++f) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
          const double va = ds.features(a, f), vb = ds.features(b, f);
          return va < vb || (va == vb && a < b);
        });
        std::vector<int> left(k, 0);
        std::vector<int> right = counts;
        for (int i = 0; i + 1 < n; ++i) {
          const int lab = ds.labels[order[i]];
          ++left[lab];
          --right[lab];
          const double v = ds.features(order[i], f);
          const double next = ds.features(order[i + 1], f);
          if (v == next || i + 1 < p.min_samples_leaf || n - i - 1 < p.min_samples_leaf) continue;
          const double score = (gini(left, i + 1) * (i + 1) + gini(right, n - i - 1) * (n - i - 1)) / n;
          if (score < best_score) {
            best_score = score;
            best_f = static_cast<int>(f);
            best_thr = 0.5 * (v + next);
          }
        }
      }
    }
    if (best_f < 0) {
      nodes.emplace_back(TreeLeaf{majority(rows)});
      return index;
    }
    nodes.emplace_back(TreeSplit{best_f, best_thr, 0, 0});
    std::vector<std::size_t> l, r;
    for (auto row : rows) (ds.features(row, best_f) <= best_thr ? l : r).push_back(row);
    const int li = build(std::move(l), depth + 1);
    const int ri = build(std::move(r), depth + 1);
    auto& s = std::get<TreeSplit>(nodes[index]);
    s.left = li;
    s.right = ri;
    return index;
  }
};

ModelIR shell(const Dataset& ds, const std::string& trainer) {
  ModelIR m;
  m.n_features = static_cast<int>(ds.features.cols);
  m.class_labels = ds.class_labels;
  m.metadata["trainer"] = trainer;
  m.metadata["dataset"] = ds.source_name;
  return m;
}

}  // namespace

ModelIR train_tree(const Dataset& ds, const TreeParams& p) {
  TreeBuilder b{ds, p, static_cast<int>(ds.class_labels.size()), {}};
  std::vector<std::size_t> rows(ds.size());
  std::iota(rows.begin(), rows.end(), 0);
  b.build(std::move(rows), 0);
  ModelIR m = shell(ds, "cart-gini");
  m.payload = TreeModel{std::move(b.nodes)};
  return m;
}

ModelIR train_logistic(const Dataset& ds, const LogisticParams& p) {
  const Scaling sc = fit_scaling(ds);
  const Matrix z = standardize(ds, sc);
  const std::size_t k = ds.class_labels.size();
  const std::size_t d = z.cols;
  const double n = double(ds.size());
  Matrix w(k, d);
  std::vector<double> b(k, 0.0);
  std::vector<double> prob(k);
  for (int epoch = 0; epoch < p.epochs; ++epoch) {
    Matrix gw(k, d);
    std::vector<double> gb(k, 0.0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      for (std::size_t c = 0; c < k; ++c) {
        double s = b[c];
        for (std::size_t j = 0; j < d; ++j) s += w(c, j) * z(i, j);
        prob[c] = s;
      }
      softmax_inplace(prob);
      for (std::size_t c = 0; c < k; ++c) {
        const double g = prob[c] - (static_cast<std::size_t>(ds.labels[i]) == c ? 1.0 : 0.0);
        gb[c] += g / n;
        for (std::size_t j = 0; j < d; ++j) gw(c, j) += g * z(i, j) / n;
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      b[c] -= p.learning_rate * gb[c];
      for (std::size_t j = 0; j < d; ++j) w(c, j) -= p.learning_rate * (gw(c, j) + p.l2 * w(c, j));
    }
  }
  fold(w, b, sc);
  ModelIR m = shell(ds, "softmax-gd");
  m.payload = LinearModel{std::move(w), std::move(b), ScoreRule::argmax_linear};
  return m;
}

ModelIR train_mlp(const Dataset& ds, const MlpParams& p) {
  const Scaling sc = fit_scaling(ds);
  const Matrix z = standardize(ds, sc);
  const std::size_t k = ds.class_labels.size();
  const std::size_t d = z.cols;
  const std::size_t h = static_cast<std::size_t>(p.hidden);
  Rng rng(p.seed);
  Matrix w1(h, d), w2(k, h);
  std::vector<double> b1(h, 0.0), b2(k, 0.0);
  for (auto& v : w1.data) v = rng.normal() / std::sqrt(double(d));
  for (auto& v : w2.data) v = rng.normal() / std::sqrt(double(h));

  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> hid(h), out(k), dout(k), dhid(h);
  for (int epoch = 0; epoch < p.epochs; ++epoch) {
    for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.below(static_cast<int>(i + 1))]);
    for (std::size_t start = 0; start < order.size(); start += p.batch) {
      const std::size_t end = std::min(order.size(), start + p.batch);
      Matrix g1(h, d), g2(k, h);
      std::vector<double> gb1(h, 0.0), gb2(k, 0.0);
      for (std::size_t t = start; t < end; ++t) {
        const std::size_t i = order[t];
        for (std::size_t u = 0; u < h; ++u) {
          double s = b1[u];
          for (std::size_t j = 0; j < d; ++j) s += w1(u, j) * z(i, j);
          hid[u] = 1.0 / (1.0 + std::exp(-s));
        }
        for (std::size_t c = 0; c < k; ++c) {
          double s = b2[c];
          for (std::size_t u = 0; u < h; ++u) s += w2(c, u) * hid[u];
          out[c] = s;
        }
        softmax_inplace(out);
        for (std::size_t c = 0; c < k; ++c) dout[c] = out[c] - (static_cast<std::size_t>(ds.labels[i]) == c ? 1.0 : 0.0);
        std::fill(dhid.begin(), dhid.end(), 0.0);
        for (std::size_t c = 0; c < k; ++c) {
          gb2[c] += dout[c];
          for (std::size_t u = 0; u < h; ++u) {
            g2(c, u) += dout[c] * hid[u];
            dhid[u] += dout[c] * w2(c, u);
          }
        }
        for (std::size_t u = 0; u < h; ++u) {
          const double g = dhid[u] * hid[u] * (1.0 - hid[u]);
          gb1[u] += g;
          for (std::size_t j = 0; j < d; ++j) g1(u, j) += g * z(i, j);
        }
      }
      const double scale = p.learning_rate / double(end - start);
      for (std::size_t u = 0; u < h; ++u) {
        b1[u] -= scale * gb1[u];
        for (std::size_t j = 0; j < d; ++j) w1(u, j) -= scale * g1(u, j) + p.learning_rate * p.l2 * w1(u, j);
      }
      for (std::size_t c = 0; c < k; ++c) {
        b2[c] -= scale * gb2[c];
        for (std::size_t u = 0; u < h; ++u) w2(c, u) -= scale * g2(c, u) + p.learning_rate * p.l2 * w2(c, u);
      }
    }
  }
  fold(w1, b1, sc);
  ModelIR m = shell(ds, "mlp-sgd");
  MLPModel mlp;
  mlp.layers.push_back(DenseLayer{std::move(w1), std::move(b1), Activation::sigmoid});
  mlp.layers.push_back(DenseLayer{std::move(w2), std::move(b2), Activation::identity});
  m.payload = std::move(mlp);
  return m;
}

double flt_accuracy(const ModelIR& model, const Dataset& ds) {
  const Predictor pr(model, NumericMode::flt());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (pr.predict(ds.features.row(i)).class_index == ds.labels[i]) ++correct;
  }
  return ds.size() ? double(correct) / double(ds.size()) : 0.0;
}

}  // namespace edgecc::testing
