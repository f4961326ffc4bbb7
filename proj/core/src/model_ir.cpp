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

#include "edgecc/model_ir.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace edgecc {

using nlohmann::json;

std::string_view family_name(Family f) noexcept {
  switch (f) {
    case Family::tree: return "tree";
    case Family::linear: return "linear";
    case Family::mlp: return "mlp";
    case Family::kernel_svm: return "kernel_svm";
  }
  return "?";
}

std::string_view activation_name(Activation a) noexcept {
  switch (a) {
    case Activation::sigmoid: return "sigmoid";
    case Activation::relu: return "relu";
    case Activation::identity: return "identity";
  }
  return "?";
}

namespace {

// ---------------------------------------------------------------------------
// Decoding helpers; every accessor names the full field path on failure.

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& field(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.is_object()) throw SchemaError(path.empty() ? "<root>" : path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(join(path, key), "missing required field");
  return *it;
}

double get_real(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  return v.get<double>();
}

long long get_int(const json& v, const std::string& path) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9.0e15) return static_cast<long long>(d);
  }
  throw SchemaError(path, "expected an integer");
}

int get_index(const json& v, const std::string& path) {
  const long long i = get_int(v, path);
  if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max()) {
    throw SchemaError(path, "integer out of range");
  }
  return static_cast<int>(i);
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "expected a string");
  return v.get<std::string>();
}

const json& get_array(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected an array");
  return v;
}

std::vector<double> get_vector(const json& v, const std::string& path) {
  const json& arr = get_array(v, path);
  std::vector<double> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(get_real(arr[i], at(path, i)));
  return out;
}

// Rows must be equally long; a ragged matrix is a schema error.
Matrix get_matrix(const json& v, const std::string& path) {
  const json& arr = get_array(v, path);
  Matrix m;
  m.rows = arr.size();
  for (std::size_t r = 0; r < arr.size(); ++r) {
    auto row = get_vector(arr[r], at(path, r));
    if (r == 0) {
      m.cols = row.size();
    } else if (row.size() != m.cols) {
      throw SchemaError(at(path, r), "ragged matrix: expected " + std::to_string(m.cols) + " columns, got " +
                                         std::to_string(row.size()));
    }
    m.data.insert(m.data.end(), row.begin(), row.end());
  }
  return m;
}

int class_ref(const json& v, const std::string& path, const std::vector<std::string>& labels) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    const auto it = std::find(labels.begin(), labels.end(), s);
    if (it == labels.end()) throw SchemaError(path, "unknown class label \"" + s + "\"");
    return static_cast<int>(it - labels.begin());
  }
  return get_index(v, path);
}

TreeModel decode_tree(const json& p, const std::string& path, const std::vector<std::string>& labels) {
  TreeModel t;
  const std::string npath = join(path, "nodes");
  const json& nodes = get_array(field(p, path, "nodes"), npath);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string ip = at(npath, i);
    const json& n = nodes[i];
    if (!n.is_object()) throw SchemaError(ip, "expected an object");
    if (n.contains("leaf")) {
      t.nodes.emplace_back(TreeLeaf{class_ref(n["leaf"], join(ip, "leaf"), labels)});
    } else {
      TreeSplit s;
      s.feature = get_index(field(n, ip, "feature"), join(ip, "feature"));
      s.threshold = get_real(field(n, ip, "threshold"), join(ip, "threshold"));
      s.left = get_index(field(n, ip, "left"), join(ip, "left"));
      s.right = get_index(field(n, ip, "right"), join(ip, "right"));
      t.nodes.emplace_back(s);
    }
  }
  return t;
}

LinearModel decode_linear(const json& p, const std::string& path) {
  LinearModel m;
  const std::string rule = get_string(field(p, path, "score_rule"), join(path, "score_rule"));
  if (rule == "argmax_linear") {
    m.score_rule = ScoreRule::argmax_linear;
  } else if (rule == "binary_sign") {
    m.score_rule = ScoreRule::binary_sign;
  } else {
    throw SchemaError(join(path, "score_rule"), "expected \"argmax_linear\" or \"binary_sign\"");
  }
  m.weights = get_matrix(field(p, path, "weights"), join(path, "weights"));
  m.bias = get_vector(field(p, path, "bias"), join(path, "bias"));
  return m;
}

Activation decode_activation(const json& v, const std::string& path) {
  const std::string s = get_string(v, path);
  if (s == "sigmoid" || s == "logistic") return Activation::sigmoid;
  if (s == "relu") return Activation::relu;
  if (s == "identity") return Activation::identity;
  throw SchemaError(path, "expected \"sigmoid\", \"relu\" or \"identity\"");
}

MLPModel decode_mlp(const json& p, const std::string& path) {
  MLPModel m;
  const std::string lpath = join(path, "layers");
  const json& layers = get_array(field(p, path, "layers"), lpath);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string ip = at(lpath, i);
    DenseLayer l;
    l.weights = get_matrix(field(layers[i], ip, "weights"), join(ip, "weights"));
    l.bias = get_vector(field(layers[i], ip, "bias"), join(ip, "bias"));
    l.activation = decode_activation(field(layers[i], ip, "activation"), join(ip, "activation"));
    m.layers.push_back(std::move(l));
  }
  return m;
}

KernelSVMModel decode_svm(const json& p, const std::string& path) {
  KernelSVMModel m;
  const std::string kpath = join(path, "kernel");
  const json& k = field(p, path, "kernel");
  const std::string type = get_string(field(k, kpath, "type"), join(kpath, "type"));
  m.kernel.gamma = get_real(field(k, kpath, "gamma"), join(kpath, "gamma"));
  if (type == "poly") {
    m.kernel.type = KernelType::poly;
    m.kernel.coef0 = get_real(field(k, kpath, "coef0"), join(kpath, "coef0"));
    m.kernel.degree = get_index(field(k, kpath, "degree"), join(kpath, "degree"));
  } else if (type == "rbf") {
    m.kernel.type = KernelType::rbf;
    m.kernel.coef0 = Kernel{}.coef0;
    m.kernel.degree = Kernel{}.degree;
  } else {
    throw SchemaError(join(kpath, "type"), "expected \"poly\" or \"rbf\"");
  }
  const std::string mpath = join(path, "machines");
  const json& machines = get_array(field(p, path, "machines"), mpath);
  for (std::size_t i = 0; i < machines.size(); ++i) {
    const std::string ip = at(mpath, i);
    BinaryMachine b;
    b.class_a = get_index(field(machines[i], ip, "class_a"), join(ip, "class_a"));
    b.class_b = get_index(field(machines[i], ip, "class_b"), join(ip, "class_b"));
    b.support_vectors = get_matrix(field(machines[i], ip, "support_vectors"), join(ip, "support_vectors"));
    b.dual_coefs = get_vector(field(machines[i], ip, "dual_coefs"), join(ip, "dual_coefs"));
    b.intercept = get_real(field(machines[i], ip, "intercept"), join(ip, "intercept"));
    m.machines.push_back(std::move(b));
  }
  return m;
}

void check_version(const json& doc) {
  const auto it = doc.find("schema_version");
  if (it == doc.end()) return;
  long long major = 0;
  if (it->is_number()) {
    major = static_cast<long long>(std::floor(it->get<double>()));
  } else if (it->is_string()) {
    const auto s = it->get<std::string>();
    try {
      major = std::stoll(s.substr(0, s.find('.')));
    } catch (const std::exception&) {
      throw SchemaError("schema_version", "unreadable version \"" + s + "\"");
    }
  } else {
    throw SchemaError("schema_version", "expected a number or a string");
  }
  if (major != kSchemaVersion) {
    throw SchemaError("schema_version", "unsupported major version " + std::to_string(major));
  }
}

// ---------------------------------------------------------------------------
// Validation

struct Checker {
  std::vector<Violation> out;
  void fail(std::string type, std::string field, std::string rule) {
    out.push_back({std::move(type), std::move(field), std::move(rule)});
  }
  void finite(const std::string& type, const std::string& field, std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i])) {
        fail(type, field + "[" + std::to_string(i) + "]", "values must be finite");
        return;
      }
    }
  }
};

void validate_tree(const ModelIR& m, const TreeModel& t, Checker& c) {
  const int n = static_cast<int>(t.nodes.size());
  if (n == 0) {
    c.fail("TreeModel", "nodes", "at least one node");
    return;
  }
  std::vector<int> parents(n, 0);
  for (int i = 0; i < n; ++i) {
    const std::string f = "nodes[" + std::to_string(i) + "]";
    if (const auto* leaf = std::get_if<TreeLeaf>(&t.nodes[i])) {
      if (leaf->class_index < 0 || leaf->class_index >= m.n_classes()) c.fail("TreeNode", f + ".leaf", "class index in range");
      continue;
    }
    const auto& s = std::get<TreeSplit>(t.nodes[i]);
    if (s.feature < 0 || s.feature >= m.n_features) c.fail("TreeNode", f + ".feature", "feature index in range");
    if (!std::isfinite(s.threshold)) c.fail("TreeNode", f + ".threshold", "values must be finite");
    for (auto [name, child] : {std::pair{"left", s.left}, std::pair{"right", s.right}}) {
      if (child <= i || child >= n) {
        c.fail("TreeNode", f + "." + name, "topological order (child index greater than parent, within bounds)");
      } else {
        ++parents[child];
      }
    }
  }
  for (int i = 1; i < n; ++i) {
    if (parents[i] != 1) {
      c.fail("TreeModel", "nodes[" + std::to_string(i) + "]",
             parents[i] == 0 ? "reachable from root" : "exactly one parent");
    }
  }
}

void validate_linear(const ModelIR& m, const LinearModel& l, Checker& c) {
  const std::size_t want_rows = l.score_rule == ScoreRule::binary_sign ? 1 : static_cast<std::size_t>(m.n_classes());
  if (l.score_rule == ScoreRule::binary_sign && m.n_classes() != 2) c.fail("LinearModel", "score_rule", "binary_sign requires two classes");
  if (l.weights.rows != want_rows) c.fail("LinearModel", "weights", "row count matches classes");
  if (l.weights.cols != static_cast<std::size_t>(m.n_features)) c.fail("LinearModel", "weights", "column count equals n_features");
  if (l.bias.size() != l.weights.rows) c.fail("LinearModel", "bias", "bias length equals row count");
  c.finite("LinearModel", "weights", l.weights.data);
  c.finite("LinearModel", "bias", l.bias);
}

void validate_mlp(const ModelIR& m, const MLPModel& mlp, Checker& c) {
  if (mlp.layers.empty()) {
    c.fail("MLPModel", "layers", "at least one layer");
    return;
  }
  for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
    const auto& l = mlp.layers[i];
    const std::string f = "layers[" + std::to_string(i) + "]";
    if (l.weights.rows == 0 || l.weights.cols == 0) c.fail("MLPModel", f + ".weights", "non-empty layer");
    if (l.bias.size() != l.weights.rows) c.fail("MLPModel", f + ".bias", "bias length equals layer output size");
    if (i == 0 && l.weights.cols != static_cast<std::size_t>(m.n_features)) {
      c.fail("MLPModel", f + ".weights", "first layer input size equals n_features");
    }
    if (i > 0 && l.weights.cols != mlp.layers[i - 1].weights.rows) {
      c.fail("MLPModel", f + ".weights", "layer dimension chain");
    }
    c.finite("MLPModel", f + ".weights", l.weights.data);
    c.finite("MLPModel", f + ".bias", l.bias);
  }
  const std::size_t last = mlp.layers.back().weights.rows;
  const bool ok = last == static_cast<std::size_t>(m.n_classes()) || (last == 1 && m.n_classes() == 2);
  if (!ok) c.fail("MLPModel", "layers[" + std::to_string(mlp.layers.size() - 1) + "].weights", "last layer output size equals class count");
}

void validate_svm(const ModelIR& m, const KernelSVMModel& s, Checker& c) {
  if (!std::isfinite(s.kernel.gamma)) c.fail("KernelSVMModel", "kernel.gamma", "values must be finite");
  if (!std::isfinite(s.kernel.coef0)) c.fail("KernelSVMModel", "kernel.coef0", "values must be finite");
  if (s.kernel.type == KernelType::poly && s.kernel.degree < 1) c.fail("KernelSVMModel", "kernel.degree", "degree is a positive integer");
  if (s.machines.empty()) c.fail("KernelSVMModel", "machines", "at least one machine");
  std::set<std::pair<int, int>> seen;
  for (std::size_t i = 0; i < s.machines.size(); ++i) {
    const auto& b = s.machines[i];
    const std::string f = "machines[" + std::to_string(i) + "]";
    const int k = m.n_classes();
    if (b.class_a < 0 || b.class_a >= k || b.class_b < 0 || b.class_b >= k) c.fail("BinaryMachine", f, "class index in range");
    if (b.class_a >= b.class_b) c.fail("BinaryMachine", f, "class_a < class_b");
    if (!seen.insert({b.class_a, b.class_b}).second) c.fail("KernelSVMModel", f, "pair appears at most once");
    if (b.support_vectors.rows < 1) c.fail("BinaryMachine", f + ".support_vectors", "at least one support vector");
    if (b.support_vectors.rows >= 1 && b.support_vectors.cols != static_cast<std::size_t>(m.n_features)) {
      c.fail("BinaryMachine", f + ".support_vectors", "column count equals n_features");
    }
    if (b.dual_coefs.size() != b.support_vectors.rows) c.fail("BinaryMachine", f + ".dual_coefs", "one coefficient per support vector");
    c.finite("BinaryMachine", f + ".support_vectors", b.support_vectors.data);
    c.finite("BinaryMachine", f + ".dual_coefs", b.dual_coefs);
    if (!std::isfinite(b.intercept)) c.fail("BinaryMachine", f + ".intercept", "values must be finite");
  }
}

// ---------------------------------------------------------------------------
// Encoding

json encode_matrix(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    const auto row = m.row(r);
    rows.push_back(json(std::vector<double>(row.begin(), row.end())));
  }
  return rows;
}

json encode_payload(const ModelIR& m) {
  json p = json::object();
  switch (m.family()) {
    case Family::tree: {
      json nodes = json::array();
      for (const auto& n : m.as<TreeModel>().nodes) {
        if (const auto* leaf = std::get_if<TreeLeaf>(&n)) {
          nodes.push_back({{"leaf", leaf->class_index}});
        } else {
          const auto& s = std::get<TreeSplit>(n);
          nodes.push_back({{"feature", s.feature}, {"threshold", s.threshold}, {"left", s.left}, {"right", s.right}});
        }
      }
      p["nodes"] = std::move(nodes);
      break;
    }
    case Family::linear: {
      const auto& l = m.as<LinearModel>();
      p["score_rule"] = l.score_rule == ScoreRule::binary_sign ? "binary_sign" : "argmax_linear";
      p["weights"] = encode_matrix(l.weights);
      p["bias"] = l.bias;
      break;
    }
    case Family::mlp: {
      json layers = json::array();
      for (const auto& l : m.as<MLPModel>().layers) {
        layers.push_back({{"weights", encode_matrix(l.weights)},
                          {"bias", l.bias},
                          {"activation", std::string(activation_name(l.activation))}});
      }
      p["layers"] = std::move(layers);
      break;
    }
    case Family::kernel_svm: {
      const auto& s = m.as<KernelSVMModel>();
      json k = {{"type", s.kernel.type == KernelType::poly ? "poly" : "rbf"}, {"gamma", s.kernel.gamma}};
      if (s.kernel.type == KernelType::poly) {
        k["coef0"] = s.kernel.coef0;
        k["degree"] = s.kernel.degree;
      }
      json machines = json::array();
      for (const auto& b : s.machines) {
        machines.push_back({{"class_a", b.class_a},
                            {"class_b", b.class_b},
                            {"support_vectors", encode_matrix(b.support_vectors)},
                            {"dual_coefs", b.dual_coefs},
                            {"intercept", b.intercept}});
      }
      p["kernel"] = std::move(k);
      p["machines"] = std::move(machines);
      break;
    }
  }
  return p;
}

}  // namespace

ModelIR parse_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SchemaError("<root>", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("<root>", "expected an object");
  check_version(doc);

  ModelIR m;
  const std::string family = get_string(field(doc, "", "family"), "family");
  const long long nf = get_int(field(doc, "", "n_features"), "n_features");
  if (nf < 1 || nf > std::numeric_limits<int>::max()) throw SchemaError("n_features", "expected a positive integer");
  m.n_features = static_cast<int>(nf);

  const json& classes = get_array(field(doc, "", "classes"), "classes");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const json& c = classes[i];
    // Numeric labels are accepted and kept in their textual form.
    if (c.is_number_integer()) {
      m.class_labels.push_back(std::to_string(c.get<long long>()));
    } else {
      m.class_labels.push_back(get_string(c, at("classes", i)));
    }
  }
  if (const auto it = doc.find("metadata"); it != doc.end()) {
    if (!it->is_object()) throw SchemaError("metadata", "expected an object");
    for (const auto& [k, v] : it->items()) m.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
  }

  // Without a "payload" object the family fields may sit at the top level.
  const bool nested = doc.contains("payload");
  const json& payload = nested ? doc["payload"] : doc;
  const std::string ppath = nested ? "payload" : "";
  if (family == "tree") {
    m.payload = decode_tree(payload, ppath, m.class_labels);
  } else if (family == "linear") {
    m.payload = decode_linear(payload, ppath);
  } else if (family == "mlp") {
    m.payload = decode_mlp(payload, ppath);
  } else if (family == "kernel_svm") {
    m.payload = decode_svm(payload, ppath);
  } else {
    throw SchemaError("family", "expected one of tree, linear, mlp, kernel_svm; got \"" + family + "\"");
  }

  if (auto violations = validate(m); !violations.empty()) throw StructureError(std::move(violations));
  return m;
}

ModelIR load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string serialize(const ModelIR& model) {
  json doc = {{"schema_version", kSchemaVersion},
              {"family", std::string(family_name(model.family()))},
              {"n_features", model.n_features},
              {"classes", model.class_labels},
              {"payload", encode_payload(model)}};
  if (!model.metadata.empty()) doc["metadata"] = model.metadata;
  return doc.dump();
}

std::vector<Violation> validate(const ModelIR& model) {
  Checker c;
  if (model.n_features < 1) c.fail("ModelIR", "n_features", "positive integer");
  if (model.class_labels.size() < 2) c.fail("ModelIR", "classes", "at least two classes");
  std::set<std::string> distinct(model.class_labels.begin(), model.class_labels.end());
  if (distinct.size() != model.class_labels.size()) c.fail("ModelIR", "classes", "class labels are distinct");

  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, TreeModel>) validate_tree(model, p, c);
        if constexpr (std::is_same_v<P, LinearModel>) validate_linear(model, p, c);
        if constexpr (std::is_same_v<P, MLPModel>) validate_mlp(model, p, c);
        if constexpr (std::is_same_v<P, KernelSVMModel>) validate_svm(model, p, c);
      },
      model.payload);
  return c.out;
}

ModelStats model_stats(const ModelIR& model) {
  ModelStats s;
  switch (model.family()) {
    case Family::tree: {
      const auto& t = model.as<TreeModel>();
      s.node_count = static_cast<std::int64_t>(t.nodes.size());
      s.param_count = std::count_if(t.nodes.begin(), t.nodes.end(),
                                    [](const TreeNode& n) { return std::holds_alternative<TreeSplit>(n); });
      break;
    }
    case Family::linear: {
      const auto& l = model.as<LinearModel>();
      s.param_count = static_cast<std::int64_t>(l.weights.data.size() + l.bias.size());
      break;
    }
    case Family::mlp:
      for (const auto& l : model.as<MLPModel>().layers) {
        s.param_count += static_cast<std::int64_t>(l.weights.data.size() + l.bias.size());
        s.max_layer_width = std::max<std::int64_t>(s.max_layer_width, static_cast<std::int64_t>(l.weights.rows));
      }
      break;
    case Family::kernel_svm:
      for (const auto& b : model.as<KernelSVMModel>().machines) {
        s.param_count += static_cast<std::int64_t>(b.support_vectors.data.size() + b.dual_coefs.size() + 1);
        s.support_vector_total += static_cast<std::int64_t>(b.support_vectors.rows);
      }
      break;
  }
  return s;
}

int tree_depth(const TreeModel& tree) {
  std::vector<int> depth(tree.nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (const auto* s = std::get_if<TreeSplit>(&tree.nodes[i])) {
      for (int child : {s->left, s->right}) {
        if (child > static_cast<int>(i) && child < static_cast<int>(tree.nodes.size())) depth[child] = depth[i] + 1;
      }
    } else {
      best = std::max(best, depth[i]);
    }
  }
  return best;
}

}  // namespace edgecc
