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

#include <filesystem>
#include <string>

#include "doctest.h"
#include "edgecc/model_ir.hpp"
#include "random_models.hpp"

using namespace edgecc;
using edgecc::testing::Rng;

namespace {

const char* kTree = R"({"schema_version": 1, "family": "tree", "n_features": 1, "classes": ["A", "B"],
  "payload": {"nodes": [{"feature": 0, "threshold": 2.5, "left": 1, "right": 2}, {"leaf": "A"}, {"leaf": "B"}]}})";

std::string linear_doc(const std::string& weights, const std::string& bias, const std::string& rule = "argmax_linear") {
  return R"({"family": "linear", "n_features": 4, "classes": ["a", "b", "c"], "payload": {"score_rule": ")" + rule +
         R"(", "weights": )" + weights + R"(, "bias": )" + bias + "}}";
}

bool has_rule(const std::vector<Violation>& v, const std::string& rule) {
  for (const auto& x : v) {
    if (x.rule.find(rule) != std::string::npos) return true;
  }
  return false;
}

template <class F>
std::vector<Violation> structure_violations(F&& f) {
  try {
    f();
  } catch (const StructureError& e) {
    return e.violations();
  }
  return {};
}

ModelIR random_any(Rng& rng) {
  const int d = rng.between(1, 6);
  const int k = rng.between(2, 4);
  switch (rng.below(4)) {
    case 0: return testing::random_tree(rng, d, k, rng.between(0, 6));
    case 1: return testing::random_linear(rng, d, k, k == 2 && rng.coin(0.5));
    case 2: return testing::random_mlp(rng, d, k, {rng.between(1, 5)});
    default:
      return testing::random_svm(rng, d, k, rng.coin(0.5) ? KernelType::poly : KernelType::rbf, rng.between(1, 3));
  }
}

}  // namespace

TEST_SUITE("model_ir") {
  TEST_CASE("minimal tree document") {
    const ModelIR m = parse_model(kTree);
    CHECK(m.family() == Family::tree);
    CHECK(m.as<TreeModel>().nodes.size() == 3);
    const auto stats = model_stats(m);
    CHECK(stats.node_count == 3);
    CHECK(stats.param_count == 1);
    CHECK(tree_depth(m.as<TreeModel>()) == 1);
  }

  TEST_CASE("payload fields may sit at the top level") {
    const ModelIR m = parse_model(R"({"family": "tree", "n_features": 1, "classes": ["A", "B"],
      "nodes": [{"feature": 0, "threshold": 2.5, "left": 1, "right": 2}, {"leaf": "A"}, {"leaf": "B"}]})");
    CHECK(m == parse_model(kTree));
  }

  TEST_CASE("leaf by class index equals leaf by label") {
    std::string doc = kTree;
    doc.replace(doc.find("\"A\"}"), 3, "0");
    CHECK(parse_model(doc) == parse_model(kTree));
  }

  TEST_CASE("backward edge is a topological-order violation") {
    const std::string doc = R"({"family": "tree", "n_features": 1, "classes": ["A", "B"],
      "payload": {"nodes": [{"feature": 0, "threshold": 2.5, "left": 0, "right": 2}, {"leaf": "A"}, {"leaf": "B"}]}})";
    const auto v = structure_violations([&] { parse_model(doc); });
    REQUIRE_FALSE(v.empty());
    CHECK(has_rule(v, "topological order"));
    CHECK(v[0].type == "TreeNode");
    CHECK(v[0].field == "nodes[0].left");
  }

  TEST_CASE("shared child and unreachable node") {
    const std::string doc = R"({"family": "tree", "n_features": 1, "classes": ["A", "B"],
      "payload": {"nodes": [{"feature": 0, "threshold": 1, "left": 1, "right": 1}, {"leaf": "A"}, {"leaf": "B"}]}})";
    const auto v = structure_violations([&] { parse_model(doc); });
    CHECK(has_rule(v, "exactly one parent"));
    CHECK(has_rule(v, "reachable from root"));
  }

  TEST_CASE("feature index out of range") {
    std::string doc = kTree;
    doc.replace(doc.find("\"feature\": 0"), 12, "\"feature\": 3");
    CHECK(has_rule(structure_violations([&] { parse_model(doc); }), "feature index in range"));
  }

  TEST_CASE("missing and ill-typed fields name their path") {
    try {
      parse_model(R"({"family": "tree", "n_features": 1, "classes": ["A", "B"],
        "payload": {"nodes": [{"feature": 0, "threshold": 2.5, "right": 2}, {"leaf": "A"}, {"leaf": "B"}]}})");
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.path() == "payload.nodes[0].left");
    }
    try {
      parse_model(R"({"family": "tree", "n_features": "one", "classes": ["A", "B"], "payload": {"nodes": []}})");
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.path() == "n_features");
    }
    CHECK_THROWS_AS(parse_model("{not json"), SchemaError);
    CHECK_THROWS_AS(parse_model(R"({"family": "forest", "n_features": 1, "classes": ["a", "b"], "payload": {}})"),
                    SchemaError);
  }

  TEST_CASE("ragged matrix") {
    try {
      parse_model(linear_doc("[[1,2,3,4],[1,2,3],[1,2,3,4]]", "[0,0,0]"));
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.path() == "payload.weights[1]");
    }
  }

  TEST_CASE("schema version") {
    std::string doc = kTree;
    CHECK_NOTHROW(parse_model(doc));
    doc.replace(doc.find("\"schema_version\": 1"), 19, "\"schema_version\": \"1.4\"");
    CHECK_NOTHROW(parse_model(doc));
    doc.replace(doc.find("\"1.4\""), 5, "2");
    CHECK_THROWS_AS(parse_model(doc), SchemaError);
  }

  TEST_CASE("unknown fields are ignored") {
    std::string doc = kTree;
    doc.insert(1, R"("comment": "hello", )");
    CHECK(parse_model(doc) == parse_model(kTree));
  }

  TEST_CASE("valid linear model and its stats") {
    const ModelIR m = parse_model(linear_doc("[[1,2,3,4],[5,6,7,8],[9,10,11,12]]", "[0.5,0.25,-1]"));
    CHECK(validate(m).empty());
    CHECK(model_stats(m).param_count == 15);
  }

  TEST_CASE("binary_sign needs a single row and two classes") {
    const auto v = structure_violations([&] { parse_model(linear_doc("[[1,2,3,4]]", "[0]", "binary_sign")); });
    CHECK(has_rule(v, "binary_sign requires two classes"));
  }

  TEST_CASE("mlp layer dimension chain") {
    const std::string doc = R"({"family": "mlp", "n_features": 4, "classes": ["a", "b", "c"], "payload": {"layers": [
      {"weights": [[1,1,1,1],[1,1,1,1],[1,1,1,1],[1,1,1,1],[1,1,1,1]], "bias": [0,0,0,0,0], "activation": "sigmoid"},
      {"weights": [[1,1,1,1],[1,1,1,1],[1,1,1,1]], "bias": [0,0,0], "activation": "identity"}]}})";
    const auto v = structure_violations([&] { parse_model(doc); });
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == "layer dimension chain");
    CHECK(v[0].type == "MLPModel");
  }

  TEST_CASE("mlp 4-5-3 stats") {
    Rng rng(1);
    ModelIR m = testing::random_mlp(rng, 4, 3, {5}, Activation::sigmoid);
    auto& mlp = std::get<MLPModel>(m.payload);
    REQUIRE(mlp.layers.back().weights.rows == 3);
    const auto s = model_stats(m);
    CHECK(s.param_count == 43);
    CHECK(s.max_layer_width == 5);
  }

  TEST_CASE("duplicated svm pair") {
    const std::string doc = R"({"family": "kernel_svm", "n_features": 2, "classes": ["a", "b"], "payload": {
      "kernel": {"type": "rbf", "gamma": 0.5}, "machines": [
        {"class_a": 0, "class_b": 1, "support_vectors": [[1, 2]], "dual_coefs": [1], "intercept": 0},
        {"class_a": 0, "class_b": 1, "support_vectors": [[3, 4]], "dual_coefs": [1], "intercept": 0}]}})";
    const auto v = structure_violations([&] { parse_model(doc); });
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == "pair appears at most once");
  }

  TEST_CASE("svm stats count stored reals") {
    const ModelIR m = parse_model(R"({"family": "kernel_svm", "n_features": 2, "classes": ["a", "b"], "payload": {
      "kernel": {"type": "poly", "gamma": 1, "coef0": 0, "degree": 2}, "machines": [
        {"class_a": 0, "class_b": 1, "support_vectors": [[1, 0]], "dual_coefs": [1], "intercept": 0}]}})");
    const auto s = model_stats(m);
    CHECK(s.param_count == 4);
    CHECK(s.support_vector_total == 1);
  }

  TEST_CASE("non-finite values are rejected") {
    Rng rng(2);
    ModelIR m = testing::random_linear(rng, 3, 3);
    std::get<LinearModel>(m.payload).bias[1] = std::numeric_limits<double>::infinity();
    CHECK(has_rule(validate(m), "values must be finite"));
  }

  TEST_CASE("sample documents validate") {
    int count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(EDGECC_SAMPLES_DIR)) {
      if (entry.path().extension() != ".json") continue;
      CAPTURE(entry.path().string());
      CHECK_NOTHROW(load_model(entry.path().string()));
      ++count;
    }
    CHECK(count >= 7);
    CHECK_THROWS_AS(load_model("/nonexistent/model.json"), IoError);
  }

  TEST_CASE("property: serialize/parse round trip") {
    Rng rng(11);
    for (int i = 0; i < 400; ++i) {
      const ModelIR m = random_any(rng);
      REQUIRE(validate(m).empty());
      const std::string text = serialize(m);
      const ModelIR back = parse_model(text);
      CHECK(back == m);
      CHECK(serialize(back) == text);
    }
  }

  TEST_CASE("property: parse never accepts what validate rejects") {
    Rng rng(12);
    for (int i = 0; i < 400; ++i) {
      ModelIR m = random_any(rng);
      // Corrupt one structural integer.
      if (auto* t = std::get_if<TreeModel>(&m.payload)) {
        auto& node = t->nodes[rng.below(static_cast<int>(t->nodes.size()))];
        if (auto* s = std::get_if<TreeSplit>(&node)) {
          (rng.coin(0.5) ? s->left : s->feature) = rng.between(-1, 20);
        } else {
          std::get<TreeLeaf>(node).class_index = rng.between(-1, 6);
        }
      } else if (auto* s = std::get_if<KernelSVMModel>(&m.payload)) {
        s->machines[0].class_b = rng.between(-1, 5);
      } else {
        m.n_features = rng.between(1, 8);
      }
      const bool valid = validate(m).empty();
      std::string text;
      try {
        text = serialize(m);
      } catch (const std::exception&) {
        continue;
      }
      bool accepted = true;
      try {
        const ModelIR back = parse_model(text);
        CHECK(validate(back).empty());
      } catch (const Error&) {
        accepted = false;
      }
      if (!valid) CHECK_FALSE(accepted);
    }
  }

  TEST_CASE("property: stats invariant under class renaming") {
    Rng rng(13);
    for (int i = 0; i < 200; ++i) {
      ModelIR m = random_any(rng);
      const auto before = model_stats(m);
      for (auto& l : m.class_labels) l = "renamed_" + l + "_x";
      CHECK(model_stats(m) == before);
    }
  }
}
