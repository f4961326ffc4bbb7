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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "edgecc/eval.hpp"
#include "random_models.hpp"

using namespace edgecc;
using edgecc::testing::Rng;

namespace {

ModelIR sample(const std::string& name) { return load_model(std::string(EDGECC_SAMPLES_DIR) + "/" + name); }

const char* kIrisLike =
    "a,b,c,d,species\n"
    "5.1,3.5,1.4,0.2,setosa\n"
    "7.0,3.2,4.7,1.4,versicolor\n"
    "6.3,3.3,6.0,2.5,virginica\n"
    "4.9,3.0,1.4,0.2,setosa\n"
    "6.4,3.2,4.5,1.5,versicolor\n"
    "5.8,2.7,5.1,1.9,virginica\n";

Dataset synthetic(Rng& rng, int n, int k) {
  Dataset ds;
  ds.features = Matrix(n, 3);
  ds.class_labels = testing::class_names(k);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) ds.features(i, c) = rng.uniform(-2, 2);
    ds.labels.push_back(i % k);
  }
  return ds;
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("csv parsing") {
    const Dataset ds = parse_csv(kIrisLike);
    CHECK(ds.size() == 6);
    CHECK(ds.features.cols == 4);
    CHECK(ds.class_labels == std::vector<std::string>{"setosa", "versicolor", "virginica"});
    CHECK(ds.labels == std::vector<int>{0, 1, 2, 0, 1, 2});
    CHECK(ds.features(2, 2) == 6.0);

    CsvOptions by_name;
    by_name.label_column = std::string("a");
    const Dataset alt = parse_csv("a,b\nx, 1.5\ny,2\n", by_name);
    CHECK(alt.features(0, 0) == 1.5);
    CHECK(alt.class_labels == std::vector<std::string>{"x", "y"});

    CsvOptions noheader;
    noheader.header = false;
    noheader.label_column = std::size_t{0};
    CHECK(parse_csv("1,2,3\n0,4,5\n", noheader).class_labels == std::vector<std::string>{"1", "0"});

    CsvOptions fixed;
    fixed.class_labels = std::vector<std::string>{"virginica", "versicolor", "setosa"};
    CHECK(parse_csv(kIrisLike, fixed).labels == std::vector<int>{2, 1, 0, 2, 1, 0});
  }

  TEST_CASE("csv errors carry row and column") {
    try {
      parse_csv("a,b,y\n1,2,p\n3,oops,q\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.row() == 2);
      CHECK(e.column() == "b");
    }
    try {
      parse_csv("a,b,y\n1,2,p\n3,4\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.row() == 2);
      CHECK(e.column() == "y");
    }
    CsvOptions o;
    o.label_column = std::string("label");
    CHECK_THROWS_AS(parse_csv(kIrisLike, o), MissingLabelColumn);
    o.label_column = std::size_t{9};
    CHECK_THROWS_AS(parse_csv(kIrisLike, o), MissingLabelColumn);
    CHECK_THROWS_AS(parse_csv("a,b\n"), ParseError);
    CHECK_THROWS_AS(load_csv("/nonexistent/file.csv"), IoError);
  }

  TEST_CASE("holdout split is stratified, disjoint and seeded") {
    Rng rng(50);
    const Dataset ds = synthetic(rng, 300, 3);
    const Split a = holdout_split(ds, 0.7, 42);
    const Split b = holdout_split(ds, 0.7, 42);
    const Split c = holdout_split(ds, 0.7, 43);
    CHECK(a.train == b.train);
    CHECK(a.test == b.test);
    CHECK_FALSE(a.test == c.test);
    CHECK(a.train.size() + a.test.size() == 300);
    for (int k = 0; k < 3; ++k) {
      CHECK(std::count(a.train.labels.begin(), a.train.labels.end(), k) == 70);
      CHECK(std::count(a.test.labels.begin(), a.test.labels.end(), k) == 30);
    }
    CHECK(a.train.class_labels == ds.class_labels);
    CHECK(dataset_fingerprint(a.test) == dataset_fingerprint(b.test));
    CHECK(dataset_fingerprint(a.test) != dataset_fingerprint(a.train));
  }

  TEST_CASE("degenerate classes are rejected") {
    Dataset ds = parse_csv("x,y\n1,a\n2,a\n3,b\n");
    CHECK_THROWS_AS(holdout_split(ds, 0.7, 1), DegenerateClass);
    CHECK_THROWS_AS(holdout_split(parse_csv(kIrisLike), 1.0, 1), Error);
  }

  TEST_CASE("property: split of every class keeps at least one row each side") {
    Rng rng(51);
    for (int t = 0; t < 200; ++t) {
      const int k = rng.between(2, 5);
      const Dataset ds = synthetic(rng, rng.between(2 * k, 60), k);
      const double f = rng.uniform(0.05, 0.95);
      const Split s = holdout_split(ds, f, t);
      for (int c = 0; c < k; ++c) {
        CHECK(std::count(s.train.labels.begin(), s.train.labels.end(), c) >= 1);
        CHECK(std::count(s.test.labels.begin(), s.test.labels.end(), c) >= 1);
      }
    }
  }

  TEST_CASE("evaluation of the sample tree") {
    const ModelIR m = sample("tree.json");
    const Dataset ds = parse_csv(kIrisLike);
    EvalConfig cfg;
    cfg.timing_reps = 1;
    const EvalReport flt = evaluate(m, ds, cfg);
    CHECK(flt.n_total == 6);
    CHECK(flt.family == "tree");
    CHECK(flt.mode == "flt");
    CHECK(flt.qformat.empty());
    CHECK(flt.tree_style == "iterative");
    CHECK(flt.sigmoid.empty());
    CHECK(flt.counters == OpCounters{});
    CHECK(flt.accuracy == doctest::Approx(double(flt.n_correct) / 6));
    std::int64_t diag = 0, sum = 0;
    for (std::size_t i = 0; i < flt.confusion.size(); ++i) {
      for (std::size_t j = 0; j < flt.confusion[i].size(); ++j) sum += flt.confusion[i][j];
      diag += flt.confusion[i][i];
    }
    CHECK(sum == 6);
    CHECK(diag == flt.n_correct);

    cfg.mode = NumericMode::fxp16();
    const EvalReport fx = evaluate(m, ds, cfg);
    CHECK(fx.qformat == "Q12.4");
    CHECK(fx.counters.op_count == 6 * 4);  // input conversions only
    CHECK(fx.memory.elem_bytes == 2);
    CHECK(fx.model_fingerprint == flt.model_fingerprint);
  }

  TEST_CASE("evaluation rejects foreign labels and widths") {
    const ModelIR m = sample("tree.json");
    CHECK_THROWS_AS(evaluate(m, parse_csv("a,b,c,d,y\n1,2,3,4,tulip\n")), Error);
    CHECK_THROWS_AS(evaluate(m, parse_csv("a,b,y\n1,2,setosa\n")), DimensionMismatch);
  }

  TEST_CASE("labels map by name regardless of csv order") {
    const ModelIR m = sample("tree.json");
    CsvOptions rev;
    rev.class_labels = std::vector<std::string>{"virginica", "versicolor", "setosa"};
    const Dataset a = parse_csv(kIrisLike);
    const Dataset b = parse_csv(kIrisLike, rev);
    CHECK(evaluate(m, a).n_correct == evaluate(m, b).n_correct);
  }

  TEST_CASE("report json round trip") {
    const ModelIR m = sample("mlp.json");
    const Dataset ds = parse_csv(kIrisLike);
    EvalConfig cfg;
    cfg.mode = NumericMode::fxp32();
    cfg.sigmoid = SigmoidVariant::pwl4;
    cfg.timing_reps = 2;
    const EvalReport r = evaluate(m, ds, cfg);
    CHECK(r.sigmoid == "pwl4");
    const EvalReport back = report_from_json(report_to_json(r));
    CHECK(back.model_fingerprint == r.model_fingerprint);
    CHECK(back.accuracy == r.accuracy);
    CHECK(back.counters == r.counters);
    CHECK(back.memory == r.memory);
    CHECK(back.confusion == r.confusion);
    CHECK(back.mean_host_time_us == r.mean_host_time_us);
    CHECK_THROWS_AS(report_from_json("{"), SchemaError);
    CHECK_THROWS_AS(report_from_json("{}"), SchemaError);
  }

  TEST_CASE("comparison of two configurations") {
    const ModelIR m = sample("mlp.json");
    const Dataset ds = parse_csv(kIrisLike);
    const std::vector<EvalConfig> cfgs = {{NumericMode::flt(), SigmoidVariant::exact, TreeStyle::iterative, 1},
                                          {NumericMode::fxp16(), SigmoidVariant::pwl2, TreeStyle::iterative, 1}};
    const auto reports = evaluate_matrix(m, ds, cfgs);
    REQUIRE(reports.size() == 2);
    EvalReport a = reports[0];
    EvalReport b = reports[1];
    b.accuracy = a.accuracy - 0.02;
    const Comparison c = compare_reports(a, b, 0.01);
    CHECK(c.accuracy_regression);
    const auto acc = std::find_if(c.rows.begin(), c.rows.end(), [](const MetricDelta& d) { return d.metric == "accuracy"; });
    REQUIRE(acc != c.rows.end());
    CHECK(acc->delta == doctest::Approx(-0.02));
    const auto flash =
        std::find_if(c.rows.begin(), c.rows.end(), [](const MetricDelta& d) { return d.metric == "flash_const_bytes"; });
    REQUIRE(flash != c.rows.end());
    CHECK(*flash->ratio == doctest::Approx(0.5));
    CHECK_FALSE(compare_reports(a, b, 0.05).accuracy_regression);
    CHECK(format_comparison(c).find("accuracy") != std::string::npos);
    CHECK(format_report_table(reports).find("fxp16") != std::string::npos);
    CHECK(config_label(b) == "fxp16 (Q12.4) sigmoid=pwl2");

    EvalReport other = b;
    other.model_fingerprint = "0000000000000000";
    CHECK_THROWS_AS(compare_reports(a, other), MismatchedRuns);
    other = b;
    other.dataset_fingerprint = "0000000000000000";
    CHECK_THROWS_AS(compare_reports(a, other), MismatchedRuns);
  }
}
