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

#include "edgecc/eval.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "edgecc/hash.hpp"
#include "json.hpp"

namespace edgecc {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_real(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

Dataset parse_csv(std::string_view text, const CsvOptions& opts, std::string source_name) {
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto nl = text.find('\n', start);
      const auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
      if (!trim(line).empty()) lines.push_back(line);
      if (nl == std::string_view::npos) break;
      start = nl + 1;
    }
  }
  if (lines.empty() || (opts.header && lines.size() == 1)) throw ParseError(1, "", "no data rows");

  std::vector<std::string> names;
  std::size_t first_data = 0;
  std::size_t width = 0;
  if (opts.header) {
    for (auto f : split_fields(lines[0])) names.emplace_back(f);
    width = names.size();
    first_data = 1;
  } else {
    width = split_fields(lines[0]).size();
    for (std::size_t i = 0; i < width; ++i) names.push_back(std::to_string(i));
  }

  std::size_t label_col = width - 1;
  if (const auto* name = std::get_if<std::string>(&opts.label_column)) {
    const auto it = std::find(names.begin(), names.end(), *name);
    if (it == names.end()) throw MissingLabelColumn("label column \"" + *name + "\" not found");
    label_col = static_cast<std::size_t>(it - names.begin());
  } else if (const auto* index = std::get_if<std::size_t>(&opts.label_column)) {
    if (*index >= width) {
      throw MissingLabelColumn("label column index " + std::to_string(*index) + " out of range (" +
                               std::to_string(width) + " columns)");
    }
    label_col = *index;
  }
  if (width < 2) throw MissingLabelColumn("need at least one feature column besides the label");

  Dataset ds;
  ds.source_name = std::move(source_name);
  std::map<std::string, int, std::less<>> label_index;
  if (opts.class_labels) {
    ds.class_labels = *opts.class_labels;
    for (std::size_t i = 0; i < ds.class_labels.size(); ++i) label_index.emplace(ds.class_labels[i], static_cast<int>(i));
  }
  const std::size_t d = width - 1;
  ds.features.cols = d;
  for (std::size_t li = first_data; li < lines.size(); ++li) {
    const std::size_t row = li - first_data + 1;
    const auto fields = split_fields(lines[li]);
    if (fields.size() != width) {
      throw ParseError(row, fields.size() < width ? names[fields.size()] : std::to_string(fields.size()),
                       "expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < width; ++c) {
      if (c == label_col) continue;
      double v = 0.0;
      if (!parse_real(fields[c], v)) {
        throw ParseError(row, names[c], "not a decimal number: \"" + std::string(fields[c]) + "\"");
      }
      ds.features.data.push_back(v);
    }
    const std::string_view label = fields[label_col];
    if (label.empty()) throw ParseError(row, names[label_col], "empty label");
    auto it = label_index.find(label);
    if (it == label_index.end()) {
      if (opts.class_labels) throw ParseError(row, names[label_col], "unknown class \"" + std::string(label) + "\"");
      it = label_index.emplace(std::string(label), static_cast<int>(ds.class_labels.size())).first;
      ds.class_labels.emplace_back(label);
    }
    ds.labels.push_back(it->second);
  }
  ds.features.rows = ds.labels.size();
  return ds;
}

Dataset load_csv(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), opts, path);
}

std::string dataset_fingerprint(const Dataset& ds) {
  std::string bytes;
  for (const auto& l : ds.class_labels) {
    bytes += l;
    bytes.push_back('\0');
  }
  auto put = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  };
  put(ds.features.rows);
  put(ds.features.cols);
  for (double v : ds.features.data) put(std::bit_cast<std::uint64_t>(v));
  for (int l : ds.labels) put(static_cast<std::uint64_t>(l));
  return hash_hex(bytes);
}

namespace {

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.class_labels = ds.class_labels;
  out.source_name = ds.source_name;
  out.features = Matrix(rows.size(), ds.features.cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = ds.features.row(rows[i]);
    std::copy(src.begin(), src.end(), out.features.row(i).begin());
    out.labels.push_back(ds.labels[rows[i]]);
  }
  return out;
}

}  // namespace

Split holdout_split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error("train fraction must lie strictly between 0 and 1");
  }
  std::vector<std::vector<std::size_t>> by_class(ds.class_labels.size());
  for (std::size_t i = 0; i < ds.labels.size(); ++i) by_class[ds.labels[i]].push_back(i);

  // Own Fisher-Yates over mt19937_64 so splits match across standard libraries.
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& rows = by_class[c];
    if (rows.empty()) continue;
    if (rows.size() < 2) {
      throw DegenerateClass("class \"" + ds.class_labels[c] + "\" has " + std::to_string(rows.size()) +
                            " instance; a holdout split needs at least 2");
    }
    for (std::size_t i = rows.size() - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
      std::swap(rows[i], rows[j]);
    }
    const auto n = static_cast<std::int64_t>(rows.size());
    const auto n_train = std::clamp<std::int64_t>(std::llround(train_fraction * double(n)), 1, n - 1);
    train_rows.insert(train_rows.end(), rows.begin(), rows.begin() + n_train);
    test_rows.insert(test_rows.end(), rows.begin() + n_train, rows.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  return {subset(ds, train_rows), subset(ds, test_rows)};
}

GenOptions gen_options_for(const ModelIR& model, const EvalConfig& cfg) {
  GenOptions g;
  g.mode = cfg.mode;
  if (model.family() == Family::mlp) g.sigmoid = cfg.sigmoid;
  if (model.family() == Family::tree) g.tree_style = cfg.tree_style;
  return g;
}

EvalReport evaluate(const ModelIR& model, const Dataset& test, const EvalConfig& cfg) {
  if (test.features.cols != static_cast<std::size_t>(model.n_features)) {
    throw DimensionMismatch("dataset has " + std::to_string(test.features.cols) + " features, model expects " +
                            std::to_string(model.n_features));
  }
  std::vector<int> to_model(test.class_labels.size(), -1);
  for (std::size_t i = 0; i < test.class_labels.size(); ++i) {
    const auto it = std::find(model.class_labels.begin(), model.class_labels.end(), test.class_labels[i]);
    if (it != model.class_labels.end()) to_model[i] = static_cast<int>(it - model.class_labels.begin());
  }

  const Predictor predictor(model, cfg.mode, cfg.sigmoid, cfg.tree_style);
  EvalReport r;
  r.model_fingerprint = model_fingerprint(model);
  r.dataset_fingerprint = dataset_fingerprint(test);
  r.dataset_name = test.source_name;
  r.family = family_name(model.family());
  r.mode = cfg.mode.name();
  if (cfg.mode.is_fixed()) r.qformat = cfg.mode.format().str();
  if (model.family() == Family::mlp) r.sigmoid = sigmoid_name(cfg.sigmoid);
  if (model.family() == Family::tree) r.tree_style = tree_style_name(cfg.tree_style);
  const auto k = static_cast<std::size_t>(model.n_classes());
  r.confusion.assign(k, std::vector<std::int64_t>(k, 0));

  for (std::size_t i = 0; i < test.size(); ++i) {
    const int truth = to_model[test.labels[i]];
    if (truth < 0) {
      throw Error("test label \"" + test.class_labels[test.labels[i]] + "\" is not a class of the model");
    }
    const Prediction p = predictor.predict(test.features.row(i));
    r.counters += p.counters;
    ++r.confusion[truth][p.class_index];
    if (p.class_index == truth) ++r.n_correct;
  }
  r.n_total = static_cast<std::int64_t>(test.size());
  r.accuracy = r.n_total ? double(r.n_correct) / double(r.n_total) : 0.0;
  if (r.counters.op_count > 0) {
    r.underflow_rate = double(r.counters.underflow_count) / double(r.counters.op_count);
    r.overflow_rate = double(r.counters.overflow_count) / double(r.counters.op_count);
  }

  const int reps = std::max(cfg.timing_reps, 10);
  volatile int sink = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int rep = 0; rep < reps; ++rep) {
    for (std::size_t i = 0; i < test.size(); ++i) sink = sink + predictor.predict(test.features.row(i)).class_index;
  }
  const auto t1 = std::chrono::steady_clock::now();
  if (test.size() > 0) {
    r.mean_host_time_us =
        std::chrono::duration<double, std::micro>(t1 - t0).count() / (double(reps) * double(test.size()));
  }
  r.memory = estimate_memory(model, gen_options_for(model, cfg));
  return r;
}

std::vector<EvalReport> evaluate_matrix(const ModelIR& model, const Dataset& test,
                                        std::span<const EvalConfig> configs) {
  std::vector<EvalReport> out;
  out.reserve(configs.size());
  for (const auto& cfg : configs) out.push_back(evaluate(model, test, cfg));
  return out;
}

std::string report_to_json(const EvalReport& r) {
  json j;
  j["model_fingerprint"] = r.model_fingerprint;
  j["dataset_fingerprint"] = r.dataset_fingerprint;
  j["dataset"] = r.dataset_name;
  j["family"] = r.family;
  j["mode"] = r.mode;
  j["qformat"] = r.qformat;
  j["sigmoid"] = r.sigmoid;
  j["tree_style"] = r.tree_style;
  j["accuracy"] = r.accuracy;
  j["n_correct"] = r.n_correct;
  j["n_total"] = r.n_total;
  j["op_count"] = r.counters.op_count;
  j["overflow_count"] = r.counters.overflow_count;
  j["underflow_count"] = r.counters.underflow_count;
  j["underflow_rate"] = r.underflow_rate;
  j["overflow_rate"] = r.overflow_rate;
  j["mean_host_time_us"] = r.mean_host_time_us;
  j["host_time_note"] = "host wall time; compare only against runs on the same machine";
  j["memory"] = {{"flash_const_bytes", r.memory.flash_const_bytes}, {"sram_bytes", r.memory.sram_bytes},
                 {"elem_bytes", r.memory.elem_bytes},           {"param_bytes", r.memory.param_bytes},
                 {"structural_bytes", r.memory.structural_bytes}};
  j["confusion"] = r.confusion;
  return j.dump(2) + "\n";
}

EvalReport report_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("report is not valid JSON: ") + e.what());
  }
  EvalReport r;
  auto get = [&](const json& obj, const char* key, auto& out, const std::string& prefix = "") {
    if (!obj.contains(key)) throw SchemaError(prefix + key, "missing field");
    try {
      obj.at(key).get_to(out);
    } catch (const json::exception&) {
      throw SchemaError(prefix + key, "wrong type");
    }
  };
  get(j, "model_fingerprint", r.model_fingerprint);
  get(j, "dataset_fingerprint", r.dataset_fingerprint);
  get(j, "dataset", r.dataset_name);
  get(j, "family", r.family);
  get(j, "mode", r.mode);
  get(j, "qformat", r.qformat);
  get(j, "sigmoid", r.sigmoid);
  get(j, "tree_style", r.tree_style);
  get(j, "accuracy", r.accuracy);
  get(j, "n_correct", r.n_correct);
  get(j, "n_total", r.n_total);
  get(j, "op_count", r.counters.op_count);
  get(j, "overflow_count", r.counters.overflow_count);
  get(j, "underflow_count", r.counters.underflow_count);
  get(j, "underflow_rate", r.underflow_rate);
  get(j, "overflow_rate", r.overflow_rate);
  get(j, "mean_host_time_us", r.mean_host_time_us);
  if (!j.contains("memory") || !j["memory"].is_object()) throw SchemaError("memory", "missing field");
  const json& m = j["memory"];
  get(m, "flash_const_bytes", r.memory.flash_const_bytes, "memory.");
  get(m, "sram_bytes", r.memory.sram_bytes, "memory.");
  get(m, "elem_bytes", r.memory.elem_bytes, "memory.");
  get(m, "param_bytes", r.memory.param_bytes, "memory.");
  get(m, "structural_bytes", r.memory.structural_bytes, "memory.");
  if (j.contains("confusion")) get(j, "confusion", r.confusion);
  return r;
}

std::string config_label(const EvalReport& r) {
  std::string s = r.mode;
  if (!r.qformat.empty()) s += " (" + r.qformat + ")";
  if (!r.sigmoid.empty()) s += " sigmoid=" + r.sigmoid;
  if (!r.tree_style.empty()) s += " tree=" + r.tree_style;
  return s;
}

Comparison compare_reports(const EvalReport& a, const EvalReport& b, double regression_threshold) {
  if (a.model_fingerprint != b.model_fingerprint) {
    throw MismatchedRuns("reports describe different models (" + a.model_fingerprint + " vs " +
                         b.model_fingerprint + ")");
  }
  if (a.dataset_fingerprint != b.dataset_fingerprint) {
    throw MismatchedRuns("reports describe different test sets (" + a.dataset_fingerprint + " vs " +
                         b.dataset_fingerprint + ")");
  }
  Comparison c;
  c.label_a = config_label(a);
  c.label_b = config_label(b);
  c.regression_threshold = regression_threshold;
  auto add = [&](std::string metric, double va, double vb) {
    MetricDelta d{std::move(metric), va, vb, vb - va, std::nullopt};
    if (va != 0.0) d.ratio = vb / va;
    c.rows.push_back(std::move(d));
  };
  add("accuracy", a.accuracy, b.accuracy);
  add("underflow_rate", a.underflow_rate, b.underflow_rate);
  add("overflow_rate", a.overflow_rate, b.overflow_rate);
  add("op_count", double(a.counters.op_count), double(b.counters.op_count));
  add("flash_const_bytes", double(a.memory.flash_const_bytes), double(b.memory.flash_const_bytes));
  add("param_bytes", double(a.memory.param_bytes), double(b.memory.param_bytes));
  add("sram_bytes", double(a.memory.sram_bytes), double(b.memory.sram_bytes));
  add("mean_host_time_us", a.mean_host_time_us, b.mean_host_time_us);
  c.accuracy_regression = a.accuracy - b.accuracy > regression_threshold;
  return c;
}

namespace {

std::string fmt(double v, int precision) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

std::string pad(const std::string& s, std::size_t w, bool left = false) {
  if (s.size() >= w) return s;
  return left ? s + std::string(w - s.size(), ' ') : std::string(w - s.size(), ' ') + s;
}

}  // namespace

std::string format_comparison(const Comparison& c) {
  std::string out = "a: " + c.label_a + "\nb: " + c.label_b + "\n";
  out += pad("metric", 18, true) + pad("a", 14) + pad("b", 14) + pad("b - a", 14) + pad("b / a", 10) + "\n";
  for (const auto& r : c.rows) {
    const int prec = (r.metric == "accuracy" || r.metric.ends_with("_rate")) ? 4 : 2;
    out += pad(r.metric, 18, true) + pad(fmt(r.a, prec), 14) + pad(fmt(r.b, prec), 14) + pad(fmt(r.delta, prec), 14) +
           pad(r.ratio ? fmt(*r.ratio, 3) : "-", 10) + "\n";
  }
  if (c.accuracy_regression) {
    out += "accuracy regression: b is more than " + fmt(c.regression_threshold * 100.0, 2) +
           " pp below a\n";
  }
  return out;
}

std::string format_report_table(std::span<const EvalReport> reports) {
  std::string out = pad("configuration", 34, true) + pad("acc %", 9) + pad("underflow %", 13) + pad("overflow %", 12) +
                    pad("flash B", 10) + pad("sram B", 9) + pad("host us", 10) + "\n";
  for (const auto& r : reports) {
    out += pad(config_label(r), 34, true) + pad(fmt(r.accuracy * 100.0, 2), 9) +
           pad(fmt(r.underflow_rate * 100.0, 2), 13) + pad(fmt(r.overflow_rate * 100.0, 2), 12) +
           pad(std::to_string(r.memory.flash_const_bytes), 10) + pad(std::to_string(r.memory.sram_bytes), 9) +
           pad(fmt(r.mean_host_time_us, 3), 10) + "\n";
  }
  return out;
}

}  // namespace edgecc
