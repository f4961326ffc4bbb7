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

#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "edgecc/codegen.hpp"
#include "edgecc/eval.hpp"
#include "edgecc/model_ir.hpp"
#include "json.hpp"

namespace edgecc::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModeFlags {
  std::string mode;
  std::string qformat;
  std::string sigmoid;
  std::string tree;
};

void add_mode_flags(CLI::App& app, ModeFlags& f, bool allow_all) {
  std::vector<std::string> modes = {"flt", "fxp32", "fxp16", "fxp8"};
  if (allow_all) modes.push_back("all");
  app.add_option("--mode", f.mode, "Numeric mode (default flt)")->check(CLI::IsMember(modes));
  app.add_option("--qformat", f.qformat, "Q-format override, e.g. 22.10");
  app.add_option("--sigmoid", f.sigmoid, "Sigmoid variant for MLP models")
      ->check(CLI::IsMember({"exact", "rational", "pwl2", "pwl4"}));
  app.add_option("--tree", f.tree, "Tree style")->check(CLI::IsMember({"iterative", "if-else"}));
}

NumericMode resolve_mode(const std::string& mode_flag, const std::string& qformat) {
  std::string mode = mode_flag;
  std::optional<QFormat> q;
  if (!qformat.empty()) {
    try {
      q = QFormat::parse(qformat);
    } catch (const Error& e) {
      throw UsageError(std::string("--qformat: ") + e.what());
    }
    if (mode.empty()) mode = "fxp" + std::to_string(q->total_bits());
  }
  if (mode.empty() || mode == "flt") {
    if (q) throw UsageError("--qformat: only applies to fixed-point modes");
    return NumericMode::flt();
  }
  const int bits = mode == "fxp32" ? 32 : mode == "fxp16" ? 16 : 8;
  if (!q) return NumericMode::fxp(bits == 32 ? QFormat::q22_10() : bits == 16 ? QFormat::q12_4() : QFormat::q4_4());
  if (q->total_bits() != bits) {
    throw UsageError("--qformat: " + q->str() + " has " + std::to_string(q->total_bits()) + " bits but --mode " +
                     mode + " needs " + std::to_string(bits));
  }
  return NumericMode::fxp(*q);
}

SigmoidVariant parse_sigmoid(const std::string& s) {
  if (s == "rational") return SigmoidVariant::rational;
  if (s == "pwl2") return SigmoidVariant::pwl2;
  if (s == "pwl4") return SigmoidVariant::pwl4;
  return SigmoidVariant::exact;
}

/// Applies the family rules to the flags before any work starts.
GenOptions resolve_options(const ModelIR& model, const ModeFlags& f, NumericMode mode) {
  if (!f.tree.empty() && model.family() != Family::tree) {
    throw UsageError("--tree: tree style applies to tree models only (model family: " +
                     std::string(family_name(model.family())) + ")");
  }
  if (!f.sigmoid.empty() && model.family() != Family::mlp) {
    throw UsageError("--sigmoid: sigmoid variants apply to MLP models only (model family: " +
                     std::string(family_name(model.family())) + ")");
  }
  GenOptions g;
  g.mode = mode;
  if (!f.sigmoid.empty()) g.sigmoid = parse_sigmoid(f.sigmoid);
  if (!f.tree.empty()) g.tree_style = f.tree == "if-else" ? TreeStyle::if_else : TreeStyle::iterative;
  try {
    check_options(model, g);
  } catch (const Unsupported& e) {
    throw UsageError(std::string("--mode: ") + e.what());
  }
  return g;
}

/// Explicit path, else EDGECC_OUT_DIR/default_name, else empty (stdout).
std::string output_path(const std::string& explicit_path, const std::string& default_name) {
  if (!explicit_path.empty()) return explicit_path;
  if (const char* dir = std::getenv("EDGECC_OUT_DIR"); dir && *dir) return (fs::path(dir) / default_name).string();
  return {};
}

void write_file(const std::string& path, const std::string& text) {
  const fs::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  std::ofstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << text;
  if (!f) throw IoError("cannot write " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

json memory_json(const MemoryEstimate& m) {
  return {{"flash_const_bytes", m.flash_const_bytes}, {"sram_bytes", m.sram_bytes}, {"elem_bytes", m.elem_bytes},
          {"param_bytes", m.param_bytes}, {"structural_bytes", m.structural_bytes}};
}

int cmd_validate(const std::string& model_path, std::ostream& out) {
  ModelIR model;
  try {
    model = parse_model(read_file(model_path));
  } catch (const StructureError& e) {
    out << model_path << ": " << e.violations().size() << " violation(s)\n";
    for (const auto& v : e.violations()) out << "  " << v.str() << "\n";
    return kExitDomain;
  }
  const ModelStats s = model_stats(model);
  out << model_path << ": ok\n"
      << "  family: " << family_name(model.family()) << "\n"
      << "  features: " << model.n_features << "\n"
      << "  classes: " << model.n_classes() << "\n"
      << "  parameters: " << s.param_count << "\n"
      << "  fingerprint: " << model_fingerprint(model) << "\n";
  return kExitOk;
}

struct GenerateArgs {
  std::string model;
  std::string output;
  std::string prefix = "model";
  bool test_hook = false;
  ModeFlags flags;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  const NumericMode mode = resolve_mode(a.flags.mode, a.flags.qformat);
  const ModelIR model = load_model(a.model);
  GenOptions opts = resolve_options(model, a.flags, mode);
  opts.symbol_prefix = a.prefix;
  opts.emit_test_hook = a.test_hook;
  try {
    check_options(model, opts);
  } catch (const Unsupported& e) {
    throw UsageError(std::string("--prefix: ") + e.what());
  }
  const GeneratedSource gs = generate(model, opts);
  for (const auto& w : gs.warnings) err << "warning: " << w << "\n";

  const std::string path = output_path(a.output, a.prefix + ".cpp");
  if (path.empty()) {
    out << gs.text;
    err << "hash " << gs.text_hash << "\n";
    return kExitOk;
  }
  write_file(path, gs.text);
  json side = {
      {"source", fs::path(path).filename().string()},
      {"model", a.model},
      {"model_fingerprint", gs.model_fingerprint},
      {"text_hash", gs.text_hash},
      {"family", std::string(family_name(model.family()))},
      {"mode", opts.mode.name()},
      {"qformat", opts.mode.is_fixed() ? opts.mode.format().str() : ""},
      {"sigmoid", opts.sigmoid ? sigmoid_name(*opts.sigmoid) : ""},
      {"tree_style", opts.tree_style ? tree_style_name(*opts.tree_style) : ""},
      {"prefix", opts.symbol_prefix},
      {"test_hook", opts.emit_test_hook},
      {"memory", memory_json(gs.memory)},
      {"warnings", gs.warnings},
  };
  write_file(path + ".json", side.dump(2) + "\n");
  out << "wrote " << path << " (" << gs.text.size() << " bytes)\n"
      << "hash " << gs.text_hash << "\n";
  return kExitOk;
}

struct EvalArgs {
  std::string model;
  std::string data;
  std::string label_column;
  bool no_header = false;
  double holdout = 0.0;
  std::uint64_t seed = 1;
  std::string format = "json";
  std::string output;
  int reps = 10;
  ModeFlags flags;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  std::vector<NumericMode> modes;
  if (a.flags.mode == "all") {
    if (!a.flags.qformat.empty()) throw UsageError("--qformat: cannot be combined with --mode all");
    modes = {NumericMode::flt(), NumericMode::fxp32(), NumericMode::fxp16()};
  } else {
    modes = {resolve_mode(a.flags.mode, a.flags.qformat)};
  }
  if (a.holdout != 0.0 && !(a.holdout > 0.0 && a.holdout < 1.0)) {
    throw UsageError("--holdout: train fraction must lie strictly between 0 and 1");
  }
  if (modes.size() > 1 && a.format == "json") throw UsageError("--format: --mode all renders a table only");

  const ModelIR model = load_model(a.model);
  std::vector<EvalConfig> configs;
  for (const auto& m : modes) {
    const GenOptions g = resolve_options(model, a.flags, m);
    EvalConfig cfg;
    cfg.mode = m;
    cfg.sigmoid = g.sigmoid.value_or(SigmoidVariant::exact);
    cfg.tree_style = g.tree_style.value_or(TreeStyle::iterative);
    cfg.timing_reps = a.reps;
    configs.push_back(cfg);
  }

  CsvOptions csv;
  csv.header = !a.no_header;
  if (!a.label_column.empty()) {
    const bool numeric = a.label_column.find_first_not_of("0123456789") == std::string::npos;
    if (numeric) {
      csv.label_column = static_cast<std::size_t>(std::stoull(a.label_column));
    } else {
      csv.label_column = a.label_column;
    }
  }
  Dataset data = load_csv(a.data, csv);
  if (a.holdout > 0.0) data = holdout_split(data, a.holdout, a.seed).test;

  const std::vector<EvalReport> reports = evaluate_matrix(model, data, configs);
  const std::string text = a.format == "json" ? report_to_json(reports.front()) : format_report_table(reports);
  const std::string path = output_path(a.output, a.format == "json" ? "report.json" : "report.txt");
  if (path.empty()) {
    out << text;
  } else {
    write_file(path, text);
    out << "wrote " << path << "\n";
  }
  return kExitOk;
}

struct CompareArgs {
  std::string a;
  std::string b;
  double threshold = 0.01;
  std::string format = "table";
  bool fail_on_regression = false;
};

int cmd_compare(const CompareArgs& a, std::ostream& out) {
  const EvalReport ra = report_from_json(read_file(a.a));
  const EvalReport rb = report_from_json(read_file(a.b));
  const Comparison c = compare_reports(ra, rb, a.threshold);
  if (a.format == "json") {
    json rows = json::array();
    for (const auto& r : c.rows) {
      rows.push_back({{"metric", r.metric}, {"a", r.a}, {"b", r.b}, {"delta", r.delta},
                      {"ratio", r.ratio ? json(*r.ratio) : json(nullptr)}});
    }
    json j = {{"a", c.label_a}, {"b", c.label_b}, {"rows", rows}, {"regression_threshold", c.regression_threshold},
              {"accuracy_regression", c.accuracy_regression}};
    out << j.dump(2) << "\n";
  } else {
    out << format_comparison(c);
  }
  return a.fail_on_regression && c.accuracy_regression ? kExitDomain : kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"edgecc: compile trained classifiers to self-contained MCU source and emulate them on the host"};
  app.name("edgecc");
  app.require_subcommand(1);

  std::string validate_model;
  auto* validate = app.add_subcommand("validate", "Parse and check an interchange document");
  validate->add_option("model", validate_model, "Model document")->required();

  GenerateArgs gen;
  auto* generate_cmd = app.add_subcommand("generate", "Emit classifier source");
  generate_cmd->add_option("--model", gen.model, "Model document")->required();
  generate_cmd->add_option("-o,--output", gen.output, "Output source path");
  generate_cmd->add_option("--prefix", gen.prefix, "Symbol prefix (default model)");
  generate_cmd->add_flag("--test-hook", gen.test_hook, "Also emit <prefix>_scores");
  add_mode_flags(*generate_cmd, gen.flags, false);

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on a CSV test set");
  eval_cmd->add_option("--model", ev.model, "Model document")->required();
  eval_cmd->add_option("--data", ev.data, "CSV file")->required();
  eval_cmd->add_option("--label-column", ev.label_column, "Label column name or zero-based index (default last)");
  eval_cmd->add_flag("--no-header", ev.no_header, "CSV has no header row");
  eval_cmd->add_option("--holdout", ev.holdout, "Evaluate on the test part of a stratified split with this train fraction");
  eval_cmd->add_option("--seed", ev.seed, "Split seed (default 1)");
  eval_cmd->add_option("--format", ev.format, "Report format")->check(CLI::IsMember({"json", "table"}));
  eval_cmd->add_option("--reps", ev.reps, "Timing repetitions (at least 10)");
  eval_cmd->add_option("-o,--output", ev.output, "Report path");
  add_mode_flags(*eval_cmd, ev.flags, true);

  CompareArgs cmp;
  auto* compare_cmd = app.add_subcommand("compare", "Compare two evaluation reports");
  compare_cmd->add_option("a", cmp.a, "Baseline report")->required();
  compare_cmd->add_option("b", cmp.b, "Candidate report")->required();
  compare_cmd->add_option("--threshold", cmp.threshold, "Accuracy regression threshold as a fraction (default 0.01)");
  compare_cmd->add_option("--format", cmp.format, "Output format")->check(CLI::IsMember({"table", "json"}));
  compare_cmd->add_flag("--fail-on-regression", cmp.fail_on_regression, "Exit 1 when an accuracy regression is flagged");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(validate_model, out);
    if (generate_cmd->parsed()) return cmd_generate(gen, out, err);
    if (eval_cmd->parsed()) return cmd_eval(ev, out);
    if (compare_cmd->parsed()) return cmd_compare(cmp, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace edgecc::cli
