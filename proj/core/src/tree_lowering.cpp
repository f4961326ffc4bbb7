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

#include "edgecc/tree_lowering.hpp"

#include <algorithm>
#include <utility>

namespace edgecc {

TreeTables flatten_tree(const TreeModel& tree) {
  TreeTables t;
  std::vector<int> slot(tree.nodes.size(), -1);
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (std::holds_alternative<TreeSplit>(tree.nodes[i])) slot[i] = t.internal_count++;
  }
  if (t.internal_count == 0) {
    t.root_class = std::get<TreeLeaf>(tree.nodes.at(0)).class_index;
    return t;
  }
  const auto code = [&](int node) -> std::uint32_t {
    if (const auto* leaf = std::get_if<TreeLeaf>(&tree.nodes[node])) {
      return static_cast<std::uint32_t>(t.internal_count + leaf->class_index);
    }
    return static_cast<std::uint32_t>(slot[node]);
  };
  for (const auto& node : tree.nodes) {
    if (const auto* split = std::get_if<TreeSplit>(&node)) {
      t.feature.push_back(split->feature);
      t.threshold.push_back(split->threshold);
      t.left.push_back(code(split->left));
      t.right.push_back(code(split->right));
    }
  }
  return t;
}

TreeProgram lower_tree(const TreeModel& tree) {
  TreeProgram prog;
  std::vector<int> slot(tree.nodes.size(), -1);
  int next_slot = 0;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (std::holds_alternative<TreeSplit>(tree.nodes[i])) slot[i] = next_slot++;
  }

  // Pre-order walk with an explicit stack; each entry patches its parent link.
  struct Pending {
    int node;
    int parent_stmt;
    bool is_then;
    int depth;
  };
  std::vector<Pending> stack{{0, -1, false, 0}};
  while (!stack.empty()) {
    const Pending p = stack.back();
    stack.pop_back();
    const int id = static_cast<int>(prog.stmts.size());
    TreeProgram::Stmt stmt;
    if (const auto* leaf = std::get_if<TreeLeaf>(&tree.nodes[p.node])) {
      stmt.is_return = true;
      stmt.class_index = leaf->class_index;
      prog.depth = std::max(prog.depth, p.depth);
    } else {
      const auto& split = std::get<TreeSplit>(tree.nodes[p.node]);
      stmt.feature = split.feature;
      stmt.slot = slot[p.node];
      stack.push_back({split.right, id, false, p.depth + 1});
      stack.push_back({split.left, id, true, p.depth + 1});
    }
    prog.stmts.push_back(stmt);
    if (p.parent_stmt >= 0) {
      auto& parent = prog.stmts[p.parent_stmt];
      (p.is_then ? parent.then_stmt : parent.else_stmt) = id;
    }
  }
  return prog;
}

}  // namespace edgecc
