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

#include <cstdint>
#include <vector>

#include "edgecc/model_ir.hpp"

namespace edgecc {

/// Internal nodes renumbered densely in array order ("slots"). A child code
/// below `internal_count` names the next slot; any other code c is the leaf
/// of class c - internal_count. This is the table layout of the iterative
/// emitter.
struct TreeTables {
  int internal_count = 0;
  std::vector<int> feature;
  std::vector<double> threshold;
  std::vector<std::uint32_t> left;
  std::vector<std::uint32_t> right;
  int root_class = 0;  // used only when internal_count == 0
};

TreeTables flatten_tree(const TreeModel& tree);

/// Nested if/else form of a tree, in emission (pre-)order. Branches refer to
/// thresholds by slot so the nested form shares the tables' constant data.
struct TreeProgram {
  struct Stmt {
    bool is_return = false;
    int class_index = 0;  // return
    int feature = 0;      // branch
    int slot = 0;         // branch
    int then_stmt = -1;   // taken when x[feature] <= threshold[slot]
    int else_stmt = -1;
  };
  std::vector<Stmt> stmts;  // stmts[0] is the outermost statement
  int depth = 0;            // nesting depth of the deepest return
};

TreeProgram lower_tree(const TreeModel& tree);

/// Nesting limit of if/else emission and evaluation; deeper trees fall back
/// to the iterative form.
inline constexpr int kMaxIfElseDepth = 512;

}  // namespace edgecc
