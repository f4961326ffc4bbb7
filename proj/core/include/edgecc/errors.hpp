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

#include <stdexcept>
#include <string>
#include <vector>

namespace edgecc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing or ill-typed field in an interchange document. `path()` is the
/// dotted field path, e.g. `payload.nodes[2].left`.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct Violation {
  std::string type;   // e.g. "TreeModel"
  std::string field;  // e.g. "nodes[0].left"
  std::string rule;   // e.g. "topological order"

  std::string str() const { return type + "." + field + ": " + rule; }
  friend bool operator==(const Violation&, const Violation&) = default;
};

/// A document that parsed but failed validation.
class StructureError : public Error {
 public:
  explicit StructureError(std::vector<Violation> violations)
      : Error(describe(violations)), violations_(std::move(violations)) {}
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  static std::string describe(const std::vector<Violation>& v) {
    std::string out = "model violates " + std::to_string(v.size()) + " invariant(s)";
    for (const auto& item : v) out += "; " + item.str();
    return out;
  }
  std::vector<Violation> violations_;
};

class FormatMismatch : public Error {
 public:
  using Error::Error;
};

class DivisionByZero : public Error {
 public:
  using Error::Error;
};

class NegativeInput : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Family/option combination the code generator does not support.
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// CSV parse failure. `row()` counts data rows from 1 (the header is not a row).
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::string column, const std::string& what)
      : Error("row " + std::to_string(row) + ", column \"" + column + "\": " + what),
        row_(row),
        column_(std::move(column)) {}
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

class MissingLabelColumn : public Error {
 public:
  using Error::Error;
};

class DegenerateClass : public Error {
 public:
  using Error::Error;
};

class MismatchedRuns : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace edgecc
