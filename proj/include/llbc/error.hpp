// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "llbc/ast.hpp"

namespace llbc {

struct Diagnostic {
  std::string code;
  std::string message;
  SrcLoc loc;
  std::string where; // function name when relevant
  bool operator==(const Diagnostic&) const = default;
  std::string str() const;
};

// Raised by the interpreters, the synthesizer and the pure evaluator.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& msg, SrcLoc loc = {})
      : std::runtime_error(msg), code_(std::move(code)), loc_(loc) {}
  const std::string& code() const { return code_; }
  const SrcLoc& loc() const { return loc_; }
  void set_loc(SrcLoc l) {
    if (loc_.line == 0) loc_ = l;
  }

private:
  std::string code_;
  SrcLoc loc_;
};

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, SrcLoc loc, std::vector<std::string> expected)
      : std::runtime_error(msg), loc_(loc), expected_(std::move(expected)) {}
  const SrcLoc& loc() const { return loc_; }
  const std::vector<std::string>& expected() const { return expected_; }

private:
  SrcLoc loc_;
  std::vector<std::string> expected_;
};

} // namespace llbc
