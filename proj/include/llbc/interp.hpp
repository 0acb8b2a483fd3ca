// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Concrete execution and symbolic borrow checking.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "llbc/ast.hpp"
#include "llbc/error.hpp"
#include "llbc/value.hpp"

namespace llbc {

struct RunOptions {
  bool check_invariants = true;
  bool trace = false;
  uint64_t max_steps = 20'000'000;
  // Called with the environment after every executed statement.
  std::function<void(const Env&)> on_step;
  // Called around every loan-ending reorganization.
  std::function<void(const Env& before, const Env& after)> on_reorg;
};

struct ExecResult {
  enum class Kind : uint8_t { Returned, Panicked };
  Kind kind = Kind::Returned;
  Value value;
  Env env;
  std::vector<std::string> trace; // one line per executed statement when tracing
};

// Runs a nullary entry function of a validated program. Throws Error on
// evaluation errors (code STEP_LIMIT when the step budget runs out).
ExecResult run_program(const Program& p, const std::string& entry, const RunOptions& opts = {});

struct FnReport {
  std::string fn;
  bool ok = true;
  Diagnostic diag;      // when !ok
  std::string env_dump; // environment at the failure point, when known
};

// Symbolically executes every function body against its signature. The
// program must be validated; it is terminalized internally.
std::vector<FnReport> borrow_check(const Program& p, const RunOptions& opts = {});

} // namespace llbc
