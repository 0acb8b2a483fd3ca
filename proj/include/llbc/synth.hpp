// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Synthesis of pure forward and backward functions from symbolic executions.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "llbc/interp.hpp"
#include "llbc/pure.hpp"

namespace llbc {

struct SynthOptions {
  bool inline_lets = true;
  RunOptions run{};
};

struct TranslateResult {
  pure::Program program;
  std::vector<FnReport> reports; // one per LLBC function, declaration order
  bool ok() const;
};

// Symbolically executes every function of a validated program and folds the
// executions into pure declarations. Failures are reported per function.
TranslateResult translate(const Program& p, const SynthOptions& o = {});
// Same, but throws the first failure as an Error.
pure::Program translate_program(const Program& p, const SynthOptions& o = {});

// Source type to pure type: references and boxes are erased, data type names
// get their pure spelling and type variables are lower-cased.
pure::PTy erase_type(const Ty& t);

// The value of a returned borrow as seen by a backward function: mutable
// borrows of region get their inner value replaced by the next component,
// borrows of other regions become Ignored.
Value sym(const std::string& region, const std::vector<Value>& components, const Value& v, const Ty& t);

// Translation of a value in an environment, where names maps symbolic
// values to their pure variables.
pure::Expr value_to_expr(const Program& p, const Env& env, const std::map<SymId, std::string>& names, const Value& v);

// Pure image of a borrow-free concrete value; nullopt when v holds borrows,
// loans, symbolic values or bottom.
std::optional<pure::Val> concrete_to_val(const Program& p, const Value& v);

struct DiffResult {
  enum class Verdict : uint8_t { Equal, Differ, Inconclusive };
  Verdict verdict = Verdict::Inconclusive;
  std::string concrete; // Returned(v) / Panicked / StepLimit
  std::string pure;     // outcome_str of the pure evaluation
};

// Runs entry concretely and the pure translation of entry, then compares.
// Evaluation errors on either side propagate as Error.
DiffResult difftest(const Program& p, const pure::Program& translated, const std::string& entry,
                    const RunOptions& opts, uint64_t fuel);

} // namespace llbc
