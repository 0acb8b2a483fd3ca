// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "engine.hpp"
#include "llbc/synth.hpp"

namespace llbc {

std::optional<pure::Val> concrete_to_val(const Program& p, const Value& v) {
  switch (v.kind) {
  case Value::Kind::Bool: return pure::Val::boolean(v.b);
  case Value::Kind::Int: return pure::Val::integer(v.n, v.int_ty);
  case Value::Kind::SharedLoan:
  case Value::Kind::Box: return concrete_to_val(p, v.kids[0]);
  case Value::Kind::Tuple:
  case Value::Kind::Ctor: {
    std::vector<pure::Val> ks;
    for (const auto& k : v.kids) {
      auto x = concrete_to_val(p, k);
      if (!x) return std::nullopt;
      ks.push_back(std::move(*x));
    }
    if (v.kind == Value::Kind::Tuple) return pure::Val::tuple(std::move(ks));
    return pure::Val::ctor(engine::pure_ctor_name(p, v.name), std::move(ks));
  }
  default: return std::nullopt;
  }
}

DiffResult difftest(const Program& p, const pure::Program& translated, const std::string& entry,
                    const RunOptions& opts, uint64_t fuel) {
  DiffResult r;
  pure::Outcome po = pure::eval_pure(translated, engine::fwd_name(entry), fuel);
  r.pure = pure::outcome_str(po);
  ExecResult er;
  try {
    er = run_program(p, entry, opts);
  } catch (const Error& e) {
    if (e.code() != "STEP_LIMIT") throw;
    r.concrete = "StepLimit";
    r.verdict = DiffResult::Verdict::Inconclusive;
    return r;
  }
  std::optional<pure::Val> cv;
  if (er.kind == ExecResult::Kind::Panicked) {
    r.concrete = "Panicked";
  } else {
    cv = concrete_to_val(p, er.value);
    if (!cv) throw Error("UNTRANSLATABLE_VALUE", "entry " + entry + " returned " + value_str(er.value));
    r.concrete = "Returned(" + pure::val_str(*cv) + ")";
  }
  if (po.kind == pure::Outcome::Kind::OutOfFuel) {
    r.verdict = DiffResult::Verdict::Inconclusive;
    return r;
  }
  bool same = er.kind == ExecResult::Kind::Panicked ? po.kind == pure::Outcome::Kind::Fail
                                                     : po.kind == pure::Outcome::Kind::Return && po.value == *cv;
  r.verdict = same ? DiffResult::Verdict::Equal : DiffResult::Verdict::Differ;
  return r;
}

} // namespace llbc
