// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <set>

#include "corpus.hpp"
#include "llbc/interp.hpp"
#include "progen.hpp"

using namespace llbc;
using namespace llbc::testing;

namespace {

bool has_code(const std::vector<Diagnostic>& ds, const std::string& code) {
  for (const auto& d : ds)
    if (d.code == code) return true;
  return false;
}

// Runs entry, collecting every environment observed after a statement.
ExecResult run_collect(const Program& p, const std::string& entry, std::vector<Env>& envs, bool checks = false) {
  RunOptions o;
  o.check_invariants = checks;
  o.on_step = [&](const Env& e) { envs.push_back(e); };
  return run_program(p, entry, o);
}

// Replaces the first value of kind k (pre-order) by an integer.
bool erase_first(Value& v, Value::Kind k) {
  if (v.kind == k) {
    v = Value::integer(0, Ty::Kind::I32);
    return true;
  }
  for (auto& c : v.kids)
    if (erase_first(c, k)) return true;
  return false;
}

bool erase_first(Env& env, Value::Kind k) {
  for (auto& e : env.entries)
    if (auto* b = std::get_if<Binding>(&e))
      if (erase_first(b->value, k)) return true;
  return false;
}

} // namespace

TEST_CASE("corpus entries return unit with all assertions passing") {
  for (const auto& c : accepted_corpus()) {
    Program p = load_corpus(c.file);
    for (const char* e : c.entries) {
      CAPTURE(e);
      ExecResult r = run_program(p, e);
      CHECK(r.kind == ExecResult::Kind::Returned);
      CHECK(r.value == Value::unit());
    }
  }
}

TEST_CASE("property: invariants hold after every statement of every corpus trace") {
  size_t steps = 0;
  for (const auto& c : accepted_corpus()) {
    Program p = load_corpus(c.file);
    for (const char* e : c.entries) {
      CAPTURE(e);
      std::vector<Env> envs;
      run_collect(p, e, envs);
      CHECK_FALSE(envs.empty());
      for (const auto& env : envs) {
        auto ds = check_invariants(env, &p, true);
        if (!ds.empty()) FAIL_CHECK(ds.front().str());
      }
      steps += envs.size();
    }
  }
  CHECK(steps > 100);
}

TEST_CASE("property: invariants hold on generated programs") {
  for (const auto& g : generate_suite(42, 3)) {
    CAPTURE(g.family);
    CAPTURE(g.seed);
    Program p = load_text(g.text);
    std::vector<Env> envs;
    run_collect(p, g.entry, envs);
    for (const auto& env : envs) CHECK(check_invariants(env, &p, true).empty());
  }
}

TEST_CASE("mutation: a borrow whose loan disappeared is reported") {
  Env e;
  e.push_binding("x", Value::mut_loan(0), Ty::i32(), false);
  e.push_binding("px", Value::mut_borrow(0, Value::integer(1, Ty::Kind::I32)), Ty::mut_ref("", Ty::i32()), false);
  CHECK(check_invariants(e, nullptr, true).empty());
  std::get<Binding>(e.entries[0]).value = Value::integer(1, Ty::Kind::I32);
  CHECK(has_code(check_invariants(e, nullptr, true), "DANGLING_BORROW"));
}

TEST_CASE("mutation: a mutable loan inside a shared loan is reported") {
  Env e;
  Ty pair = Ty::tuple({Ty::i32(), Ty::i32()});
  e.push_binding("p", Value::shared_loan({1}, Value::tuple({Value::integer(0, Ty::Kind::I32), Value::integer(1, Ty::Kind::I32)})),
                 pair, false);
  e.push_binding("s", Value::shared_borrow(1), Ty::shared_ref("", pair), false);
  CHECK(check_invariants(e, nullptr, true).empty());
  std::get<Binding>(e.entries[0]).value.kids[0].kids[0] = Value::mut_loan(2);
  e.push_binding("m", Value::mut_borrow(2, Value::integer(0, Ty::Kind::I32)), Ty::mut_ref("", Ty::i32()), false);
  CHECK(has_code(check_invariants(e, nullptr, true), "MUT_LOAN_IN_SHARED"));
}

TEST_CASE("mutation: dropping a loan from any traced environment is caught") {
  size_t mutated = 0;
  for (const auto& c : accepted_corpus()) {
    Program p = load_corpus(c.file);
    for (const char* e : c.entries) {
      std::vector<Env> envs;
      run_collect(p, e, envs);
      for (auto env : envs) {
        for (auto k : {Value::Kind::MutLoan, Value::Kind::SharedLoan}) {
          Env m = env;
          if (!erase_first(m, k)) continue;
          ++mutated;
          auto ds = check_invariants(m, &p, true);
          CHECK((has_code(ds, "DANGLING_BORROW") || has_code(ds, "BORROW_KIND_MISMATCH")));
        }
      }
    }
  }
  CHECK(mutated > 20);
}

TEST_CASE("mutation: duplicated borrows and symbolic values in concrete runs") {
  Env e;
  e.push_binding("x", Value::mut_loan(0), Ty::i32(), false);
  e.push_binding("a", Value::mut_borrow(0, Value::integer(1, Ty::Kind::I32)), Ty::mut_ref("", Ty::i32()), false);
  e.push_binding("b", Value::mut_borrow(0, Value::integer(1, Ty::Kind::I32)), Ty::mut_ref("", Ty::i32()), false);
  CHECK(has_code(check_invariants(e, nullptr, true), "MULTIPLE_BORROWS"));
  Env s;
  s.push_binding("y", Value::symbolic(0, Ty::i32()), Ty::i32(), false);
  CHECK(has_code(check_invariants(s, nullptr, true), "SYMBOLIC_IN_CONCRETE"));
  CHECK(check_invariants(s, nullptr, false).empty());
}

TEST_CASE("checked arithmetic panics") {
  Program p = load_text("fn f() -> (ret: i32) {\n  ret = 2147483647 + 1;\n  return;\n}\n"
                        "fn g() -> (ret: u32) {\n  ret = 0 - 1;\n  return;\n}\n"
                        "fn h() -> (ret: i32) {\n  locals { z: i32 }\n  z = 0;\n  ret = 7 / move z;\n  return;\n}\n"
                        "fn k() -> (ret: i32) {\n  ret = -7 % 2;\n  return;\n}\n"
                        "fn m() -> (ret: i32) {\n  ret = -2147483647 - 1;\n  return;\n}\n");
  CHECK(run_program(p, "f").kind == ExecResult::Kind::Panicked);
  CHECK(run_program(p, "g").kind == ExecResult::Kind::Panicked);
  CHECK(run_program(p, "h").kind == ExecResult::Kind::Panicked);
  ExecResult k = run_program(p, "k");
  REQUIRE(k.kind == ExecResult::Kind::Returned);
  CHECK(k.value == Value::integer(-1, Ty::Kind::I32));
  ExecResult m = run_program(p, "m");
  REQUIRE(m.kind == ExecResult::Kind::Returned);
  CHECK(m.value == Value::integer(-2147483648LL, Ty::Kind::I32));
}

TEST_CASE("explicit panic and failed assertion") {
  Program p = load_text("fn f() {\n  panic!();\n}\nfn g() {\n  assert!(false);\n  return;\n}\n");
  CHECK(run_program(p, "f").kind == ExecResult::Kind::Panicked);
  CHECK(run_program(p, "g").kind == ExecResult::Kind::Panicked);
}

TEST_CASE("evaluation errors") {
  Program p = load_text("fn loop_(n: u32) -> (ret: u32) {\n  ret = loop_(copy n);\n  return;\n}\n"
                        "fn start() -> (ret: u32) {\n  ret = loop_(1);\n  return;\n}\n"
                        "fn arg(x: i32) {\n  return;\n}\n");
  RunOptions o;
  o.max_steps = 1000;
  try {
    run_program(p, "start", o);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == "STEP_LIMIT");
  }
  CHECK_THROWS_AS(run_program(p, "nope"), Error);
  CHECK_THROWS_AS(run_program(p, "arg"), Error);
}

TEST_CASE("rejected programs fail concretely too") {
  Program p = load_text("fn f() -> (ret: i32) {\n  locals { x: i32, y: i32 }\n  x = 1;\n  y = move x;\n"
                        "  ret = copy x;\n  return;\n}\n");
  try {
    run_program(p, "f");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == "USE_OF_BOTTOM");
  }
}

TEST_CASE("property: concrete execution is deterministic and independent of checks") {
  for (const auto& g : generate_suite(28, 11)) {
    CAPTURE(g.family);
    Program p = load_text(g.text);
    RunOptions on, off;
    on.trace = off.trace = true;
    off.check_invariants = false;
    ExecResult a = run_program(p, g.entry, on);
    ExecResult b = run_program(p, g.entry, on);
    ExecResult c = run_program(p, g.entry, off);
    CHECK(a.kind == b.kind);
    CHECK(a.value == b.value);
    CHECK(a.trace == b.trace);
    CHECK(a.env.dump() == b.env.dump());
    CHECK(a.kind == c.kind);
    CHECK(a.value == c.value);
    CHECK(a.trace == c.trace);
  }
}

TEST_CASE("trace shows the environment after each statement") {
  Program p = load_corpus("incr");
  RunOptions o;
  o.trace = true;
  ExecResult r = run_program(p, "test_incr", o);
  REQUIRE_FALSE(r.trace.empty());
  CHECK(r.trace.front().find("// ") != std::string::npos);
  bool saw_loan = false;
  for (const auto& t : r.trace) saw_loan = saw_loan || t.find("loan^m") != std::string::npos;
  CHECK(saw_loan);
}

namespace {

std::multiset<std::pair<int64_t, int>> int_leaves(const Env& env) {
  std::multiset<std::pair<int64_t, int>> out;
  env.visit([&](const Loc&, const Value& v) {
    if (v.kind == Value::Kind::Int) out.insert({v.n, static_cast<int>(v.int_ty)});
  });
  return out;
}

size_t loan_count(const Env& env) {
  size_t n = 0;
  env.visit([&](const Loc&, const Value& v) {
    if (v.kind == Value::Kind::MutLoan) ++n;
    if (v.kind == Value::Kind::SharedLoan) n += v.ids.size();
  });
  return n;
}

} // namespace

TEST_CASE("property: ending loans moves integers around but never creates or drops one") {
  size_t reorgs = 0;
  auto observe = [&](const Env& before, const Env& after) {
    ++reorgs;
    CHECK(int_leaves(before) == int_leaves(after));
    CHECK(loan_count(after) < loan_count(before));
    CHECK(check_invariants(after, nullptr, true).empty());
  };
  RunOptions o;
  o.on_reorg = observe;
  for (const auto& c : accepted_corpus()) {
    Program p = load_corpus(c.file);
    for (const char* e : c.entries) {
      CAPTURE(e);
      run_program(p, e, o);
    }
  }
  for (const auto& g : generate_suite(112, 4242)) {
    CAPTURE(g.family);
    CAPTURE(g.seed);
    run_program(load_text(g.text), g.entry, o);
  }
  CHECK(reorgs > 100);
}
