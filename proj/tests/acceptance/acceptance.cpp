// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one PASS/FAIL line per criterion. Exit status 0 iff all
// criteria pass.

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "llbc/interp.hpp"
#include "llbc/llbc.h"
#include "llbc/synth.hpp"
#include "progen.hpp"

using namespace llbc;
using namespace llbc::testing;
using pure::Outcome;
using pure::Val;

namespace {

constexpr uint64_t kFuel = 1'000'000;

// Collects the failures of one criterion.
struct Crit {
  std::vector<std::string> failures;
  std::string detail;
  void check(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

Val i32v(int64_t n) { return Val::integer(n, Ty::Kind::I32); }
Val u32v(int64_t n) { return Val::integer(n, Ty::Kind::U32); }
Outcome ret(Val v) { return Outcome{Outcome::Kind::Return, std::move(v)}; }

Val list_val(const std::vector<int64_t>& xs) {
  Val l = Val::ctor("ListNil", {});
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) l = Val::ctor("ListCons", {i32v(*it), l});
  return l;
}

void golden(Crit& c) {
  double worst = 0;
  for (const char* f : {"incr", "choose", "list"}) {
    auto t0 = std::chrono::steady_clock::now();
    pure::Program got = pure::normalize(translate_program(load_corpus(f)));
    pure::Program want = pure::normalize(pure::read_neutral(read_file(golden_path(f))));
    std::string why;
    c.check(pure::alpha_equal(got, want, &why), std::string(f) + ": " + why);
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    worst = std::max(worst, s);
    c.check(s < 1.0, std::string(f) + " took " + std::to_string(s) + " s");
  }
  const auto& ch = translate_program(load_corpus("choose"));
  c.check(ch.find("choose_back") && ch.find("choose_back")->body, "choose_back body missing");
  const auto& ls = translate_program(load_corpus("list"));
  c.check(ls.find("list_nth_mut_back") && ls.find("list_nth_mut_back")->body, "list_nth_mut_back body missing");
  std::ostringstream d;
  d << "3 files, slowest " << static_cast<int>(worst * 1000) << " ms";
  c.detail = d.str();
}

// Uses the C interface, as the difftest command does.
bool difftest_equal(const std::string& text, const std::string& entry, std::string& why) {
  llbc_program* p = nullptr;
  llbc_status st = llbc_program_parse(text.data(), text.size(), &p);
  bool ok = false;
  if (st == LLBC_OK) {
    llbc_options o;
    llbc_options_init(&o);
    o.fuel = kFuel;
    llbc_outcome oc{};
    char* res = nullptr;
    if (llbc_difftest(p, entry.c_str(), &o, &oc, &res) == LLBC_OK) {
      ok = oc == LLBC_EQUAL;
      auto j = nlohmann::json::parse(res);
      why = j["concrete"].get<std::string>() + " vs " + j["pure"].get<std::string>();
      llbc_string_free(res);
    } else {
      why = llbc_last_error();
    }
  } else {
    why = llbc_last_error();
  }
  llbc_program_free(p);
  return ok;
}

void equivalence(Crit& c) {
  size_t corpus = 0, generated = 0, fails = 0;
  for (const auto& e : accepted_corpus()) {
    std::string text = read_file(corpus_path(e.file));
    for (const char* entry : e.entries) {
      std::string why;
      c.check(difftest_equal(text, entry, why), std::string(entry) + ": " + why);
      ++corpus;
    }
  }
  for (const auto& g : generate_suite(126, 1000)) {
    std::string why;
    bool ok = difftest_equal(g.text, g.entry, why);
    c.check(ok, g.family + "#" + std::to_string(g.seed) + ": " + why);
    fails += why.find("Fail") != std::string::npos;
    ++generated;
  }
  c.check(generated >= 100, "fewer than 100 generated programs");
  c.detail = std::to_string(corpus) + " corpus entries, " + std::to_string(generated) + " generated programs (" +
             std::to_string(fails) + " failing runs) over " + std::to_string(families()) + " families";
}

void assertions(Crit& c) {
  pure::Program incr = translate_program(load_corpus("incr"));
  c.check(pure::eval_pure(incr, "test_incr_fwd", kFuel) == ret(Val::unit()), "test_incr is not Return(())");

  pure::Program ch = translate_program(load_corpus("choose"));
  Outcome i = pure::eval_fun(ch, "choose_fwd", {Val::boolean(true), i32v(0), i32v(0)}, kFuel);
  c.check(i == ret(i32v(0)), "choose_fwd true 0 0 = " + pure::outcome_str(i));
  Outcome back = pure::eval_fun(ch, "choose_back", {Val::boolean(true), i32v(0), i32v(0), i32v(1)}, kFuel);
  c.check(back == ret(Val::tuple({i32v(1), i32v(0)})), "(x0, y0) = " + pure::outcome_str(back));
  c.check(pure::eval_pure(ch, "test_choose_fwd", kFuel) == ret(Val::unit()), "test_choose_fwd failed");

  pure::Program ls = translate_program(load_corpus("list"));
  Val l = list_val({1, 2, 3});
  Outcome x = pure::eval_fun(ls, "list_nth_mut_fwd", {l, u32v(2)}, kFuel);
  Outcome x1 = x.kind == Outcome::Kind::Return
                   ? pure::eval_fun(ls, "list_nth_mut_back", {l, u32v(2), i32v(x.value.n + 1)}, kFuel)
                   : x;
  Outcome s = x1.kind == Outcome::Kind::Return ? pure::eval_fun(ls, "sum_fwd", {x1.value}, kFuel) : x1;
  c.check(s == ret(i32v(7)), "sum = " + pure::outcome_str(s));
  c.check(pure::eval_pure(ls, "test_nth_fwd", kFuel) == ret(Val::unit()), "test_nth_fwd failed");
  c.detail = "test_incr = Return(()), (x0, y0) = " + pure::outcome_str(back) + ", sum = " + pure::outcome_str(s);
}

void decisions(Crit& c) {
  auto accepted = [&](const char* file, const char* fn) {
    for (const auto& r : borrow_check(load_corpus(file)))
      if (r.fn == fn) return r.ok;
    c.check(false, std::string("no function ") + fn);
    return false;
  };
  auto rejected_with = [&](const char* file, const char* fn, const char* code) {
    for (const auto& r : borrow_check(load_corpus(file)))
      if (r.fn == fn) return !r.ok && r.diag.code == code;
    return false;
  };
  c.check(accepted("choose", "choose"), "choose rejected");
  c.check(accepted("list", "list_nth_mut"), "list_nth_mut rejected");
  c.check(accepted("swap", "swap"), "swap rejected");
  c.check(accepted("two_phase", "test_two_phase"), "two-phase borrow rejected");
  c.check(accepted("get_suffix", "get_suffix_at_x"), "get_suffix_at_x rejected");
  for (const char* f : {"shared_reborrow", "mut_reborrow"}) {
    c.check(accepted(f, f), std::string(f) + " rejected");
    c.check(run_program(load_corpus(f), f).kind == ExecResult::Kind::Returned, std::string(f) + " panicked");
  }
  bool at_deref = false;
  for (const auto& r : borrow_check(load_corpus("illegal_borrow")))
    at_deref = !r.ok && r.diag.code == "PATH_MISMATCH" && r.diag.loc.line == 9 &&
               r.env_dump.find("px1 -> ⊥") != std::string::npos;
  c.check(at_deref, "illegal borrow not rejected at the deref of bottom");
  c.check(rejected_with("move_deref", "take", "MOVE_THROUGH_DEREF"), "move through deref accepted");
  c.check(rejected_with("return_local", "dangling", "ASSIGN_OVER_LOAN"), "assignment over outer loan accepted");
  Program nested = parse_program(read_file(corpus_path("nested_sig")));
  auto ds = validate(nested);
  c.check(!ds.empty() && ds.front().code == "NESTED_BORROW_SIG", "nested borrow signature not rejected by validation");
  c.detail = "7 accepted, 4 rejected";
}

bool erase_first(Value& v, Value::Kind k) {
  if (v.kind == k) {
    v = Value::integer(0, Ty::Kind::I32);
    return true;
  }
  for (auto& x : v.kids)
    if (erase_first(x, k)) return true;
  return false;
}

void invariants(Crit& c) {
  size_t steps = 0, mutants = 0, caught = 0;
  for (const auto& e : accepted_corpus()) {
    Program p = load_corpus(e.file);
    RunOptions o;
    std::vector<Env> envs;
    o.on_step = [&](const Env& env) {
      envs.push_back(env);
      ++steps;
      auto ds = check_invariants(env, &p, false);
      c.check(ds.empty(), std::string(e.file) + " (symbolic): " + (ds.empty() ? "" : ds.front().str()));
    };
    for (const auto& r : borrow_check(p, o)) c.check(r.ok, r.fn + ": " + r.diag.str());
    envs.clear();
    o.on_step = [&](const Env& env) {
      envs.push_back(env);
      ++steps;
      auto ds = check_invariants(env, &p, true);
      c.check(ds.empty(), std::string(e.file) + ": " + (ds.empty() ? "" : ds.front().str()));
    };
    for (const char* entry : e.entries) run_program(p, entry, o);
    for (const auto& env : envs) {
      Env m = env;
      bool done = false;
      for (auto& ent : m.entries)
        if (auto* b = std::get_if<Binding>(&ent); b && !done) done = erase_first(b->value, Value::Kind::MutLoan);
      if (!done) continue;
      ++mutants;
      for (const auto& d : check_invariants(m, &p, true))
        if (d.code == "DANGLING_BORROW") {
          ++caught;
          break;
        }
    }
  }
  Env e;
  Ty pair = Ty::tuple({Ty::i32(), Ty::i32()});
  e.push_binding("p", Value::shared_loan({1}, Value::tuple({Value::mut_loan(2), Value::integer(1, Ty::Kind::I32)})),
                 pair, false);
  e.push_binding("s", Value::shared_borrow(1), Ty::shared_ref("", pair), false);
  e.push_binding("m", Value::mut_borrow(2, Value::integer(0, Ty::Kind::I32)), Ty::mut_ref("", Ty::i32()), false);
  bool mut_in_shared = false;
  for (const auto& d : check_invariants(e, nullptr, true)) mut_in_shared = mut_in_shared || d.code == "MUT_LOAN_IN_SHARED";
  c.check(mut_in_shared, "mutable loan inside a shared loan not caught");
  c.check(mutants > 0 && caught == mutants, "dangling-borrow mutants caught " + std::to_string(caught) + "/" +
                                                 std::to_string(mutants));
  c.detail = std::to_string(steps) + " checked steps, " + std::to_string(caught) + "/" + std::to_string(mutants) +
             " dangling-borrow mutants caught";
}

void backward(Crit& c) {
  pure::Program ch = translate_program(load_corpus("choose"));
  std::mt19937 g(2024);
  std::uniform_int_distribution<int64_t> d(-2147483648LL, 2147483647LL);
  size_t n1 = 0, n2 = 0;
  std::vector<int64_t> edge = {-2147483648LL, -1, 0, 1, 2147483647LL};
  for (int b = 0; b < 2; ++b)
    for (int k = 0; k < 300; ++k) {
      int64_t x = k < 125 ? edge[k % 5] : d(g), y = k < 125 ? edge[(k / 5) % 5] : d(g),
              r = k < 125 ? edge[(k / 25) % 5] : d(g);
      Val want = b ? Val::tuple({i32v(r), i32v(y)}) : Val::tuple({i32v(x), i32v(r)});
      Outcome got = pure::eval_fun(ch, "choose_back", {Val::boolean(b), i32v(x), i32v(y), i32v(r)}, kFuel);
      c.check(got == ret(want), "choose_back " + std::to_string(b) + " " + std::to_string(x) + " " +
                                    std::to_string(y) + " " + std::to_string(r) + " = " + pure::outcome_str(got));
      ++n1;
    }
  pure::Program ls = translate_program(load_corpus("list"));
  std::uniform_int_distribution<int64_t> small(-100000, 100000);
  for (size_t n = 0; n <= 8; ++n)
    for (int trial = 0; trial < 4; ++trial) {
      std::vector<int64_t> xs(n);
      for (auto& x : xs) x = small(g);
      for (size_t i = 0; i <= n + 1; ++i) {
        Outcome got = pure::eval_fun(ls, "list_nth_mut_fwd", {list_val(xs), u32v(i)}, kFuel);
        ++n2;
        if (i >= n) {
          Outcome put = pure::eval_fun(ls, "list_nth_mut_back", {list_val(xs), u32v(i), i32v(0)}, kFuel);
          c.check(got.kind == Outcome::Kind::Fail && put.kind == Outcome::Kind::Fail,
                  "out-of-range index " + std::to_string(i) + " on length " + std::to_string(n));
          continue;
        }
        if (got != ret(i32v(xs[i]))) {
          c.check(false, "list_nth_mut_fwd get mismatch");
          continue;
        }
        int64_t v = got.value.n * 3 + 1;
        std::vector<int64_t> want = xs;
        want[i] = v;
        Outcome put = pure::eval_fun(ls, "list_nth_mut_back", {list_val(xs), u32v(i), i32v(v)}, kFuel);
        c.check(put == ret(list_val(want)), "get-then-put mismatch at " + std::to_string(i));
      }
    }
  c.detail = std::to_string(n1) + " choose_back samples, " + std::to_string(n2) + " list_nth_mut cases";
}

void case_study(Crit& c) {
  TranslateResult r = translate(load_corpus("hashmap"));
  c.check(r.ok(), "translation reported failures");
  auto err = pure::scope_error(r.program);
  c.check(!err, "ill-scoped output: " + err.value_or(""));
  std::string text = pure::print_program(r.program, pure::Style::Neutral);
  c.check(pure::read_neutral(text) == r.program, "neutral output does not read back");
  c.check(!pure::print_program(r.program, pure::Style::FStar).empty(), "empty F*-style output");
  c.check(pure::eval_pure(r.program, "test_insert_fwd", kFuel) == ret(Val::unit()), "test_insert_fwd failed");
  c.detail = std::to_string(r.program.funs.size()) +
             " declarations emitted; proof-assistant case studies are out of scope";
}

} // namespace

int main() {
  struct Item {
    int n;
    const char* name;
    std::function<void(Crit&)> f;
  };
  std::vector<Item> items = {
      {1, "golden translations", golden},
      {2, "executable equivalence", equivalence},
      {3, "reference assertions", assertions},
      {4, "borrow-check decisions", decisions},
      {5, "invariant suite", invariants},
      {6, "backward-function properties", backward},
      {7, "hash-table benchmark translation", case_study},
  };
  int failed = 0;
  for (const auto& it : items) {
    Crit c;
    try {
      it.f(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    bool ok = c.failures.empty();
    failed += !ok;
    std::printf("%s criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", it.n, it.name, c.detail.c_str());
    for (size_t i = 0; i < c.failures.size() && i < 10; ++i) std::printf("    %s\n", c.failures[i].c_str());
  }
  return failed == 0 ? 0 : 1;
}
