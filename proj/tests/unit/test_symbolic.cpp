// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "corpus.hpp"
#include "llbc/interp.hpp"
#include "progen.hpp"

using namespace llbc;
using namespace llbc::testing;

namespace {

const FnReport& report_of(const std::vector<FnReport>& rs, const std::string& fn) {
  for (const auto& r : rs)
    if (r.fn == fn) return r;
  throw std::runtime_error("no report for " + fn);
}

} // namespace

TEST_CASE("accepted corpus functions") {
  for (const auto& c : accepted_corpus()) {
    CAPTURE(c.file);
    Program p = load_corpus(c.file);
    auto rs = borrow_check(p);
    CHECK(rs.size() == p.fns.size());
    for (const auto& r : rs) {
      CAPTURE(r.fn);
      CHECK_MESSAGE(r.ok, r.diag.str());
    }
  }
}

TEST_CASE("illegal borrow is rejected at the dereference") {
  auto rs = borrow_check(load_corpus("illegal_borrow"));
  const auto& r = report_of(rs, "illegal");
  CHECK_FALSE(r.ok);
  CHECK(r.diag.code == "PATH_MISMATCH");
  CHECK(r.diag.loc.line == 9);
  CHECK(r.diag.loc.col == 3);
  CHECK(r.env_dump.find("px1 -> ⊥") != std::string::npos);
}

TEST_CASE("move through a dereference is rejected") {
  auto rs = borrow_check(load_corpus("move_deref"));
  const auto& r = report_of(rs, "take");
  CHECK_FALSE(r.ok);
  CHECK(r.diag.code == "MOVE_THROUGH_DEREF");
}

TEST_CASE("returning a borrow of a local is rejected") {
  auto rs = borrow_check(load_corpus("return_local"));
  const auto& r = report_of(rs, "dangling");
  CHECK_FALSE(r.ok);
  CHECK(r.diag.code == "ASSIGN_OVER_LOAN");
}

TEST_CASE("symbolic checks catch misuse inside generic code") {
  Program p = load_text("fn f<'a>(x: &'a mut i32) -> (ret: &'a mut i32) {\n  locals { y: i32 }\n"
                        "  y = copy *x;\n  ret = &mut y;\n  return;\n}\n"
                        "fn g<'a>(x: &'a mut i32) -> (ret: i32) {\n  locals { p: &'a mut i32, q: &'a mut i32 }\n"
                        "  p = &mut *x;\n  q = &mut *x;\n  *p = 1;\n  ret = copy *q;\n  return;\n}\n");
  auto rs = borrow_check(p);
  CHECK_FALSE(report_of(rs, "f").ok);
  CHECK_FALSE(report_of(rs, "g").ok);
}

TEST_CASE("property: symbolic invariants hold after every statement") {
  size_t steps = 0;
  for (const auto& c : accepted_corpus()) {
    Program p = load_corpus(c.file);
    RunOptions o;
    o.check_invariants = false;
    bool clean = true;
    o.on_step = [&](const Env& e) {
      ++steps;
      auto ds = check_invariants(e, &p, false);
      if (!ds.empty()) {
        clean = false;
        MESSAGE(c.file << ": " << ds.front().str());
      }
    };
    for (const auto& r : borrow_check(p, o)) CHECK(r.ok);
    CHECK(clean);
  }
  CHECK(steps > 100);
}

TEST_CASE("property: generated programs are accepted") {
  for (const auto& g : generate_suite(56, 5)) {
    CAPTURE(g.family);
    CAPTURE(g.seed);
    for (const auto& r : borrow_check(load_text(g.text))) CHECK_MESSAGE(r.ok, r.fn << ": " << r.diag.str());
  }
}

TEST_CASE("precise reborrows run to completion") {
  for (const char* f : {"shared_reborrow", "mut_reborrow"}) {
    Program p = load_corpus(f);
    CHECK(borrow_check(p).at(0).ok);
    CHECK(run_program(p, f).kind == ExecResult::Kind::Returned);
  }
}

TEST_CASE("disabling invariant checks does not change decisions") {
  RunOptions off;
  off.check_invariants = false;
  for (const char* f : {"list", "hashmap", "illegal_borrow", "return_local"}) {
    Program p = load_corpus(f);
    auto a = borrow_check(p);
    auto b = borrow_check(p, off);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].ok == b[i].ok);
      CHECK(a[i].diag.code == b[i].diag.code);
    }
  }
}
