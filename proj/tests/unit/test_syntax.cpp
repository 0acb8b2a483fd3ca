// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "corpus.hpp"
#include "llbc/interp.hpp"
#include "llbc/syntax.hpp"
#include "progen.hpp"

using namespace llbc;
using namespace llbc::testing;

namespace {

bool has_code(const std::vector<Diagnostic>& ds, const std::string& code) {
  for (const auto& d : ds)
    if (d.code == code) return true;
  return false;
}

std::vector<Diagnostic> diags_of(const std::string& text) {
  Program p = parse_program(text);
  return validate(p);
}

const char* kAllFiles[] = {"incr",         "choose",      "list",          "swap",         "two_phase", "get_suffix",
                           "shared_reborrow", "mut_reborrow", "twisted",   "hashmap",      "opaque",    "empty",
                           "illegal_borrow", "move_deref",  "return_local"};

} // namespace

TEST_CASE("corpus files parse and validate") {
  for (const char* f : kAllFiles) {
    CAPTURE(f);
    CHECK_NOTHROW(load_corpus(f));
  }
}

TEST_CASE("empty program") {
  Program p = load_text("// nothing here\n");
  CHECK(p.fns.empty());
  CHECK(p.types.empty());
}

TEST_CASE("pretty printer round-trips through the parser") {
  for (const char* f : kAllFiles) {
    CAPTURE(f);
    Program p = load_corpus(f);
    Program q = load_text(pretty_llbc(p));
    CHECK(p == q);
  }
}

TEST_CASE("property: generated programs round-trip through text and JSON") {
  for (const auto& g : generate_suite(60, 7)) {
    CAPTURE(g.family);
    CAPTURE(g.seed);
    Program p = load_text(g.text);
    CHECK(load_text(pretty_llbc(p)) == p);
    Program j = program_from_json(program_to_json(p));
    CHECK(validate(j).empty());
    CHECK(j == p);
  }
}

TEST_CASE("JSON round-trip of the corpus") {
  for (const char* f : kAllFiles) {
    CAPTURE(f);
    Program p = load_corpus(f);
    Program j = program_from_json(program_to_json(p));
    CHECK(validate(j).empty());
    CHECK(j == p);
  }
}

TEST_CASE("parse errors carry a location") {
  try {
    parse_program("fn f() {\n  x = ;\n}\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.loc().line == 2);
    CHECK(e.loc().col > 0);
    CHECK_FALSE(e.expected().empty());
  }
  CHECK_THROWS_AS(program_from_json("{\"types\": 3}"), ParseError);
  CHECK_THROWS_AS(program_from_json("not json"), ParseError);
}

TEST_CASE("validation diagnostics") {
  CHECK(has_code(diags_of(read_file(corpus_path("nested_sig"))), "NESTED_BORROW_SIG"));
  CHECK(has_code(diags_of("fn f() {\n  x = 1;\n  return;\n}\n"), "UNKNOWN_VAR"));
  CHECK(has_code(diags_of("fn f() {\n  locals { x: Foo }\n  return;\n}\n"), "UNKNOWN_TYPE"));
  CHECK(has_code(diags_of("fn f() {\n  locals { u: () }\n  u = g();\n  return;\n}\n"), "UNKNOWN_FN"));
  CHECK(has_code(diags_of("fn f() {\n  locals { x: i32 }\n  x = true;\n  return;\n}\n"), "TYPE_ERROR"));
  CHECK(has_code(diags_of("fn f() {\n  return;\n}\nfn f() {\n  return;\n}\n"), "DUPLICATE_DECL"));
  CHECK(has_code(diags_of("fn f<'a>(x: &'b mut i32) {\n  return;\n}\n"), "UNKNOWN_REGION"));
  CHECK(has_code(diags_of("enum E {\n  A(E),\n}\n"), "RECURSIVE_TYPE_UNGUARDED"));
  CHECK(has_code(diags_of("fn f() {\n  locals { x: i32 }\n  x = 3000000000;\n  return;\n}\n"), "LITERAL_RANGE"));
}

TEST_CASE("terminalization puts every body in terminal form") {
  for (const char* f : kAllFiles) {
    CAPTURE(f);
    Program p = load_corpus(f);
    terminalize_program(p);
    for (const auto& fn : p.fns)
      if (fn.body) CHECK(is_terminal_form(*fn.body));
  }
}

TEST_CASE("call graph groups list callees first") {
  Program p = load_corpus("list");
  REQUIRE(p.fn_groups.size() == 3);
  CHECK(p.fn_groups[0] == std::vector<std::string>{"list_nth_mut"});
  CHECK(p.fn_groups[2] == std::vector<std::string>{"test_nth"});
}

TEST_CASE("property: terminalization preserves concrete results") {
  for (const auto& g : generate_suite(42, 23)) {
    CAPTURE(g.family);
    Program p = load_text(g.text);
    Program t = p;
    terminalize_program(t);
    ExecResult a = run_program(p, g.entry);
    ExecResult b = run_program(t, g.entry);
    CHECK(a.kind == b.kind);
    CHECK(a.value == b.value);
  }
}

TEST_CASE("validation is deterministic") {
  const char* bad = "fn f<'a>(x: &'a mut &'a mut i32) {\n  locals { y: Foo }\n  z = 1;\n  u = g();\n  return;\n}\n";
  auto a = diags_of(bad);
  CHECK(a.size() >= 3);
  for (int i = 0; i < 5; ++i) CHECK(diags_of(bad) == a);
}
