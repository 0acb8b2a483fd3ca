// Part of the llbc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "llbc/error.hpp"
#include "llbc/pure.hpp"

using llbc::Error;
using llbc::ParseError;
using llbc::Ty;
using namespace llbc::pure;

namespace {

Val i32v(int64_t n) { return Val::integer(n, Ty::Kind::I32); }
Outcome ret(Val v) { return Outcome{Outcome::Kind::Return, std::move(v)}; }
const Outcome kFail{Outcome::Kind::Fail, {}};

Program prog(const char* text) { return read_neutral(text); }

Expr body(const char* text) {
  Program p = read_neutral(std::string("let f(x : i32, y : i32, b : bool) : i32 =\n") + text);
  return *p.funs.at(0).body;
}

} // namespace

TEST_CASE("checked primitives fail instead of wrapping") {
  Program p = prog("let add(a : i32, b : i32) : i32 = i32_add(a, b)\n"
                   "let sub(a : u32, b : u32) : u32 = u32_sub(a, b)\n"
                   "let div(a : i32, b : i32) : i32 = i32_div(a, b)\n"
                   "let rem(a : i32, b : i32) : i32 = i32_rem(a, b)\n"
                   "let mul(a : u32, b : u32) : u32 = u32_mul(a, b)\n");
  CHECK(eval_fun(p, "add", {i32v(2147483647), i32v(1)}, 10) == kFail);
  CHECK(eval_fun(p, "add", {i32v(-5), i32v(3)}, 10) == ret(i32v(-2)));
  auto u = [](int64_t n) { return Val::integer(n, Ty::Kind::U32); };
  CHECK(eval_fun(p, "sub", {u(0), u(1)}, 10) == kFail);
  CHECK(eval_fun(p, "sub", {u(5), u(1)}, 10) == ret(u(4)));
  CHECK(eval_fun(p, "div", {i32v(7), i32v(0)}, 10) == kFail);
  CHECK(eval_fun(p, "div", {i32v(-2147483648LL), i32v(-1)}, 10) == kFail);
  CHECK(eval_fun(p, "div", {i32v(-7), i32v(2)}, 10) == ret(i32v(-3)));
  CHECK(eval_fun(p, "rem", {i32v(-7), i32v(2)}, 10) == ret(i32v(-1)));
  CHECK(eval_fun(p, "mul", {u(65536), u(65536)}, 10) == kFail);
}

TEST_CASE("fuel bounds recursion") {
  Program p = prog("let rec down(n : u32) : unit =\n"
                   "  if eq(n, 0u32) then return () else let* m = u32_sub(n, 1u32) in down(m)\n");
  auto u = [](int64_t n) { return Val::integer(n, Ty::Kind::U32); };
  CHECK(eval_fun(p, "down", {u(10)}, 100) == ret(Val::unit()));
  CHECK(eval_fun(p, "down", {u(10)}, 1).kind == Outcome::Kind::OutOfFuel);
  CHECK(eval_fun(p, "down", {u(100000)}, 10000000) == ret(Val::unit()));
  // Call depth is capped; running past the cap counts as running out of fuel.
  CHECK(eval_fun(p, "down", {u(1000000)}, 10000000).kind == Outcome::Kind::OutOfFuel);
}

TEST_CASE("massert and matches") {
  Program p = prog("type opt<t> =\n  | Some(t)\n  | None\n"
                   "let get<t>(o : opt<t>, d : t) : t =\n  match o with\n  | Some(x) -> return x\n  | None -> return d\n  end\n"
                   "let chk(b : bool) : unit = massert(b)\n");
  CHECK(eval_fun(p, "get", {Val::ctor("Some", {i32v(4)}), i32v(0)}, 10) == ret(i32v(4)));
  CHECK(eval_fun(p, "get", {Val::ctor("None", {}), i32v(9)}, 10) == ret(i32v(9)));
  CHECK(eval_fun(p, "chk", {Val::boolean(false)}, 10) == kFail);
  CHECK(eval_fun(p, "chk", {Val::boolean(true)}, 10) == ret(Val::unit()));
}

TEST_CASE("malformed programs raise errors") {
  Program p = prog("val ext(x : i32) : i32\nlet use() : i32 = ext(1i32)\nlet bad() : i32 = return z\n");
  CHECK_THROWS_AS(eval_pure(p, "use", 10), Error);
  CHECK_THROWS_AS(eval_pure(p, "bad", 10), Error);
  CHECK_THROWS_AS(eval_pure(p, "missing", 10), Error);
  CHECK_THROWS_AS(read_neutral("let f( : i32 = 1"), ParseError);
}

TEST_CASE("value and outcome printing") {
  CHECK(val_str(Val::unit()) == "()");
  CHECK(val_str(Val::tuple({i32v(1), Val::boolean(false)})) == "(1, false)");
  CHECK(val_str(Val::ctor("ListCons", {i32v(-1), Val::ctor("ListNil", {})})) == "ListCons(-1, ListNil)");
  CHECK(outcome_str(ret(Val::unit())) == "Return(())");
  CHECK(outcome_str(kFail) == "Fail");
  CHECK(outcome_str(Outcome{Outcome::Kind::OutOfFuel, {}}) == "OutOfFuel");
}

TEST_CASE("normalization rules") {
  // A negated test is turned around.
  CHECK(alpha_equal(normalize(body("if not(b) then fail else return x")), normalize(body("massert(b)"))) ==
        false);
  CHECK(alpha_equal(normalize(body("if not(b) then fail else return x")),
                    normalize(body("let* _ = massert(b) in return x"))));
  // Binding a result only to return it is the call itself.
  CHECK(alpha_equal(normalize(body("let* z = i32_add(x, y) in return z")), body("i32_add(x, y)")));
  // Value lets are substituted.
  CHECK(alpha_equal(normalize(body("let z = x in i32_add(z, z)")), body("i32_add(x, x)")));
  // Literal matches are conditionals.
  CHECK(alpha_equal(normalize(body("match x with\n  | 0i32 -> return y\n  | _ -> fail\n  end")),
                    normalize(body("if eq(x, 0i32) then return y else fail"))));
  // Differences that matter survive.
  CHECK_FALSE(alpha_equal(normalize(body("i32_add(x, y)")), normalize(body("i32_add(y, x)"))));
  CHECK_FALSE(alpha_equal(normalize(body("return x")), normalize(body("fail"))));
}

TEST_CASE("alpha equivalence tracks binders") {
  CHECK(alpha_equal(body("let* a = i32_add(x, y) in return a"), body("let* q = i32_add(x, y) in return q")));
  CHECK_FALSE(alpha_equal(body("let* a = i32_add(x, y) in return x"), body("let* q = i32_add(x, y) in return q")));
  Program a = prog("let f(x : i32) : i32 = return x\nlet g() : i32 = f(1i32)\n");
  Program b = prog("let h(y : i32) : i32 = return y\nlet k() : i32 = h(1i32)\n");
  Program c = prog("let h(y : i32) : i32 = return y\nlet k() : i32 = k()\n");
  CHECK(alpha_equal(a, b));
  std::string why;
  CHECK_FALSE(alpha_equal(a, c, &why));
  CHECK_FALSE(why.empty());
}

TEST_CASE("scope checking") {
  CHECK_FALSE(scope_error(prog("let f(x : i32) : i32 = let* y = i32_add(x, 1i32) in return y\n")).has_value());
  CHECK(scope_error(prog("let f(x : i32) : i32 = return y\n")).has_value());
  CHECK(scope_error(prog("let f(x : i32) : i32 = let* x = i32_add(x, 1i32) in return x\n")).has_value());
}

TEST_CASE("printers") {
  Program p = prog("type list_t<t> =\n  | ListCons(t, list_t<t>)\n  | ListNil\n"
                   "let rec len<t>(l : list_t<t>) : u32 =\n  match l with\n  | ListCons(x, tl) ->\n"
                   "    let* n = len[t](tl) in u32_add(n, 1u32)\n  | ListNil -> return 0u32\n  end\n");
  std::string f = print_program(p, Style::FStar);
  CHECK(f.find("type list_t (t : Type) =") != std::string::npos);
  CHECK(f.find("| ListCons : t -> (list_t t) -> list_t t") != std::string::npos);
  CHECK(f.find("let rec len (t : Type) (l : list_t t) : result u32 =") != std::string::npos);
  CHECK(f.find("n <-- len t tl;") != std::string::npos);
  CHECK(read_neutral(print_program(p, Style::Neutral)) == p);
}

TEST_CASE("evaluation is deterministic") {
  Program p = prog("let rec f(n : u32) : u32 =\n  if eq(n, 0u32) then return 1u32 else\n"
                   "  let* m = u32_sub(n, 1u32) in let* a = f(m) in let* b = f(m) in u32_add(a, b)\n");
  auto u = [](int64_t n) { return Val::integer(n, Ty::Kind::U32); };
  Outcome a = eval_fun(p, "f", {u(12)}, 100000);
  CHECK(a == ret(u(4096)));
  for (int i = 0; i < 3; ++i) CHECK(eval_fun(p, "f", {u(12)}, 100000) == a);
  CHECK(eval_fun(p, "f", {u(12)}, 100).kind == Outcome::Kind::OutOfFuel);
}
